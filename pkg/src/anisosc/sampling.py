"""Seeded random phase-space samples away from the per-plane origin."""

from __future__ import annotations

import numpy as np

from .phase_space import FrequencySpec
from .transforms import amplitude_phases, complexify_components, principal_consistent

BOX = 2.0
MIN_RADIUS = 0.1


def uniform_points(n_points: int, n: int = 2, seed: int = 42, box: float = BOX, min_radius: float = MIN_RADIUS, max_theta: float = np.pi):
    """``(q, p)``, each ``(n, n_points)``, uniform in ``[-box, box]`` per coordinate.

    Points with some ``sqrt(q_j^2 + p_j^2) < min_radius`` or some
    ``|theta_j| >= max_theta`` are rejected and redrawn.
    """
    rng = np.random.default_rng(seed)
    q_parts, p_parts, have = [], [], 0
    while have < n_points:
        draw = rng.uniform(-box, box, size=(2 * n, max(64, 2 * (n_points - have))))
        q, p = draw[:n], draw[n:]
        ok = np.all(np.hypot(q, p) >= min_radius, axis=0)
        ok &= np.all(np.abs(np.arctan2(-p, q)) < max_theta, axis=0)
        q_parts.append(q[:, ok])
        p_parts.append(p[:, ok])
        have += int(ok.sum())
    q = np.concatenate(q_parts, axis=1)[:, :n_points]
    p = np.concatenate(p_parts, axis=1)[:, :n_points]
    return q, p


def branch_safe_points(
    n_points: int,
    freq: FrequencySpec,
    seed: int = 42,
    margin: float = 0.05,
    phase_convention: str = "zero",
):
    """Samples on which every complex power of the map stays on the principal
    sheet with ``margin`` to spare.

    With every ``q_j > 0`` the principal sheet agrees with the continuous
    angles ``theta_j``, so the contracted invariants equal the closed forms,
    and the generating functions are differentiable in their own arguments.
    """
    rng = np.random.default_rng(seed)
    n = freq.n
    phases = amplitude_phases(freq, phase_convention)
    q_parts, p_parts, have = [], [], 0
    while have < n_points:
        # theta_j in (-pi/2, pi/2) means q_j > 0: sample there directly
        k = max(64, 4 * (n_points - have))
        q = rng.uniform(0.0, BOX, size=(n, k))
        p = rng.uniform(-BOX, BOX, size=(n, k))
        ok = np.all(np.hypot(q, p) >= MIN_RADIUS, axis=0)
        ok &= np.all(np.abs(np.arctan2(-p, q)) < np.pi / 2 - margin, axis=0)
        X, P = complexify_components(q, p)
        ok &= principal_consistent(X, P, freq.omegas, phases, margin)
        q_parts.append(q[:, ok])
        p_parts.append(p[:, ok])
        have += int(ok.sum())
    q = np.concatenate(q_parts, axis=1)[:, :n_points]
    p = np.concatenate(p_parts, axis=1)[:, :n_points]
    return q, p
