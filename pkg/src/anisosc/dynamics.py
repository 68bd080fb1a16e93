"""Time evolution of the unit-scaled oscillator and invariant drift.

Under ``H = sum_j (w_j/2)(p_j^2 + q_j^2)`` each ``(q_j, p_j)`` plane rotates
clockwise at rate ``w_j``, i.e. ``X_j(t) = X_j(0) e^{i w_j t}`` and the phase
angle ``theta_j = arg X_j`` advances as ``theta_j(0) + w_j t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidStep, OriginSingularity, SamplingTooCoarse
from .invariants import closed_form_batch
from .phase_space import FrequencySpec, RealPhasePoint, check_dims, validate
from .transforms import nearest_winding

TWO_PI = 2.0 * np.pi
INVARIANT_NAMES = ("I0", "I1", "I2", "I3")


def rotate(q, p, omegas, t):
    """Exact flow on arrays; ``q``, ``p`` shaped ``(n, ...)``, ``t`` broadcastable."""
    w = np.asarray(omegas).reshape((-1,) + (1,) * (np.ndim(q) - 1))
    c, s = np.cos(w * t), np.sin(w * t)
    return q * c + p * s, p * c - q * s


def exact_flow(start: RealPhasePoint, freq: FrequencySpec, t: float) -> RealPhasePoint:
    validate(start)
    check_dims(start, freq)
    q, p = rotate(start.q, start.p, freq.omegas, t)
    return RealPhasePoint(q, p)


def leapfrog_flow(start: RealPhasePoint, freq: FrequencySpec, t: float, dt: float) -> RealPhasePoint:
    """Kick-drift-kick integration; an independent check on :func:`exact_flow`."""
    validate(start)
    check_dims(start, freq)
    if not dt > 0:
        raise InvalidStep(f"dt must be positive, got {dt}")
    steps = int(round(t / dt))
    if steps < 0 or abs(steps * dt - t) > 1e-12 * max(1.0, abs(t)):
        raise InvalidStep(f"t = {t} is not a non-negative multiple of dt = {dt}")
    w = freq.array
    q, p = start.q.copy(), start.p.copy()
    half = 0.5 * dt * w
    full = dt * w
    for _ in range(steps):
        p -= half * q
        q += full * p
        p -= half * q
    return RealPhasePoint(q, p)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Samples of one exact trajectory.

    ``q``/``p``/``theta`` are ``(n_samples, n)`` arrays; ``theta`` is
    unwrapped and ``winding`` counts the 2 pi turns added to the principal
    angle at each sample.
    """

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    theta: np.ndarray
    winding: np.ndarray
    freq: FrequencySpec

    def __len__(self):
        return len(self.times)

    @property
    def principal_theta(self) -> np.ndarray:
        return self.theta - TWO_PI * self.winding

    @property
    def points(self):
        return [RealPhasePoint(q, p) for q, p in zip(self.q, self.p)]

    def branch_crossing_counts(self) -> np.ndarray:
        """Cumulative number of principal-branch jumps up to each sample."""
        jumps = np.sum(np.abs(np.diff(self.winding, axis=0)), axis=1)
        return np.concatenate([[0], np.cumsum(jumps)])


def unwrap_sequence(raw: np.ndarray) -> np.ndarray:
    """Windings making successive rows of ``raw`` (principal angles) continuous."""
    winding = np.zeros(raw.shape, dtype=int)
    prev = raw[0]
    for i in range(1, len(raw)):
        winding[i] = nearest_winding(raw[i], prev)
        prev = raw[i] + TWO_PI * winding[i]
    return winding


def evolve_trajectory(
    start: RealPhasePoint, freq: FrequencySpec, t_max: float, n_samples: int
) -> Trajectory:
    """Sample the exact flow on ``n_samples`` equally spaced times in ``[0, t_max]``."""
    validate(start)
    check_dims(start, freq)
    if not t_max > 0 or n_samples < 2:
        raise ValueError("need t_max > 0 and n_samples >= 2")
    if np.any(np.hypot(start.q, start.p) == 0):
        raise OriginSingularity("a (q_j, p_j) plane starts at the origin; angle undefined")
    times = np.linspace(0.0, t_max, n_samples)
    dt = times[1] - times[0]
    if max(freq.omegas) * dt >= np.pi:
        raise SamplingTooCoarse(
            f"max(w) * dt = {max(freq.omegas) * dt:.3f} >= pi; angles cannot be unwrapped"
        )
    q, p = rotate(start.q[:, None], start.p[:, None], freq.omegas, times[None, :])
    q, p = q.T, p.T
    raw = np.arctan2(-p, q)
    winding = unwrap_sequence(raw)
    return Trajectory(times, q, p, raw + TWO_PI * winding, winding, freq)


@dataclass
class DriftReport:
    """Max deviation of each invariant from its value at t = 0, relative to
    ``max(1, |value(0)|)``.  ``segment_drift`` restarts the reference after
    every principal-branch jump."""

    drift: dict
    segment_drift: dict
    branch_crossings: int
    use_unwrapped: bool
    values: np.ndarray = field(repr=False, default=None)

    def max_drift(self, names=INVARIANT_NAMES) -> float:
        return max(self.drift[k] for k in names)


def trajectory_invariants(traj: Trajectory, use_unwrapped: bool = True) -> np.ndarray:
    theta = traj.theta if use_unwrapped else traj.principal_theta
    return closed_form_batch(traj.q.T, traj.p.T, traj.freq, theta.T)


def drift_report(traj: Trajectory, use_unwrapped: bool = True) -> DriftReport:
    if traj.freq.n != 2:
        raise DimensionMismatch("drift report needs a two-axis trajectory")
    vals = trajectory_invariants(traj, use_unwrapped)
    scale = np.maximum(1.0, np.abs(vals[0]))
    drift = np.max(np.abs(vals - vals[0]), axis=0) / scale

    crossings = traj.branch_crossing_counts()
    starts = np.flatnonzero(np.diff(crossings, prepend=-1))
    seg_drift = np.zeros(4)
    for lo, hi in zip(starts, list(starts[1:]) + [len(vals)]):
        seg = vals[lo:hi]
        seg_scale = np.maximum(1.0, np.abs(seg[0]))
        seg_drift = np.maximum(seg_drift, np.max(np.abs(seg - seg[0]), axis=0) / seg_scale)
    return DriftReport(
        drift=dict(zip(INVARIANT_NAMES, map(float, drift))),
        segment_drift=dict(zip(INVARIANT_NAMES, map(float, seg_drift))),
        branch_crossings=int(crossings[-1]),
        use_unwrapped=use_unwrapped,
        values=vals,
    )
