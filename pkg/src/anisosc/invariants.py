"""Conserved quantities of the two-axis oscillator.

Three independent routes are provided:

* the isotropic invariants ``I0..I3`` in ``(q, p)``;
* the anisotropic ones through the trigonometric closed forms, driven by the
  phase angles ``theta_j = atan2(-p_j, q_j)`` (= arg X_j);
* the anisotropic ones as Pauli contractions ``i (sigma_mu)_{jk} Pn_j Xn_k``
  of the isotropic variables produced by the canonical map.

Sign and normalisation conventions between the routes:

* closed-form ``I2`` is minus the contracted one (and minus ``q2 p1 - q1 p2``
  in the isotropic limit); :func:`convention_signs` measures this at a
  reference point instead of hard-wiring it;
* the isotropic ``I3 = rho_1 - rho_2`` is twice the ``w -> 1`` limit of the
  anisotropic ``I3 = (w1 rho_1 - w2 rho_2)/2`` (``rho_j = p_j^2 + q_j^2``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import dual as ad
from .errors import DimensionMismatch, ImaginaryResidualExceeded, OriginSingularity
from .phase_space import (
    DEFAULT_TOLERANCES,
    FrequencySpec,
    InvariantSet,
    RealPhasePoint,
    check_dims,
    validate,
)
from .transforms import (
    BranchMode,
    BranchPolicy,
    amplitude_phases,
    complexify_components,
    forward_components,
    nearest_winding,
)

ISO_I3_SCALE = 2.0
PI = np.pi


@dataclass(frozen=True)
class PhaseAngles:
    theta: tuple
    unwrapped: bool = False
    winding: tuple = field(default=(0, 0))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.theta)

    @property
    def principal(self) -> np.ndarray:
        return self.array - ad.TWO_PI * np.array(self.winding)


def _require_two_axes(point: RealPhasePoint):
    validate(point)
    if point.n != 2:
        raise DimensionMismatch(f"invariants are implemented for n = 2, got n = {point.n}")


# per-route formulas on component sequences (arrays or dual numbers) ------------


def angle_components(q, p):
    return [ad.atan2(-pj, qj) for qj, pj in zip(q, p)]


def iso_components(q, p):
    q1, q2 = q
    p1, p2 = p
    rho1, rho2 = p1 * p1 + q1 * q1, p2 * p2 + q2 * q2
    return (
        0.5 * (rho1 + rho2),
        p1 * p2 + q1 * q2,
        q2 * p1 - q1 * p2,
        rho1 - rho2,
    )


def closed_form_components(q, p, omegas, theta):
    w1, w2 = omegas
    rho1 = p[0] * p[0] + q[0] * q[0]
    rho2 = p[1] * p[1] + q[1] * q[1]
    e1, e2 = 0.5 * w1 * rho1, 0.5 * w2 * rho2
    amp = ad.sqrt(w1 * w2 * rho1 * rho2)
    arg = 0.25 * PI * (1 / w2 - 1 / w1) - (theta[1] / w2 - theta[0] / w1)
    return e1 + e2, amp * ad.cos(arg), amp * ad.sin(arg), e1 - e2


def pauli_components(Xn, Pn):
    """``i (sigma_mu)_{jk} Pn_j Xn_k`` for mu = 0..3 (complex values)."""
    X1, X2 = Xn
    P1, P2 = Pn
    return (
        1j * (P1 * X1 + P2 * X2),
        1j * (P1 * X2 + P2 * X1),
        P1 * X2 - P2 * X1,
        1j * (P1 * X1 - P2 * X2),
    )


def epsilon_components(q, p, eps, theta):
    q1, q2 = q
    p1, p2 = p
    rho1, rho2 = p1 * p1 + q1 * q1, p2 * p2 + q2 * q2
    fradkin = p1 * p2 + q1 * q2
    ang = q2 * p1 - q1 * p2
    shift = (theta[0] + theta[1]) - 0.5 * PI
    return (
        0.5 * (1 + eps) * rho1 + 0.5 * (1 - eps) * rho2,
        fradkin - eps * ang * shift,
        ang + eps * fradkin * shift,
        0.5 * (1 + eps) * rho1 - 0.5 * (1 - eps) * rho2,
    )


def pauli_from_real(q, p, omegas, phases, wind_x=0, wind_p=0):
    X, P = complexify_components(q, p)
    Xn, Pn = forward_components(X, P, omegas, phases, wind_x, wind_p)
    return pauli_components(Xn, Pn)


# public operations ------------------------------------------------------------


def iso_invariants(point: RealPhasePoint) -> InvariantSet:
    _require_two_axes(point)
    vals = iso_components(point.q, point.p)
    return InvariantSet(*(float(v) for v in vals), route="isotropic")


def phase_angles(
    point: RealPhasePoint,
    previous: Optional[PhaseAngles] = None,
    tol_origin: float = DEFAULT_TOLERANCES["origin"],
) -> PhaseAngles:
    """``theta_j = atan2(-p_j, q_j)``, unwrapped against ``previous`` if given."""
    validate(point)
    if np.any(np.hypot(point.q, point.p) < tol_origin):
        raise OriginSingularity("phase angle undefined at q_j = p_j = 0")
    raw = np.arctan2(-point.p, point.q)
    if previous is None:
        return PhaseAngles(
            tuple(float(t) for t in raw), unwrapped=False, winding=(0,) * point.n
        )
    prev = previous.array
    if prev.shape != raw.shape:
        raise DimensionMismatch("previous angles have the wrong length")
    k = nearest_winding(raw, prev)
    return PhaseAngles(
        tuple(float(t) for t in raw + ad.TWO_PI * k),
        unwrapped=True,
        winding=tuple(int(x) for x in k),
    )


def aniso_invariants_closed(
    point: RealPhasePoint, freq: FrequencySpec, angles: Optional[PhaseAngles] = None
) -> InvariantSet:
    _require_two_axes(point)
    check_dims(point, freq)
    if angles is None:
        angles = phase_angles(point)
    vals = closed_form_components(point.q, point.p, freq.omegas, angles.array)
    return InvariantSet(
        *(float(v) for v in vals),
        theta=angles.theta,
        unwrapped=angles.unwrapped,
        route="closed",
    )


def aniso_invariants_pauli(
    point: RealPhasePoint,
    freq: FrequencySpec,
    branch: Optional[BranchPolicy] = None,
    tol_imag: float = DEFAULT_TOLERANCES["imag"],
    phase_convention: str = "closed_form",
    tol_origin: float = DEFAULT_TOLERANCES["origin"],
) -> InvariantSet:
    """Contracted invariants; raises if the discarded imaginary part exceeds
    ``tol_imag``.

    For conjugate variables the contractions are real on every sheet.  They
    equal the closed forms (after :func:`convention_signs`) only where the
    logarithm sheets follow the continuous angles: all ``q_j > 0`` on the
    principal branch, or anywhere under an ``UNWRAP`` policy.
    """
    _require_two_axes(point)
    check_dims(point, freq)
    branch = branch or BranchPolicy.principal()
    X, P = complexify_components(point.q, point.p)
    X, P = np.array(X), np.array(P)
    if np.any(np.abs(X) < tol_origin):
        raise OriginSingularity("X_j vanishes; complex powers undefined")
    wx, wp = branch.windings_xp(X, P)
    phases = amplitude_phases(freq, phase_convention)
    vals = np.array(pauli_from_real(point.q, point.p, freq.omegas, phases, wx, wp))
    resid = float(np.max(np.abs(vals.imag)))
    if resid > tol_imag:
        raise ImaginaryResidualExceeded(
            f"imaginary residual {resid:.3e} exceeds tol_imag = {tol_imag:.1e}"
        )
    theta = np.angle(X)
    unwrapped = branch.mode is BranchMode.UNWRAP
    if unwrapped:
        theta = theta + ad.TWO_PI * np.asarray(wx)
    return InvariantSet(
        *(float(v) for v in vals.real),
        residual_imag=resid,
        theta=tuple(float(t) for t in theta),
        unwrapped=unwrapped,
        route="pauli",
    )


def epsilon_invariants(point: RealPhasePoint, eps: float) -> InvariantSet:
    """First-order near-isotropic invariants for ``w = (1 + eps, 1 - eps)``."""
    _require_two_axes(point)
    if not 0 <= eps < 1:
        raise ValueError(f"eps must lie in [0, 1), got {eps}")
    angles = phase_angles(point)
    vals = epsilon_components(point.q, point.p, eps, angles.array)
    return InvariantSet(*(float(v) for v in vals), theta=angles.theta, route="epsilon")


# comparison harness -------------------------------------------------------------

_REFERENCE_CANDIDATES = (
    (1.0, 0.7, 0.4, -0.5),
    (0.9, 1.2, -0.6, 0.3),
    (1.5, 0.4, 0.2, 0.9),
    (0.5, 1.0, 0.8, -0.9),
)


def convention_signs(freq: FrequencySpec, reference: Optional[RealPhasePoint] = None) -> tuple:
    """Signs ``(s1, s2)`` with ``pauli_k = s_k * closed_k`` for k = 1, 2.

    Estimated once, at a reference point where both values are well away
    from zero, and meant to be applied uniformly afterwards.
    """
    candidates = [reference] if reference is not None else [
        RealPhasePoint.from_flat(c) for c in _REFERENCE_CANDIDATES
    ]
    for ref in candidates:
        closed = aniso_invariants_closed(ref, freq)
        pauli = aniso_invariants_pauli(ref, freq)
        scale = np.hypot(closed.i1, closed.i2)
        if min(abs(closed.i1), abs(closed.i2)) > 0.1 * scale:
            s1 = 1 if pauli.i1 * closed.i1 > 0 else -1
            s2 = 1 if pauli.i2 * closed.i2 > 0 else -1
            return s1, s2
    raise ValueError("no usable reference point for sign resolution")


def to_isotropic_convention(values, i2_sign: int) -> np.ndarray:
    """Closed-form values rewritten in the isotropic ``I0..I3`` convention."""
    v = np.array(values, dtype=float)
    v[..., 2] *= i2_sign
    v[..., 3] *= ISO_I3_SCALE
    return v


# batch helpers on (n, m) arrays ---------------------------------------------------


def closed_form_batch(q, p, freq: FrequencySpec, theta=None) -> np.ndarray:
    q, p = np.asarray(q, float), np.asarray(p, float)
    if theta is None:
        theta = np.arctan2(-p, q)
    return np.array(closed_form_components(q, p, freq.omegas, theta)).T


def pauli_batch(q, p, freq: FrequencySpec, phase_convention: str = "closed_form"):
    """``(values (m, 4), residual_imag (m,))`` on the principal branch."""
    phases = amplitude_phases(freq, phase_convention)
    vals = np.array(pauli_from_real(np.asarray(q, float), np.asarray(p, float), freq.omegas, phases))
    return vals.real.T, np.max(np.abs(vals.imag), axis=0)


def jacobian(q, p, freq: FrequencySpec) -> np.ndarray:
    """Jacobian of the closed-form invariants w.r.t. ``(q1, q2, p1, p2)``;
    shape ``(m, 4, 4)`` for inputs of shape ``(2, m)``."""
    q, p = np.atleast_2d(np.asarray(q, float).T).T, np.atleast_2d(np.asarray(p, float).T).T
    base = list(q) + list(p)
    cols = []
    for k in range(4):
        args = [ad.seed(v, 1.0 if i == k else 0.0) for i, v in enumerate(base)]
        qq, pp = args[:2], args[2:]
        vals = closed_form_components(qq, pp, freq.omegas, angle_components(qq, pp))
        cols.append([ad.deriv_of(v) for v in vals])
    return np.moveaxis(np.array(cols), -1, 0).transpose(0, 2, 1)


def functional_rank(point: RealPhasePoint, freq: FrequencySpec, null_tol=1e-8, keep_tol=1e-4):
    """``(rank, singular_values)`` of the invariant Jacobian at one point.

    Singular values below ``null_tol * s_max`` count as zero; the rank is only
    reported as 3 when the third value also clears ``keep_tol * s_max``.
    """
    _require_two_axes(point)
    jac = jacobian(point.q[:, None], point.p[:, None], freq)[0]
    s = np.linalg.svd(jac, compute_uv=False)
    rank = int(np.sum(s > null_tol * s[0]))
    if rank == 3 and s[2] <= keep_tol * s[0]:
        rank = 2
    return rank, s
