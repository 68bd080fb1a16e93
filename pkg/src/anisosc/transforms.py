"""Canonical transformation chain: rescaling, complexification and the
anisotropic -> isotropic map.

The map sends each complex pair ``(X_j, P_j)`` to

    Xn_j = sqrt(w_j) e^{-i phi_j} X_j^{(1 + 1/w_j)/2} P_j^{(1 - 1/w_j)/2}
    Pn_j = sqrt(w_j) e^{+i phi_j} X_j^{(1 - 1/w_j)/2} P_j^{(1 + 1/w_j)/2}

with complex powers ``z**a = exp(a log z)``.  The amplitude phase ``phi_j``
is zero by default; any constant phase keeps the map canonical and
conjugacy-preserving (see :func:`amplitude_phases`).

Functions named ``*_components`` work on sequences of per-axis values that may
be scalars, numpy arrays or dual numbers; they do no validation and are the
building blocks for derivative-based checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import dual as ad
from .errors import (
    BranchAmbiguity,
    ConjugacyViolation,
    DimensionMismatch,
    NonFiniteValue,
    OriginSingularity,
)
from .phase_space import (
    DEFAULT_TOLERANCES,
    ComplexPhasePoint,
    FrequencySpec,
    RealPhasePoint,
    check_dims,
    validate,
)

SQRT2 = np.sqrt(2.0)
# fraction of a half turn that counts as "on the cut" for branch decisions
BRANCH_TOL = 1e-9


class BranchMode(Enum):
    PRINCIPAL = "principal"
    UNWRAP = "unwrap"


@dataclass(frozen=True)
class BranchPolicy:
    """Selects the sheet of every complex logarithm used by the map.

    ``PRINCIPAL`` uses ``Log`` with arguments in ``(-pi, pi]``.  ``UNWRAP``
    keeps logarithms continuous along a trajectory: ``reference_phase`` holds
    the previous (unwrapped) angles ``theta_j = arg X_j`` and every log is put
    on the sheet nearest to the value implied by that angle.
    """

    mode: BranchMode = BranchMode.PRINCIPAL
    reference_phase: Optional[tuple] = None

    def __post_init__(self):
        mode = BranchMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if self.reference_phase is not None:
            object.__setattr__(
                self, "reference_phase", tuple(float(t) for t in self.reference_phase)
            )
        if mode is BranchMode.UNWRAP and self.reference_phase is None:
            raise ValueError("UNWRAP branch policy needs a reference_phase")

    @classmethod
    def principal(cls) -> "BranchPolicy":
        return cls(BranchMode.PRINCIPAL)

    @classmethod
    def unwrap(cls, reference_phase: Sequence[float]) -> "BranchPolicy":
        return cls(BranchMode.UNWRAP, tuple(reference_phase))

    def advanced(self, theta: Sequence[float]) -> "BranchPolicy":
        """Same policy with the reference moved to ``theta``."""
        if self.mode is BranchMode.PRINCIPAL:
            return self
        return BranchPolicy(self.mode, tuple(theta))

    def _reference(self, like) -> np.ndarray:
        """Reference angles shaped to broadcast against per-axis ``like``."""
        like = np.asarray(like)
        ref = np.asarray(self.reference_phase, dtype=float)
        if ref.shape != (like.shape[0],):
            raise DimensionMismatch(
                f"reference_phase has length {ref.size}, expected {like.shape[0]}"
            )
        return ref.reshape((-1,) + (1,) * (like.ndim - 1))

    def windings_xp(self, X, P) -> tuple:
        """Winding numbers for ``log X_j`` and ``log P_j``."""
        if self.mode is BranchMode.PRINCIPAL:
            return 0, 0
        ref = self._reference(X)
        return (
            nearest_winding(np.angle(X), ref),
            nearest_winding(np.angle(P), -ref - np.pi / 2),
        )

    def windings_new(self, Xn, Pn, omegas, phases) -> tuple:
        """Winding numbers for ``log Xn_j`` and ``log Pn_j`` (inverse map)."""
        if self.mode is BranchMode.PRINCIPAL:
            for z in (Xn, Pn):
                if np.any(np.pi - np.abs(np.angle(z)) < BRANCH_TOL * np.pi):
                    raise BranchAmbiguity(
                        "new variable lies on the negative real axis; "
                        "principal branch cannot fix the square-root sign"
                    )
            return 0, 0
        ref = self._reference(Xn)
        w = np.asarray(omegas).reshape(ref.shape)
        phases = np.asarray(phases).reshape(ref.shape)
        arg_x = ref / w - (1 - 1 / w) * np.pi / 4 - phases
        arg_p = -ref / w - (1 + 1 / w) * np.pi / 4 + phases
        return nearest_winding(np.angle(Xn), arg_x), nearest_winding(np.angle(Pn), arg_p)


def nearest_winding(arg, expected) -> np.ndarray:
    """Integer k such that ``arg + 2 pi k`` is closest to ``expected``."""
    turns = (np.asarray(expected) - np.asarray(arg)) / ad.TWO_PI
    k = np.round(turns)
    if np.any(np.abs(np.abs(turns - k) - 0.5) < BRANCH_TOL):
        raise BranchAmbiguity("phase is half a turn from its reference")
    return k.astype(int)


def per_axis(winding, n: int):
    """Per-axis winding numbers from a scalar or an (n, ...) array."""
    return [winding] * n if np.ndim(winding) == 0 else winding


def amplitude_phases(freq: FrequencySpec, convention: str = "zero") -> np.ndarray:
    """Phases ``phi_j`` of the amplitude constant ``A_j = sqrt(w_j) e^{i phi_j}``.

    Only ``|A_j|**2 = w_j`` is forced by the requirement ``Pn = -i conj(Xn)``.
    ``"zero"`` gives the plain real root.  ``"closed_form"`` picks
    ``phi_j = (pi/2)(1/w_j - 1)``, the choice under which the contracted
    invariants coincide with the trigonometric closed forms (up to the sign
    of the second one); it vanishes at ``w_j = 1``.
    """
    w = freq.array
    if convention == "zero":
        return np.zeros_like(w)
    if convention == "closed_form":
        return 0.5 * np.pi * (1.0 / w - 1.0)
    raise ValueError(f"unknown amplitude phase convention {convention!r}")


# rescaling and complexification -------------------------------------------


def scale_to_unit(physical: RealPhasePoint, freq: FrequencySpec) -> RealPhasePoint:
    """Physical ``(q, p)`` to unit-scaled ``(sqrt(w) q, p / sqrt(w))``."""
    validate(physical)
    check_dims(physical, freq)
    s = np.sqrt(freq.array)
    return RealPhasePoint(physical.q * s, physical.p / s)


def scale_from_unit(scaled: RealPhasePoint, freq: FrequencySpec) -> RealPhasePoint:
    validate(scaled)
    check_dims(scaled, freq)
    s = np.sqrt(freq.array)
    return RealPhasePoint(scaled.q / s, scaled.p * s)


def physical_hamiltonian(physical: RealPhasePoint, freq: FrequencySpec) -> float:
    """``(1/2) sum_j (p_j^2 + w_j^2 q_j^2)`` in physical variables."""
    validate(physical)
    check_dims(physical, freq)
    w = freq.array
    return float(0.5 * np.sum(physical.p**2 + w**2 * physical.q**2))


def complexify_components(q, p):
    """``X_j = (q_j - i p_j)/sqrt2``, ``P_j = (p_j - i q_j)/sqrt2``."""
    X = [(qj - 1j * pj) / SQRT2 for qj, pj in zip(q, p)]
    P = [(pj - 1j * qj) / SQRT2 for qj, pj in zip(q, p)]
    return X, P


def complexify(real: RealPhasePoint) -> ComplexPhasePoint:
    validate(real)
    X, P = complexify_components(real.q, real.p)
    return ComplexPhasePoint(np.array(X), np.array(P), conjugacy_flag=True)


def decomplexify(
    point: ComplexPhasePoint, tol_conj: Optional[float] = None
) -> RealPhasePoint:
    """Invert :func:`complexify`; requires ``P = -i conj(X)``."""
    tol = point.tol_conj if tol_conj is None else tol_conj
    if len(point.X) != len(point.P):
        raise DimensionMismatch("X and P lengths differ")
    if not (np.all(np.isfinite(point.X)) and np.all(np.isfinite(point.P))):
        raise NonFiniteValue("complex point contains NaN or infinite entries")
    resid = point.conjugacy_residual()
    if resid > tol:
        raise ConjugacyViolation(f"max |P + i conj(X)| = {resid:.3e} > {tol:.1e}")
    return RealPhasePoint(SQRT2 * point.X.real, -SQRT2 * point.X.imag)


# the anisotropic -> isotropic map -------------------------------------------


def forward_components(X, P, omegas, phases=None, wind_x=0, wind_p=0):
    """Per-axis ``(X, P) -> (Xn, Pn)``; accepts arrays or dual numbers."""
    phases = np.zeros(len(omegas)) if phases is None else np.asarray(phases)
    wind_x = per_axis(wind_x, len(omegas))
    wind_p = per_axis(wind_p, len(omegas))
    Xn, Pn = [], []
    for j, w in enumerate(omegas):
        if w == 1.0 and phases[j] == 0.0:
            Xn.append(X[j])
            Pn.append(P[j])
            continue
        hi, lo = 0.5 * (1 + 1 / w), 0.5 * (1 - 1 / w)
        lx = ad.log(X[j], wind_x[j])
        lp = ad.log(P[j], wind_p[j])
        base = 0.5 * np.log(w)
        Xn.append(ad.exp(base - 1j * phases[j] + hi * lx + lo * lp))
        Pn.append(ad.exp(base + 1j * phases[j] + lo * lx + hi * lp))
    return Xn, Pn


def inverse_components(Xn, Pn, omegas, phases=None, wind_x=0, wind_p=0):
    """Per-axis ``(Xn, Pn) -> (X, P)``.

    Uses ``X P = Xn Pn / w`` and ``X / P = (Xn / Pn)**w`` in logarithmic form,
    ``log X = ((1 + w) log Xn + (1 - w) log Pn - log w) / 2``, which fixes the
    square-root sign through the sheets of ``log Xn`` and ``log Pn``.
    """
    phases = np.zeros(len(omegas)) if phases is None else np.asarray(phases)
    wind_x = per_axis(wind_x, len(omegas))
    wind_p = per_axis(wind_p, len(omegas))
    X, P = [], []
    for j, w in enumerate(omegas):
        if w == 1.0 and phases[j] == 0.0:
            X.append(Xn[j])
            P.append(Pn[j])
            continue
        lx = ad.log(Xn[j], wind_x[j]) + 1j * phases[j]
        lp = ad.log(Pn[j], wind_p[j]) - 1j * phases[j]
        lw = np.log(w)
        X.append(ad.exp(0.5 * ((1 + w) * lx + (1 - w) * lp - lw)))
        P.append(ad.exp(0.5 * ((1 - w) * lx + (1 + w) * lp - lw)))
    return X, P


def continuous_new_args(X, P, omegas, phases=None, wind_x=0, wind_p=0):
    """Arguments of ``Xn``, ``Pn`` before any wrapping into (-pi, pi]."""
    w = np.asarray(omegas).reshape((-1,) + (1,) * (np.ndim(X) - 1))
    phases = np.zeros(w.shape) if phases is None else np.asarray(phases).reshape(w.shape)
    ax = np.angle(X) + ad.TWO_PI * np.asarray(wind_x)
    ap = np.angle(P) + ad.TWO_PI * np.asarray(wind_p)
    hi, lo = 0.5 * (1 + 1 / w), 0.5 * (1 - 1 / w)
    return hi * ax + lo * ap - phases, lo * ax + hi * ap + phases


def principal_consistent(X, P, omegas, phases=None, margin=0.0) -> np.ndarray:
    """Mask of points whose new variables need no wrapping on the principal sheet.

    Where this holds, principal powers of ``Xn``/``Pn`` agree with powers of
    ``X``/``P``, which is what the generating functions rely on.  (Conjugacy
    needs no such restriction: ``arg Xn + arg Pn = arg X + arg P`` on any
    sheet, so conjugate inputs always give conjugate outputs.)
    """
    ax, ap = continuous_new_args(np.asarray(X), np.asarray(P), omegas, phases)
    lim = np.pi - margin
    ok = (np.abs(ax) < lim) & (np.abs(ap) < lim)
    return np.all(ok, axis=0)


def _check_origin(values, tol, name):
    if np.any(np.abs(values) < tol):
        raise OriginSingularity(f"|{name}_j| below tol_origin = {tol:.1e}")


def aniso_to_iso(
    point: ComplexPhasePoint,
    freq: FrequencySpec,
    branch: Optional[BranchPolicy] = None,
    phases=None,
    tol_origin: float = DEFAULT_TOLERANCES["origin"],
) -> ComplexPhasePoint:
    """Map anisotropic complex variables to isotropic ones.

    ``phases`` are the amplitude phases ``phi_j`` (default zero, see
    :func:`amplitude_phases`).
    """
    validate(point)
    check_dims(point, freq)
    branch = branch or BranchPolicy.principal()
    _check_origin(point.X, tol_origin, "X")
    _check_origin(point.P, tol_origin, "P")
    wx, wp = branch.windings_xp(point.X, point.P)
    Xn, Pn = forward_components(point.X, point.P, freq.omegas, phases, wx, wp)
    return _new_point(np.array(Xn), np.array(Pn), point)


def iso_to_aniso(
    point: ComplexPhasePoint,
    freq: FrequencySpec,
    branch: Optional[BranchPolicy] = None,
    phases=None,
    tol_origin: float = DEFAULT_TOLERANCES["origin"],
) -> ComplexPhasePoint:
    """Inverse of :func:`aniso_to_iso` under the same branch policy."""
    validate(point)
    check_dims(point, freq)
    branch = branch or BranchPolicy.principal()
    _check_origin(point.X, tol_origin, "Xn")
    _check_origin(point.P, tol_origin, "Pn")
    ph = np.zeros(freq.n) if phases is None else np.asarray(phases, dtype=float)
    wx, wp = branch.windings_new(point.X, point.P, freq.omegas, ph)
    X, P = inverse_components(point.X, point.P, freq.omegas, ph, wx, wp)
    return _new_point(np.array(X), np.array(P), point)


def _new_point(X, P, source: ComplexPhasePoint) -> ComplexPhasePoint:
    scale = max(1.0, float(np.max(np.abs(X))), float(np.max(np.abs(P))))
    resid = float(np.max(np.abs(P + 1j * np.conj(X))))
    conj_ok = source.conjugacy_flag and resid <= source.tol_conj * scale
    return ComplexPhasePoint(X, P, conjugacy_flag=conj_ok, tol_conj=source.tol_conj * scale)


def pde_residual(X, P, omega: float, phase: float = 0.0) -> np.ndarray:
    """Relative residual of ``P dPn/dP - X dPn/dX - Pn/w`` for one axis.

    This first-order equation is what the product and bracket conditions
    force on ``Pn``; the derivatives come from dual numbers.
    """
    X = np.asarray(X, dtype=complex)
    P = np.asarray(P, dtype=complex)
    grads = []
    for slot in (0, 1):
        x = ad.seed(X, 1.0 if slot == 0 else 0.0, complex_=True)
        p = ad.seed(P, 1.0 if slot == 1 else 0.0, complex_=True)
        _, (pn,) = forward_components([x], [p], [omega], [phase])
        grads.append(ad.deriv_of(pn))
    value = ad.value_of(pn)
    resid = P * grads[1] - X * grads[0] - value / omega
    return np.abs(resid) / np.maximum(np.abs(value / omega), np.finfo(float).tiny)
