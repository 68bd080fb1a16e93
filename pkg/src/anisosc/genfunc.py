"""The four generating functions of the anisotropic -> isotropic map.

==== ================ ==========================================
kind arguments        total differential
==== ================ ==========================================
F1   (X, Xn)          sum_j (P_j dX_j - Pn_j dXn_j)
F2   (X, Pn)          sum_j (P_j dX_j + Xn_j dPn_j)
F3   (P, Xn)          sum_j (-X_j dP_j - Pn_j dXn_j)
F4   (P, Pn)          sum_j (-X_j dP_j + Xn_j dPn_j)
==== ================ ==========================================

``F1`` and ``F4`` carry exponents ``1/(1 - w_j)`` and are undefined at
``w_j = 1``.  All complex powers go through the same logarithm sheets as the
map itself, so ``(X, P, Xn, Pn)`` stay branch-consistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import dual as ad
from .errors import DimensionMismatch, IsotropicPole, OriginSingularity
from .phase_space import DEFAULT_TOLERANCES, FrequencySpec, RealPhasePoint, check_dims, validate
from .transforms import (
    BranchMode,
    BranchPolicy,
    complexify_components,
    forward_components,
    nearest_winding,
    per_axis,
)


class GenFuncKind(Enum):
    F1 = "F1"
    F2 = "F2"
    F3 = "F3"
    F4 = "F4"


ARGUMENTS = {
    GenFuncKind.F1: ("X", "Xn"),
    GenFuncKind.F2: ("X", "Pn"),
    GenFuncKind.F3: ("P", "Xn"),
    GenFuncKind.F4: ("P", "Pn"),
}

# (df/da, df/db) must equal (sign_a * var_a, sign_b * var_b)
GRADIENT_TARGETS = {
    GenFuncKind.F1: ((1, "P"), (-1, "Pn")),
    GenFuncKind.F2: ((1, "P"), (1, "Xn")),
    GenFuncKind.F3: ((-1, "X"), (-1, "Pn")),
    GenFuncKind.F4: ((-1, "X"), (1, "Xn")),
}


def _term(kind: GenFuncKind, a, b, w, wind_a=0, wind_b=0):
    la, lb = ad.log(a, wind_a), ad.log(b, wind_b)
    lw = np.log(w)
    if kind in (GenFuncKind.F1, GenFuncKind.F4):
        c = 1.0 - w
        sign = 1.0 if kind is GenFuncKind.F1 else -1.0
        return sign * 0.5 * c * ad.exp((w / c) * lw + (2 / c) * la - (2 * w / c) * lb)
    c = 1.0 + w
    sign = 1.0 if kind is GenFuncKind.F2 else -1.0
    return sign * 0.5 * c * ad.exp(-(w / c) * lw + (2 / c) * la + (2 * w / c) * lb)


def term_components(kind: GenFuncKind, a, b, omegas, wind_a=0, wind_b=0):
    """Per-axis terms of the generating function (they sum to ``F``)."""
    kind = GenFuncKind(kind)
    wa = per_axis(wind_a, len(omegas))
    wb = per_axis(wind_b, len(omegas))
    return [_term(kind, a[j], b[j], w, wa[j], wb[j]) for j, w in enumerate(omegas)]


def _check_pole(kind: GenFuncKind, freq: FrequencySpec, tol_pole: float):
    if kind in (GenFuncKind.F1, GenFuncKind.F4):
        near = [w for w in freq.omegas if abs(w - 1.0) < tol_pole]
        if near:
            raise IsotropicPole(f"{kind.value} has a pole at w = 1 (got w = {near[0]})")


def _policy_windings(branch: BranchPolicy, name: str, values, freq: FrequencySpec):
    if branch.mode is BranchMode.PRINCIPAL:
        return 0
    values = np.asarray(values)
    shape = (-1,) + (1,) * (values.ndim - 1)
    ref = np.asarray(branch.reference_phase, dtype=float).reshape(shape)
    w = freq.array.reshape(shape)
    expected = {
        "X": ref,
        "P": -ref - np.pi / 2,
        "Xn": ref / w - (1 - 1 / w) * np.pi / 4,
        "Pn": -ref / w - (1 + 1 / w) * np.pi / 4,
    }[name]
    return nearest_winding(np.angle(values), expected)


def evaluate(
    kind: GenFuncKind,
    a,
    b,
    freq: FrequencySpec,
    branch: Optional[BranchPolicy] = None,
    tol_pole: float = DEFAULT_TOLERANCES["pole"],
    tol_origin: float = DEFAULT_TOLERANCES["origin"],
) -> complex:
    """Value of ``kind`` at the argument pair ``(a, b)`` listed in :data:`ARGUMENTS`."""
    kind = GenFuncKind(kind)
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if len(a) != len(b) or len(a) != freq.n:
        raise DimensionMismatch(f"argument lengths {len(a)}, {len(b)} vs n = {freq.n}")
    _check_pole(kind, freq, tol_pole)
    if np.any(np.abs(a) < tol_origin) or np.any(np.abs(b) < tol_origin):
        raise OriginSingularity("generating-function argument vanishes")
    branch = branch or BranchPolicy.principal()
    name_a, name_b = ARGUMENTS[kind]
    wa = _policy_windings(branch, name_a, a, freq)
    wb = _policy_windings(branch, name_b, b, freq)
    return complex(sum(term_components(kind, a, b, freq.omegas, wa, wb)))


# verification -------------------------------------------------------------------


def consistent_variables(q, p, freq: FrequencySpec, branch: Optional[BranchPolicy] = None):
    """``{"X", "P", "Xn", "Pn"}`` arrays plus their log windings, all on the
    sheets chosen by ``branch`` (zero amplitude phase)."""
    branch = branch or BranchPolicy.principal()
    X, P = (np.array(v) for v in complexify_components(q, p))
    wx, wp = branch.windings_xp(X, P)
    Xn, Pn = (np.array(v) for v in forward_components(X, P, freq.omegas, None, wx, wp))
    variables = {"X": X, "P": P, "Xn": Xn, "Pn": Pn}
    windings = {
        "X": wx,
        "P": wp,
        "Xn": _policy_windings(branch, "Xn", Xn, freq),
        "Pn": _policy_windings(branch, "Pn", Pn, freq),
    }
    return variables, windings


def _as_qp(real_point):
    if isinstance(real_point, RealPhasePoint):
        validate(real_point)
        return real_point.q[:, None], real_point.p[:, None]
    q, p = real_point
    return np.asarray(q, float), np.asarray(p, float)


@dataclass
class GradientReport:
    kind: GenFuncKind
    max_residual: float
    residual_first: float
    residual_second: float


def check_gradients(
    kind: GenFuncKind,
    real_point,
    freq: FrequencySpec,
    branch: Optional[BranchPolicy] = None,
    tol_pole: float = DEFAULT_TOLERANCES["pole"],
) -> GradientReport:
    """Compare both partial derivatives of ``kind`` (dual numbers) with the
    variables they generate.  ``real_point`` may also be a ``(q, p)`` pair of
    ``(n, m)`` arrays on the principal branch."""
    kind = GenFuncKind(kind)
    _check_pole(kind, freq, tol_pole)
    q, p = _as_qp(real_point)
    if isinstance(real_point, RealPhasePoint):
        check_dims(real_point, freq)
    var, wind = consistent_variables(q, p, freq, branch)
    name_a, name_b = ARGUMENTS[kind]
    residuals = []
    for slot, (sign, target_name) in enumerate(GRADIENT_TARGETS[kind]):
        a = [ad.seed(v, 1.0 if slot == 0 else 0.0, complex_=True) for v in var[name_a]]
        b = [ad.seed(v, 1.0 if slot == 1 else 0.0, complex_=True) for v in var[name_b]]
        terms = term_components(kind, a, b, freq.omegas, wind[name_a], wind[name_b])
        grad = np.array([t.deriv for t in terms])
        target = sign * var[target_name]
        residuals.append(float(np.max(np.abs(grad - target) / np.maximum(1.0, np.abs(target)))))
    return GradientReport(kind, max(residuals), residuals[0], residuals[1])


@dataclass
class LegendreReport:
    residuals: dict
    max_residual: float
    values: dict


def check_legendre(
    real_point,
    freq: FrequencySpec,
    branch: Optional[BranchPolicy] = None,
    tol_pole: float = DEFAULT_TOLERANCES["pole"],
) -> LegendreReport:
    """Residuals of the three Legendre relations tying F2, F3, F4 to F1."""
    for kind in (GenFuncKind.F1, GenFuncKind.F4):
        _check_pole(kind, freq, tol_pole)
    q, p = _as_qp(real_point)
    var, wind = consistent_variables(q, p, freq, branch)
    F = {}
    for kind, (na, nb) in ARGUMENTS.items():
        terms = term_components(kind, var[na], var[nb], freq.omegas, wind[na], wind[nb])
        F[kind.value] = np.sum(terms, axis=0)
    xp = np.sum(var["X"] * var["P"], axis=0)
    new_xp = np.sum(var["Xn"] * var["Pn"], axis=0)
    scale = np.maximum.reduce([np.ones_like(xp.real)] + [np.abs(v) for v in F.values()] + [np.abs(xp), np.abs(new_xp)])
    residuals = {
        "F2=F1+XnPn": float(np.max(np.abs(F["F2"] - (F["F1"] + new_xp)) / scale)),
        "F3=F1-XP": float(np.max(np.abs(F["F3"] - (F["F1"] - xp)) / scale)),
        "F4=F1+XnPn-XP": float(np.max(np.abs(F["F4"] - (F["F1"] + new_xp - xp)) / scale)),
    }
    return LegendreReport(residuals, max(residuals.values()), F)


def line_integral_check(start: RealPhasePoint, end: RealPhasePoint, freq: FrequencySpec, steps: int = 10_000):
    """Trapezoid integral of ``sum_j (P_j dX_j - Pn_j dXn_j)`` along the straight
    segment ``start -> end`` in ``(q, p)``, against ``F1(end) - F1(start)``.

    Returns ``(integral, delta_f1, abs_residual)``.
    """
    _check_pole(GenFuncKind.F1, freq, DEFAULT_TOLERANCES["pole"])
    s = np.linspace(0.0, 1.0, steps + 1)
    q = start.q[:, None] + s * (end.q - start.q)[:, None]
    p = start.p[:, None] + s * (end.p - start.p)[:, None]
    var, _ = consistent_variables(q, p, freq)
    X, P, Xn, Pn = var["X"], var["P"], var["Xn"], var["Pn"]
    integrand_sum = 0.5 * (P[:, 1:] + P[:, :-1]) * np.diff(X, axis=1) - 0.5 * (
        Pn[:, 1:] + Pn[:, :-1]
    ) * np.diff(Xn, axis=1)
    integral = complex(np.sum(integrand_sum))
    f1 = np.sum(term_components(GenFuncKind.F1, X, Xn, freq.omegas), axis=0)
    delta = complex(f1[-1] - f1[0])
    return integral, delta, abs(integral - delta)
