"""Poisson brackets by forward-mode differentiation.

Phase-space functions are plain callables ``f(a, b)`` taking per-axis
sequences of coordinates ``a`` and momenta ``b`` -- ``(q, p)`` in the real
basis, ``(X, P)`` in the complex one -- and returning a scalar.  Each entry
of ``a``/``b`` may hold an array of sample points, so one call evaluates a
bracket at many points.  Derivatives are exact (dual numbers); no finite
differences are used here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from . import dual as ad
from .errors import AnisoscError, DimensionMismatch, EvaluationError
from .invariants import angle_components, closed_form_components, pauli_from_real
from .phase_space import ComplexPhasePoint, FrequencySpec, RealPhasePoint
from .transforms import amplitude_phases


class BracketBasis(Enum):
    REAL_QP = "RealQP"
    COMPLEX_XP = "ComplexXP"


def as_batch(points, basis: Optional[BracketBasis] = None):
    """Normalise ``points`` to ``(a, b, basis)`` with ``a, b`` of shape (n, m).

    Accepts a phase point, a list of phase points, a ``(a, b)`` tuple, or a
    2-D array whose rows are ``[a_1..a_n, b_1..b_n]``.
    """
    if isinstance(points, (RealPhasePoint, ComplexPhasePoint)):
        points = [points]
    if isinstance(points, tuple) and len(points) == 2:
        a, b = (np.asarray(x) for x in points)
        if a.ndim == 1:
            a, b = a[:, None], b[:, None]
    elif isinstance(points, list) and points and isinstance(points[0], RealPhasePoint):
        a = np.array([pt.q for pt in points]).T
        b = np.array([pt.p for pt in points]).T
        basis = basis or BracketBasis.REAL_QP
    elif isinstance(points, list) and points and isinstance(points[0], ComplexPhasePoint):
        a = np.array([pt.X for pt in points]).T
        b = np.array([pt.P for pt in points]).T
        basis = basis or BracketBasis.COMPLEX_XP
    else:
        rows = np.atleast_2d(np.asarray(points))
        if rows.shape[1] % 2:
            raise DimensionMismatch("rows must hold [a_1..a_n, b_1..b_n]")
        half = rows.shape[1] // 2
        a, b = rows[:, :half].T, rows[:, half:].T
    if a.shape != b.shape:
        raise DimensionMismatch(f"coordinate shape {a.shape} != momentum shape {b.shape}")
    if basis is None:
        basis = BracketBasis.COMPLEX_XP if np.iscomplexobj(a) else BracketBasis.REAL_QP
    return a, b, BracketBasis(basis)


def _evaluate(func, a, b):
    with np.errstate(divide="raise", invalid="raise"):
        try:
            out = func(a, b)
        except (AnisoscError, ArithmeticError, ValueError) as exc:
            raise EvaluationError(f"function failed: {exc}") from exc
    return out


def directional_pass(func: Callable, a, b, basis: BracketBasis, index: int):
    """Evaluate ``func`` with the derivative seeded on input ``index``
    (``0..n-1`` coordinates, ``n..2n-1`` momenta)."""
    complex_ = basis is BracketBasis.COMPLEX_XP
    n = len(a)
    args = [
        ad.seed(v, 1.0 if i == index else 0.0, complex_=complex_)
        for i, v in enumerate(list(a) + list(b))
    ]
    return _evaluate(func, args[:n], args[n:])


def _locate_failure(func, a, b, basis):
    for k in range(a.shape[1]):
        try:
            for i in range(2 * len(a)):
                directional_pass(func, a[:, k : k + 1], b[:, k : k + 1], basis, i)
        except EvaluationError as exc:
            raise EvaluationError(str(exc), point=(a[:, k], b[:, k])) from exc


def map_jacobian(func: Callable, a, b, basis: BracketBasis) -> np.ndarray:
    """Jacobian of a vector function; shape ``(m, n_out, 2n)``."""
    cols = []
    try:
        for i in range(2 * len(a)):
            outs = directional_pass(func, a, b, basis, i)
            cols.append([np.broadcast_to(ad.deriv_of(o), a.shape[1:]) for o in outs])
    except EvaluationError:
        _locate_failure(func, a, b, basis)
        raise
    jac = np.array(cols)  # (2n, n_out, m)
    if not np.all(np.isfinite(jac)):
        raise EvaluationError("non-finite derivative encountered")
    return np.moveaxis(jac, -1, 0).transpose(0, 2, 1)


def symplectic_matrix(n: int) -> np.ndarray:
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def bracket_matrix(jac: np.ndarray) -> np.ndarray:
    """All pairwise brackets ``{F_i, F_j}`` from the Jacobian of ``F``."""
    n = jac.shape[-1] // 2
    return jac @ symplectic_matrix(n) @ np.swapaxes(jac, -1, -2)


def poisson_bracket(f: Callable, g: Callable, point, basis: Optional[BracketBasis] = None):
    """``sum_j (df/da_j dg/db_j - df/db_j dg/da_j)`` at ``point``.

    Returns a scalar for a single point, an array for a batch.
    """
    single = isinstance(point, (RealPhasePoint, ComplexPhasePoint))
    a, b, basis = as_batch(point, basis)
    jac = map_jacobian(lambda x, y: (f(x, y), g(x, y)), a, b, basis)
    n = len(a)
    df, dg = jac[:, 0], jac[:, 1]
    # explicit pairing keeps {f, f} = 0 exactly
    vals = np.sum(df[:, :n] * dg[:, n:] - df[:, n:] * dg[:, :n], axis=1)
    if np.isrealobj(a) and basis is BracketBasis.REAL_QP and np.all(vals.imag == 0):
        vals = vals.real
    return vals[0] if single else vals


@dataclass
class CanonicalReport:
    max_residual: float
    residuals: dict
    n_points: int
    worst_index: int = -1
    extra: dict = field(default_factory=dict)

    def passed(self, tol: float) -> bool:
        return self.max_residual < tol


def verify_canonical(map_: Callable, points, basis: Optional[BracketBasis] = None):
    """Max deviation of the image variables from canonical brackets.

    ``map_(a, b)`` must return ``(A, B)``, the new coordinates and momenta.
    Residuals: ``{A_j, B_k} - delta_jk``, ``{A_j, A_k}``, ``{B_j, B_k}``.
    """
    a, b, basis = as_batch(points, basis)
    n = len(a)

    def flat(x, y):
        A, B = map_(x, y)
        return list(A) + list(B)

    jac = map_jacobian(flat, a, b, basis)
    brackets = bracket_matrix(jac)
    dev = np.abs(brackets - symplectic_matrix(n))
    residuals = {
        "xp": float(dev[:, :n, n:].max()),
        "xx": float(dev[:, :n, :n].max()),
        "pp": float(dev[:, n:, n:].max()),
    }
    per_point = dev.reshape(dev.shape[0], -1).max(axis=1)
    return CanonicalReport(
        max_residual=max(residuals.values()),
        residuals=residuals,
        n_points=a.shape[1],
        worst_index=int(np.argmax(per_point)),
    )


@dataclass
class Su2Report:
    max_residual: float
    residuals: dict
    n_points: int
    structure_sign: int = 1

    def passed(self, tol: float) -> bool:
        return self.max_residual < tol


def invariant_functions(freq: FrequencySpec, route: str = "closed") -> Callable:
    """``(q, p) -> (I0, I1, I2, I3)`` for use under dual lifting."""
    if route == "closed":
        return lambda q, p: closed_form_components(q, p, freq.omegas, angle_components(q, p))
    if route == "pauli":
        phases = amplitude_phases(freq, "closed_form")
        return lambda q, p: [
            ad.real(v) for v in pauli_from_real(q, p, freq.omegas, phases)
        ]
    raise ValueError(f"unknown invariant route {route!r}")


def verify_su2(freq: FrequencySpec, points, route: str = "closed", structure_sign: int = 1):
    """su(2) closure ``{J_j, J_k} = s eps_jkl J_l`` with ``J = I/2`` and
    commutation of each ``J_k`` with ``I0``, in the real ``(q, p)`` basis.

    ``structure_sign`` is +1 for the closed forms; the Pauli contraction obeys
    the same algebra with -1 (it differs from them by a reflection).
    """
    if freq.n != 2:
        raise DimensionMismatch("su(2) check is defined for n = 2")
    a, b, _ = as_batch(points, BracketBasis.REAL_QP)
    jac = map_jacobian(invariant_functions(freq, route), a.real, b.real, BracketBasis.REAL_QP)
    br = bracket_matrix(np.real(jac))
    vals = np.array(invariant_functions(freq, route)(list(a.real), list(b.real))).real
    I = 0.5 * vals  # J_k; index 0 keeps I0/2 unused
    s = structure_sign
    residuals = {
        "{J1,J2}-J3": float(np.max(np.abs(0.25 * br[:, 1, 2] - s * I[3]))),
        "{J2,J3}-J1": float(np.max(np.abs(0.25 * br[:, 2, 3] - s * I[1]))),
        "{J3,J1}-J2": float(np.max(np.abs(0.25 * br[:, 3, 1] - s * I[2]))),
        "{J1,I0}": float(np.max(np.abs(0.5 * br[:, 1, 0]))),
        "{J2,I0}": float(np.max(np.abs(0.5 * br[:, 2, 0]))),
        "{J3,I0}": float(np.max(np.abs(0.5 * br[:, 3, 0]))),
    }
    return Su2Report(
        max_residual=max(residuals.values()),
        residuals=residuals,
        n_points=a.shape[1],
        structure_sign=s,
    )
