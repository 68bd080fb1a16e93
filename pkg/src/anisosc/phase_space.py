"""Value types for real and complex phase space, frequencies and invariants.

All coordinates are the unit-scaled ones, in which the anisotropic
Hamiltonian reads ``H = sum_j (w_j / 2) (p_j**2 + q_j**2)``.  Use
:func:`anisosc.transforms.scale_to_unit` to get there from physical
variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConjugacyViolation, DimensionMismatch, NonFiniteValue

DEFAULT_TOLERANCES = {
    "conj": 1e-12,
    "imag": 1e-9,
    "origin": 1e-14,
    "pole": 1e-8,
    "prod": 1e-12,
}


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class RealPhasePoint:
    """Real canonical coordinates ``(q_1..q_n, p_1..p_n)``."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(self.q, float))
        object.__setattr__(self, "p", _frozen(self.p, float))

    @property
    def n(self) -> int:
        return len(self.q)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "RealPhasePoint":
        """Build from ``[q_1, .., q_n, p_1, .., p_n]``."""
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size == 0 or values.size % 2:
            raise DimensionMismatch(
                f"flat phase point needs an even, non-zero length, got {values.size}"
            )
        half = values.size // 2
        return cls(values[:half], values[half:])

    def as_flat(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    def __eq__(self, other):
        if not isinstance(other, RealPhasePoint):
            return NotImplemented
        return np.array_equal(self.q, other.q) and np.array_equal(self.p, other.p)


@dataclass(frozen=True, eq=False)
class ComplexPhasePoint:
    """Complex canonical pairs ``(X_j, P_j)``.

    ``conjugacy_flag`` marks points expected to satisfy ``P_j = -i conj(X_j)``,
    which is what :func:`anisosc.transforms.complexify` produces.
    """

    X: np.ndarray
    P: np.ndarray
    conjugacy_flag: bool = False
    tol_conj: float = DEFAULT_TOLERANCES["conj"]

    def __post_init__(self):
        object.__setattr__(self, "X", _frozen(self.X, complex))
        object.__setattr__(self, "P", _frozen(self.P, complex))

    @property
    def n(self) -> int:
        return len(self.X)

    def conjugacy_residual(self) -> float:
        return float(np.max(np.abs(self.P + 1j * np.conj(self.X)), initial=0.0))

    def __eq__(self, other):
        if not isinstance(other, ComplexPhasePoint):
            return NotImplemented
        return (
            np.array_equal(self.X, other.X)
            and np.array_equal(self.P, other.P)
            and self.conjugacy_flag == other.conjugacy_flag
        )


@dataclass(frozen=True)
class FrequencySpec:
    """Per-axis frequencies ``w_j > 0``.

    For the near-isotropic two-axis case build it with
    :meth:`from_epsilon`, which records ``w = (1 + eps, 1 - eps)``.
    """

    omegas: tuple
    epsilon_view: Optional[float] = None

    def __post_init__(self):
        omegas = tuple(float(w) for w in np.atleast_1d(np.asarray(self.omegas, dtype=float)))
        object.__setattr__(self, "omegas", omegas)
        if not omegas:
            raise DimensionMismatch("FrequencySpec needs at least one frequency")
        if not all(np.isfinite(w) and w > 0 for w in omegas):
            raise ValueError(f"frequencies must be finite and positive, got {omegas}")
        eps = self.epsilon_view
        if eps is not None:
            if len(omegas) != 2:
                raise DimensionMismatch("epsilon view is only defined for n = 2")
            if not 0 <= eps < 1:
                raise ValueError(f"epsilon must lie in [0, 1), got {eps}")
            if abs(omegas[0] - (1 + eps)) > 1e-15 or abs(omegas[1] - (1 - eps)) > 1e-15:
                raise ValueError("omegas are inconsistent with the epsilon view")

    @classmethod
    def from_epsilon(cls, eps: float) -> "FrequencySpec":
        return cls((1.0 + eps, 1.0 - eps), epsilon_view=eps)

    @property
    def n(self) -> int:
        return len(self.omegas)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.omegas)


@dataclass(frozen=True)
class InvariantSet:
    """Values of the four conserved quantities at one phase point.

    ``residual_imag`` is the largest imaginary part discarded when the values
    were obtained from complex variables (zero for real formulas).
    """

    i0: float
    i1: float
    i2: float
    i3: float
    residual_imag: float = 0.0
    theta: tuple = field(default=())
    unwrapped: bool = False
    route: str = ""

    def as_array(self) -> np.ndarray:
        return np.array([self.i0, self.i1, self.i2, self.i3])

    def is_valid(self, tol_imag: float = DEFAULT_TOLERANCES["imag"]) -> bool:
        return 0.0 <= self.residual_imag <= tol_imag


PhasePoint = Union[RealPhasePoint, ComplexPhasePoint]


def validate(point: PhasePoint) -> PhasePoint:
    """Return ``point`` unchanged if its type invariants hold, else raise."""
    if isinstance(point, RealPhasePoint):
        a, b = point.q, point.p
    elif isinstance(point, ComplexPhasePoint):
        a, b = point.X, point.P
    else:
        raise TypeError(f"not a phase point: {type(point).__name__}")
    if len(a) != len(b) or len(a) == 0:
        raise DimensionMismatch(
            f"coordinate/momentum lengths differ or are empty: {len(a)} vs {len(b)}"
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NonFiniteValue("phase point contains NaN or infinite entries")
    if isinstance(point, ComplexPhasePoint) and point.conjugacy_flag:
        resid = point.conjugacy_residual()
        if resid > point.tol_conj:
            raise ConjugacyViolation(
                f"max |P + i conj(X)| = {resid:.3e} exceeds tol_conj = {point.tol_conj:.1e}"
            )
    return point


def check_dims(point: PhasePoint, freq: FrequencySpec) -> None:
    if point.n != freq.n:
        raise DimensionMismatch(f"point has n = {point.n} but {freq.n} frequencies given")


def hamiltonian_real(point: RealPhasePoint, freq: FrequencySpec) -> float:
    """Unit-scaled energy ``sum_j (w_j/2) (p_j^2 + q_j^2)``."""
    validate(point)
    check_dims(point, freq)
    return float(np.sum(0.5 * freq.array * (point.p**2 + point.q**2)))
