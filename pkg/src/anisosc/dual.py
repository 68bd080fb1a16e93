"""Forward-mode dual numbers, real and complex.

A dual number carries a value and one directional derivative.  Values may be
scalars or numpy arrays, so a single forward pass differentiates a formula at
many sample points at once.  The module-level functions (:func:`exp`,
:func:`log`, :func:`atan2`, ...) accept dual numbers, plain scalars and arrays
alike; phase-space formulas written with them are differentiable for free.

:class:`CDual` treats its argument as a holomorphic variable.  ``real``,
``imag`` and ``conj`` are provided too, and are exact when the seeded
direction is a real coordinate.
"""

from __future__ import annotations

import numbers

import numpy as np

TWO_PI = 2.0 * np.pi


class Dual:
    """Dual number ``value + deriv * eps`` with ``eps**2 = 0``."""

    __slots__ = ("value", "deriv")
    # make numpy hand ``array * Dual`` over to our reflected operators
    __array_ufunc__ = None

    def __init__(self, value, deriv=0.0):
        self.value = value
        self.deriv = deriv

    def __repr__(self):
        return f"{type(self).__name__}({self.value!r}, {self.deriv!r})"

    def __add__(self, other):
        other = _lift(other)
        return _make(self.value + other.value, self.deriv + other.deriv)

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        return _make(self.value - other.value, self.deriv - other.deriv)

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        return _make(
            self.value * other.value,
            self.value * other.deriv + self.deriv * other.value,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        value = self.value / other.value
        return _make(value, (self.deriv - value * other.deriv) / other.value)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __neg__(self):
        return _make(-self.value, -self.deriv)

    def __pos__(self):
        return self

    def __pow__(self, power):
        if isinstance(power, Dual):
            return exp(power * log(self))
        if isinstance(self, CDual) and not float(np.real(power)).is_integer():
            return exp(power * log(self))
        if power == 0:
            return _make(np.ones_like(self.value), np.zeros_like(self.deriv))
        return _make(
            self.value**power, power * self.value ** (power - 1) * self.deriv
        )

    def __rpow__(self, base):
        return exp(self * log(base))


class CDual(Dual):
    """Complex dual number; ``log`` and powers use the principal branch
    unless a winding number is supplied."""

    __slots__ = ()


def _is_complex(x) -> bool:
    return isinstance(x, numbers.Complex) and not isinstance(x, numbers.Real) or (
        np.iscomplexobj(x)
    )


def _make(value, deriv):
    if _is_complex(value) or _is_complex(deriv):
        return CDual(value, deriv)
    return Dual(value, deriv)


def _lift(x) -> Dual:
    if isinstance(x, Dual):
        return x
    return _make(x, 0.0 * np.asarray(x) if np.ndim(x) else 0.0)


def value_of(x):
    return x.value if isinstance(x, Dual) else x


def deriv_of(x):
    return x.deriv if isinstance(x, Dual) else np.zeros_like(np.asarray(x))


def seed(value, deriv=1.0, complex_=False):
    """Dual number with the given value and seeded derivative."""
    cls = CDual if complex_ or _is_complex(value) else Dual
    value = np.asarray(value, dtype=complex if cls is CDual else float)
    return cls(value, np.broadcast_to(np.asarray(deriv, dtype=value.dtype), value.shape).copy())


# elementary functions ------------------------------------------------------


def exp(x):
    if isinstance(x, Dual):
        v = np.exp(x.value)
        return _make(v, v * x.deriv)
    return np.exp(x)


def log(x, winding=0):
    """Logarithm; for complex input ``winding`` selects the sheet
    ``Log(x) + 2 pi i winding`` (0 is the principal branch)."""
    shift = 1j * TWO_PI * np.asarray(winding) if np.any(winding) else 0.0
    if isinstance(x, Dual):
        return _make(np.log(x.value) + shift, x.deriv / x.value)
    return np.log(x) + shift


def sqrt(x):
    if isinstance(x, Dual):
        s = np.sqrt(x.value)
        return _make(s, 0.5 * x.deriv / s)
    return np.sqrt(x)


def sin(x):
    if isinstance(x, Dual):
        return _make(np.sin(x.value), np.cos(x.value) * x.deriv)
    return np.sin(x)


def cos(x):
    if isinstance(x, Dual):
        return _make(np.cos(x.value), -np.sin(x.value) * x.deriv)
    return np.cos(x)


def arctan(x):
    if isinstance(x, Dual):
        return _make(np.arctan(x.value), x.deriv / (1.0 + x.value**2))
    return np.arctan(x)


def atan2(y, x):
    """Full-plane angle of ``(x, y)``; real arguments only."""
    if isinstance(y, CDual) or isinstance(x, CDual):
        raise TypeError("atan2 is only defined for real dual numbers")
    if not (isinstance(y, Dual) or isinstance(x, Dual)):
        return np.arctan2(y, x)
    y, x = _lift(y), _lift(x)
    r2 = x.value**2 + y.value**2
    return Dual(np.arctan2(y.value, x.value), (x.value * y.deriv - y.value * x.deriv) / r2)


def power(x, a, winding=0):
    """``x**a = exp(a log x)`` on the sheet selected by ``winding``."""
    return exp(a * log(x, winding))


def real(x):
    if isinstance(x, Dual):
        return Dual(np.real(x.value), np.real(x.deriv))
    return np.real(x)


def imag(x):
    if isinstance(x, Dual):
        return Dual(np.imag(x.value), np.imag(x.deriv))
    return np.imag(x)


def conj(x):
    if isinstance(x, Dual):
        return _make(np.conj(x.value), np.conj(x.deriv))
    return np.conj(x)


def derivative(f, x0, complex_=False):
    """``f'(x0)`` for a scalar function of one variable."""
    return deriv_of(f(seed(x0, 1.0, complex_=complex_)))
