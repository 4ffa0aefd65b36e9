"""Truncated Taylor series with complex coefficients.

A :class:`TruncatedSeries` of order ``N`` stores ``c_0 .. c_N``; coefficients
beyond ``N`` are unknown, not zero.  Binary operations therefore truncate to
the smaller of the two orders.

    >>> geo = reciprocal(TruncatedSeries([1, -1], order=8))
    >>> mul(geo, geo).coeffs.real[:4]
    array([1., 2., 3., 4.])
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import (
    NearZeroConstantTerm,
    NotUnitConstantTerm,
    NotZeroConstantTerm,
    OutsideDisc,
)

DEFAULT_ORDER = 128
# below this the reciprocal recursion amplifies noise past any useful tolerance
DIVISION_EPS = 1e-14
UNIT_TOL = 1e-12


class TruncatedSeries:
    """Immutable complex Taylor series ``c_0 + c_1 z + ... + c_N z^N``."""

    __slots__ = ("_c",)
    # let numpy scalars defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, coeffs: Sequence[complex] | np.ndarray, order: int | None = None):
        c = np.asarray(coeffs, dtype=complex).ravel()
        if order is not None:
            if order < 0:
                raise ValueError("order must be non-negative")
            if c.size > order + 1:
                c = c[: order + 1]
            elif c.size < order + 1:
                c = np.concatenate([c, np.zeros(order + 1 - c.size, dtype=complex)])
        if c.size == 0:
            raise ValueError("a series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls([value], order=order)

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        """The series of ``z``."""
        return cls([0, 1], order=order)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size - 1

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, k):
        return self._c[k]

    def __repr__(self) -> str:
        head = ", ".join(f"{c:.6g}" for c in self._c[:6])
        tail = ", ..." if self._c.size > 6 else ""
        return f"TruncatedSeries([{head}{tail}], order={self.order})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and bool(np.all(self._c == other._c))

    __hash__ = None

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot raise the order of a truncated series")
        return TruncatedSeries(self._c[: order + 1])

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return add(self, other)
        c = self._c.copy()
        c[0] += other
        return TruncatedSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return TruncatedSeries(self._c * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, reciprocal(other))
        return TruncatedSeries(self._c / complex(other))

    def __call__(self, z):
        return evaluate(self, z)


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    n = min(a.order, b.order)
    return TruncatedSeries(a.coeffs[: n + 1] + b.coeffs[: n + 1])


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at ``min(a.order, b.order)``."""
    n = min(a.order, b.order)
    return TruncatedSeries(np.convolve(a.coeffs[: n + 1], b.coeffs[: n + 1])[: n + 1])


def reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    c = a.coeffs
    if abs(c[0]) <= DIVISION_EPS:
        raise NearZeroConstantTerm(f"|c0| = {abs(c[0]):.3g} is below {DIVISION_EPS:g}")
    n = a.order
    b = np.zeros(n + 1, dtype=complex)
    inv0 = 1.0 / c[0]
    b[0] = inv0
    for k in range(1, n + 1):
        # b_k = -(1/c_0) * sum_{j=1..k} c_j b_{k-j}
        b[k] = -inv0 * np.dot(c[1 : k + 1], b[k - 1 :: -1])
    return TruncatedSeries(b)


def differentiate(a: TruncatedSeries) -> TruncatedSeries:
    if a.order < 1:
        raise ValueError("differentiation needs order >= 1")
    k = np.arange(1, a.order + 1)
    return TruncatedSeries(k * a.coeffs[1:])


def integrate(a: TruncatedSeries) -> TruncatedSeries:
    """Antiderivative vanishing at 0; the order grows by one."""
    k = np.arange(1, a.order + 2)
    return TruncatedSeries(np.concatenate([[0.0], a.coeffs / k]))


def log_unit(a: TruncatedSeries) -> TruncatedSeries:
    """Principal logarithm of a series with constant term 1."""
    if abs(a.coeffs[0] - 1) > UNIT_TOL:
        raise NotUnitConstantTerm(f"log_unit needs c0 = 1, got {a.coeffs[0]!r}")
    if a.order == 0:
        return TruncatedSeries([0.0])
    return integrate(mul(differentiate(a), reciprocal(a)))


def exp_series(a: TruncatedSeries) -> TruncatedSeries:
    """Exponential of a series with zero constant term, via ``E' = a' E``."""
    c = a.coeffs
    if abs(c[0]) > UNIT_TOL:
        raise NotZeroConstantTerm(f"exp_series needs c0 = 0, got {c[0]!r}")
    n = a.order
    jc = np.arange(n + 1) * c
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = np.dot(jc[1 : k + 1], e[k - 1 :: -1]) / k
    return TruncatedSeries(e)


def pow_alpha(a: TruncatedSeries, alpha: complex) -> TruncatedSeries:
    """Principal power ``a**alpha`` for a series anchored at ``a(0) = 1``."""
    if abs(a.coeffs[0] - 1) > UNIT_TOL:
        raise NotUnitConstantTerm(f"pow_alpha needs c0 = 1, got {a.coeffs[0]!r}")
    if alpha == 0:
        return TruncatedSeries.constant(1.0, a.order)
    return exp_series(alpha * log_unit(a))


def evaluate(a: TruncatedSeries, z):
    """Horner evaluation at ``z`` (scalar or array) inside the open unit disc."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.abs(zz) >= 1):
        raise OutsideDisc("series are only evaluated for |z| < 1")
    c = a.coeffs
    acc = np.full(zz.shape, c[-1], dtype=complex)
    for ck in c[-2::-1]:
        acc = acc * zz + ck
    if acc.ndim == 0:
        return complex(acc)
    return acc


def binomial_series(exponent: complex, order: int) -> TruncatedSeries:
    """Coefficients of ``(1 - z)**exponent`` from the term-ratio recursion."""
    c = np.zeros(order + 1, dtype=complex)
    c[0] = 1.0
    for k in range(1, order + 1):
        c[k] = c[k - 1] * (k - 1 - exponent) / k
    return TruncatedSeries(c)
