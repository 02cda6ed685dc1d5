"""Truncated power series arithmetic and the moment-level semigroup oracle.

Coefficients are complex doubles; truncation order N is the highest retained
power. Reverted series have combinatorial coefficient growth, so the default
pipeline order is capped at MAX_ORDER = 16 to keep results trustworthy to
about 1e-9.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import NotInvertible, ZeroConstantTerm
from .measure import Measure, moments

MAX_ORDER = 16
_C1_FLOOR = 1e-14


class Series:
    """Truncated power series sum_k c_k z^k, k = 0..order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        self.coeffs = c

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __repr__(self) -> str:
        return f"Series({self.coeffs!r})"

    def truncate(self, order: int) -> "Series":
        if order >= self.order:
            return Series(self.coeffs)
        return Series(self.coeffs[: order + 1])

    def __add__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series(self.coeffs[: n + 1] + other.coeffs[: n + 1])

    def __sub__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series(self.coeffs[: n + 1] - other.coeffs[: n + 1])

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return Series(self.coeffs * other)
        n = min(self.order, other.order)
        prod = np.convolve(self.coeffs[: n + 1], other.coeffs[: n + 1])
        return Series(prod[: n + 1])

    __rmul__ = __mul__

    def reciprocal(self) -> "Series":
        a = self.coeffs
        if abs(a[0]) < _C1_FLOOR:
            raise ZeroConstantTerm("cannot invert series with zero constant term")
        n = self.order
        b = np.zeros(n + 1, dtype=complex)
        b[0] = 1.0 / a[0]
        for k in range(1, n + 1):
            b[k] = -np.dot(a[1 : k + 1], b[k - 1 :: -1]) / a[0]
        return Series(b)

    def __truediv__(self, other: "Series") -> "Series":
        return self * other.reciprocal()

    def compose(self, inner: "Series") -> "Series":
        """self(inner(z)); inner must have zero constant term."""
        if abs(inner.coeffs[0]) > 1e-13:
            raise ValueError("composition requires inner constant term 0")
        n = min(self.order, inner.order)
        g = inner.truncate(n)
        result = Series([self.coeffs[n]])
        for k in range(n - 1, -1, -1):
            result = _mul_full(result, g, n)
            result = Series(
                np.concatenate(([result.coeffs[0] + self.coeffs[k]], result.coeffs[1:]))
            )
        return result

    def derivative(self) -> "Series":
        if self.order == 0:
            return Series([0.0])
        k = np.arange(1, self.order + 1)
        return Series(self.coeffs[1:] * k)

    def log(self) -> "Series":
        """Series log; the constant branch is the principal log of c_0."""
        c0 = self.coeffs[0]
        if abs(c0) < _C1_FLOOR:
            raise ZeroConstantTerm("log of series with zero constant term")
        n = self.order
        d = self.derivative()
        quot = _mul_full(d, self.reciprocal(), max(n - 1, 0))
        out = np.zeros(n + 1, dtype=complex)
        out[0] = cmath.log(c0)
        for k in range(1, n + 1):
            out[k] = quot.coeffs[k - 1] / k
        return Series(out)

    def exp(self) -> "Series":
        n = self.order
        u = self.coeffs.copy()
        c0 = u[0]
        u[0] = 0.0
        e = np.zeros(n + 1, dtype=complex)
        e[0] = 1.0
        for k in range(1, n + 1):
            acc = 0.0 + 0.0j
            for j in range(1, k + 1):
                acc += j * u[j] * e[k - j]
            e[k] = acc / k
        return Series(e * cmath.exp(c0))


def _mul_full(a: Series, b: Series, order: int) -> Series:
    prod = np.convolve(a.coeffs, b.coeffs)[: order + 1]
    if prod.size < order + 1:
        prod = np.pad(prod, (0, order + 1 - prod.size))
    return Series(prod)


def series_from_moments(moment_values) -> Series:
    """psi series: c_0 = 0, c_k = m_k."""
    m = np.asarray(moment_values, dtype=complex).reshape(-1)
    return Series(np.concatenate(([0.0], m)))


def psi_to_eta(s: Series) -> Series:
    """eta = psi / (1 + psi); 1 + psi is a unit (constant term 1)."""
    one = Series(np.concatenate(([1.0], np.zeros(s.order, dtype=complex))))
    return s / (one + s)


def eta_to_psi(s: Series) -> Series:
    one = Series(np.concatenate(([1.0], np.zeros(s.order, dtype=complex))))
    return s / (one - s)


def revert(s: Series) -> Series:
    """Compositional inverse: returns r with s(r(z)) = z + O(z^{N+1}).

    Newton iteration on series composition; requires c_0 = 0, c_1 != 0.
    """
    c = s.coeffs
    if abs(c[0]) > 1e-13:
        raise NotInvertible("reversion requires zero constant term")
    if abs(c[1]) < _C1_FLOOR:
        raise NotInvertible("reversion requires nonzero linear coefficient")
    n = s.order
    ident = np.zeros(n + 1, dtype=complex)
    if n >= 1:
        ident[1] = 1.0
    identity = Series(ident)
    r0 = np.zeros(n + 1, dtype=complex)
    if n >= 1:
        r0[1] = 1.0 / c[1]
    r = Series(r0)
    ds = s.derivative()
    # valuation of the defect doubles per step; log2(n)+2 steps suffice
    steps = max(1, int(np.ceil(np.log2(n + 1))) + 2) if n >= 1 else 1
    for _ in range(steps):
        defect = s.compose(r) - identity
        slope = ds.compose(r.truncate(max(n - 1, 0)))
        r = r - _mul_full(defect, slope.reciprocal(), n)
    return r


def sigma_series(eta_s: Series) -> Series:
    """Sigma series: compositional inverse of eta divided by z (index shift)."""
    inv = revert(eta_s)
    return Series(inv.coeffs[1:])


def power_t(s: Series, t: float) -> Series:
    """Real power exp(t log s); branch fixed by the principal log of c_0."""
    if abs(s.coeffs[0]) < _C1_FLOOR:
        raise ZeroConstantTerm("power of series with zero constant term")
    return (s.log() * t).exp()


def semigroup_moments_core(moment_values, t: float) -> np.ndarray:
    """Moment sequence of mu_t from the moment sequence of mu.

    Pipeline: moments -> psi -> eta -> Sigma -> Sigma^t -> z*Sigma_t ->
    revert -> eta_t -> psi_t -> moments. Exact pass-through at t = 1.
    """
    m = np.asarray(moment_values, dtype=complex).reshape(-1)
    if m.size > MAX_ORDER:
        raise ValueError(f"order {m.size} exceeds MAX_ORDER = {MAX_ORDER}")
    if t < 1:
        raise ValueError("t must be >= 1")
    if t == 1:
        return m.copy()
    psi_s = series_from_moments(m)
    eta_s = psi_to_eta(psi_s)
    sig = sigma_series(eta_s)
    sig_t = power_t(sig, t)
    inv_eta_t = Series(np.concatenate(([0.0], sig_t.coeffs)))
    eta_t = revert(inv_eta_t)
    psi_t = eta_to_psi(eta_t)
    return psi_t.coeffs[1:].copy()


def semigroup_moments(m: Measure, t: float, order: int = 8) -> np.ndarray:
    """First `order` moments of mu_t computed purely at series level."""
    return semigroup_moments_core(moments(m, order), t)
