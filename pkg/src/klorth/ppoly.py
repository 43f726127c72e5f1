"""
Exact rational polynomials: the p_n family generated by
A = x^2 - x d/dx x d/dx through p_n(x) = (-1)^n e^x A^n e^{-x}, Laguerre
polynomials, and the table l_{m,k} = int_0^inf e^{-x} p_m(x) L_k(x) dx / x.

Everything here is exact (``fractions.Fraction``); floats appear only when a
polynomial is evaluated at a float.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

__all__ = [
    "ExactPoly",
    "LTable",
    "p_chain",
    "p_alt_routes",
    "laguerre_exact",
    "laguerre_integral",
    "l_table",
    "gen_series_eval",
    "l_rec_laguerre_residual",
    "l_rec_shift_residual",
    "double_factorial",
]


def double_factorial(n):
    """(n)!! with (-1)!! = 0!! = 1."""
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


class ExactPoly:
    """Dense polynomial with rational coefficients, ``coeffs[j]`` multiplies x^j.

    Parameters
    ----------
    coeffs : iterable of int, Fraction or str
        Low-order first. Trailing zeros are stripped, so the zero polynomial has
        an empty coefficient tuple and degree -1.
    var : str
        Variable name used by ``repr`` only.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs=(), var="x"):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)
        self.var = var

    @classmethod
    def monomial(cls, j, scale=1, var="x"):
        return cls([0] * j + [scale], var)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self):
        return not self.coeffs

    def coeff(self, j):
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Fraction(0)

    def _lift(self, other):
        if isinstance(other, ExactPoly):
            return other
        return ExactPoly([other], self.var)

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return ExactPoly([self.coeff(j) + o.coeff(j) for j in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return ExactPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, ExactPoly):
            s = Fraction(other)
            return ExactPoly([c * s for c in self.coeffs], self.var)
        if self.is_zero() or other.is_zero():
            return ExactPoly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return ExactPoly(out, self.var)

    __rmul__ = __mul__

    def shift_up(self, j=1):
        """Multiply by x^j."""
        return ExactPoly([0] * j + list(self.coeffs), self.var)

    def shift_down(self):
        """Divide by x; the constant term must vanish."""
        if self.coeff(0) != 0:
            raise ValueError("polynomial is not divisible by the variable")
        return ExactPoly(self.coeffs[1:], self.var)

    def deriv(self):
        return ExactPoly([j * c for j, c in enumerate(self.coeffs)][1:], self.var)

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction input, float arrays otherwise."""
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x)
        for c in reversed(self.to_float()):
            acc = acc * x + c
        return acc

    def to_float(self):
        return np.array([float(c) for c in self.coeffs])

    def __eq__(self, other):
        if isinstance(other, ExactPoly):
            return self.coeffs == other.coeffs
        return self.coeffs == self._lift(other).coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "ExactPoly(0)"
        terms = [f"{c}*{self.var}^{j}" for j, c in enumerate(self.coeffs) if c]
        return "ExactPoly(" + " + ".join(terms) + ")"


@lru_cache(maxsize=None)
def _p_list(N):
    if N == 0:
        return (ExactPoly([1]),)
    prev = _p_list(N - 1)
    n = N - 1
    acc = ExactPoly()
    for k in range(n + 1):
        acc = acc + prev[k] * comb(2 * n + 1, 2 * k)
    return prev + (-(acc.shift_up()),)


def p_chain(N):
    """p_0..p_N from p_{n+1} = -x sum_{k<=n} C(2n+1, 2k) p_k.

    Returns a tuple of :class:`ExactPoly`; N is capped at 64.
    """
    if not 0 <= N <= 64:
        raise ValueError("p_chain supports 0 <= N <= 64")
    return _p_list(N)


def p_alt_routes(n):
    """p_n through the differential recurrence, and the derivative residual.

    The first item iterates p_{k+1} = x^2 p_k'' + x(1 - 2x) p_k' - x p_k from
    p_0 = 1. The second is p_n' + sum_{r<n} C(2n, 2r) p_r built from
    :func:`p_chain`; it is the zero polynomial when the family is consistent.
    """
    if not 0 <= n <= 64:
        raise ValueError("p_alt_routes supports 0 <= n <= 64")
    p = ExactPoly([1])
    a = ExactPoly([0, 1, -2])
    for _ in range(n):
        d = p.deriv()
        p = d.deriv().shift_up(2) + a * d - p.shift_up()
    chain = p_chain(n)
    resid = chain[n].deriv()
    for r in range(n):
        resid = resid + chain[r] * comb(2 * n, 2 * r)
    return p, resid


@lru_cache(maxsize=None)
def _lag_list(K):
    if K == 0:
        return (ExactPoly([1]),)
    if K == 1:
        return (ExactPoly([1]), ExactPoly([1, -1]))
    prev = _lag_list(K - 1)
    k = K - 1
    nxt = (prev[k] * (2 * k + 1) - prev[k].shift_up() - prev[k - 1] * k) * Fraction(1, k + 1)
    return prev + (nxt,)


def laguerre_exact(k):
    """Laguerre polynomial L_k with L_k(0) = 1 (k <= 64)."""
    if not 0 <= k <= 64:
        raise ValueError("laguerre_exact supports 0 <= k <= 64")
    return _lag_list(k)[k]


def laguerre_integral(poly):
    """int_0^inf e^{-x} poly(x) dx, exactly (sum of c_j j!)."""
    return sum((c * factorial(j) for j, c in enumerate(poly.coeffs)), Fraction(0))


class LTable:
    """l_{m,k} for 1 <= m <= M, 0 <= k <= K.

    Lookups outside the stored rectangle return zero for k < 0 or m < k + 1
    (where the integral vanishes); other misses raise ``KeyError``.
    """

    def __init__(self, entries, M, K):
        self.entries = dict(entries)
        self.M = M
        self.K = K

    def __getitem__(self, mk):
        m, k = mk
        if k < 0 or (m >= 1 and m < k + 1):
            return Fraction(0)
        return self.entries[(m, k)]

    def get(self, m, k, default=Fraction(0)):
        """Lookup with absent indices (including m = 0) taken as ``default``."""
        try:
            return self[m, k]
        except KeyError:
            return default


def l_table(M, K):
    """Exact l_{m,k} = int_0^inf e^{-x} p_m(x) L_k(x) dx / x.

    p_m(0) = 0 for m >= 1, so p_m / x is a polynomial and the integral is a
    finite sum of factorials.
    """
    if not (1 <= M <= 40 and K >= 0):
        raise ValueError("l_table needs 1 <= M <= 40 and K >= 0")
    ps = p_chain(M)
    ent = {}
    for m in range(1, M + 1):
        q = ps[m].shift_down()
        for k in range(K + 1):
            ent[(m, k)] = laguerre_integral(q * laguerre_exact(k))
    return LTable(ent, M, K)


def gen_series_eval(x, y, N):
    """Partial sum sum_{n<=N} p_n(x) y^{2n} / (2n)! computed in rationals.

    Compare with exp(-2 x sinh^2(y/2)).
    """
    if abs(y) > 0.5 or not 0 <= N <= 40:
        raise ValueError("gen_series_eval needs |y| <= 0.5 and N <= 40")
    xf = Fraction(x)
    y2 = Fraction(y) ** 2
    acc = Fraction(0)
    pw = Fraction(1)
    for n, p in enumerate(p_chain(N)):
        acc += p(xf) * pw / factorial(2 * n)
        pw *= y2
    return float(acc)


def l_rec_laguerre_residual(table, m, k):
    """(k+1) l_{m,k+1} - (2k+1) l_{m,k} + k l_{m,k-1} + int e^{-x} p_m L_k dx."""
    extra = laguerre_integral(p_chain(m)[m] * laguerre_exact(k))
    return ((k + 1) * table[m, k + 1] - (2 * k + 1) * table[m, k]
            + k * table[m, k - 1] + extra)


def l_rec_shift_residual(table, m, k, variant="printed"):
    """Residual of a recurrence expressing row m of l through row m - 1.

    ``printed``:   l_{m,k} = (k+1) l_{m-1,k+1} + (k^2-3k-1) l_{m-1,k}
                             + 2k(1-k) l_{m-1,k-1} + k(k-1) l_{m-1,k-2}
    ``corrected``: l_{m,k} = -(k+1)(k+2) l_{m-1,k+2} + 4(k+1)^2 l_{m-1,k+1}
                             - (5k^2+6k+2) l_{m-1,k} + k(2k+1) l_{m-1,k-1}

    The corrected form comes from moving A onto L_k (A is symmetric for
    dx/x once p_{m-1}(0) = 0) and re-expanding in Laguerre polynomials, so it
    holds for m >= 2; at m = 1 it fails only for k = 0, where the divergent
    l_{0,k} would enter. Absent indices contribute zero.
    """
    g = table.get
    if variant == "printed":
        rhs = ((k + 1) * g(m - 1, k + 1) + (k * k - 3 * k - 1) * g(m - 1, k)
               + 2 * k * (1 - k) * g(m - 1, k - 1) + k * (k - 1) * g(m - 1, k - 2))
    elif variant == "corrected":
        rhs = (-(k + 1) * (k + 2) * g(m - 1, k + 2) + 4 * (k + 1) ** 2 * g(m - 1, k + 1)
               - (5 * k * k + 6 * k + 2) * g(m - 1, k) + k * (2 * k + 1) * g(m - 1, k - 1))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return table[m, k] - rhs
