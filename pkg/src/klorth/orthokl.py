"""
Orthonormal polynomials in u = tau^2 for index weights on tau in [0, inf).

Weights: K_{i tau}(x)^2, (Im K_{1+i tau}(x))^2 = tau^2 K_{i tau}(x)^2 / x^2,
(Re K_{1+i tau}(x))^2, and the gamma-product weight of a Wilson family. All
inner products are half-line integrals.

Bases come from a diagonally scaled Cholesky factorization of the Hankel
matrix: with M = C C^T, the rows of L = C^{-1} hold the coefficients of the
orthonormal polynomials, so that L M L^T = I.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from .moments import MomentRoute, _direct_cutoff, mu_result
from .quadcore import QuadSpec, integrate_interval
from .specfun import macdonald_imag, macdonald_imag_dx

__all__ = [
    "WeightKind",
    "WeightSpec",
    "MomentVector",
    "HankelMatrix",
    "OrthoBasis",
    "ConditioningError",
    "weight_eval",
    "moment_vector",
    "hankel",
    "ortho_basis",
    "basis_for",
    "hankel_det_row",
    "inner_product",
    "three_term_residual",
    "connection_pq",
    "connection_residual",
    "kernel_closed",
]


class WeightKind(enum.Enum):
    KL_SQUARE = "kl"
    IM_K_SQUARE = "imk"
    RE_K_SQUARE = "rek"
    WILSON = "wilson"


@dataclass(frozen=True)
class WeightSpec:
    kind: WeightKind
    x: Optional[float] = None
    a: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        kind = WeightKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is WeightKind.WILSON:
            if self.a is None or len(self.a) < 3:
                raise ValueError("a Wilson weight needs at least three parameters")
            a = tuple(float(v) for v in self.a)
            if min(a) <= 0:
                raise ValueError("Wilson parameters must be positive")
            object.__setattr__(self, "a", a)
        else:
            if self.x is None or not self.x > 0:
                raise ValueError(f"{kind.name} needs x > 0")
            object.__setattr__(self, "x", float(self.x))

    @classmethod
    def kl(cls, x):
        return cls(WeightKind.KL_SQUARE, x=x)

    @classmethod
    def imk(cls, x):
        return cls(WeightKind.IM_K_SQUARE, x=x)

    @classmethod
    def rek(cls, x):
        return cls(WeightKind.RE_K_SQUARE, x=x)

    @classmethod
    def wilson(cls, a):
        return cls(WeightKind.WILSON, a=tuple(a))


@dataclass(frozen=True)
class MomentVector:
    spec: WeightSpec
    values: np.ndarray
    error_estimates: np.ndarray

    @property
    def N(self):
        return (len(self.values) - 1) // 2


@dataclass(frozen=True)
class HankelMatrix:
    order: int
    moments: np.ndarray

    @property
    def matrix(self):
        i = np.arange(self.order + 1)
        return self.moments[i[:, None] + i[None, :]]


class ConditioningError(ArithmeticError):
    """Hankel matrix not numerically positive definite; ``minor`` is the
    size of the first leading principal minor that fails."""

    def __init__(self, minor, detail=""):
        super().__init__(f"Hankel matrix not positive definite at leading minor {minor}"
                         + (f" ({detail})" if detail else ""))
        self.minor = minor


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormal polynomials P_0..P_N in u.

    ``coeffs[n, j]`` multiplies u^j in P_n. ``rec_A[n]`` (n >= 1) and
    ``rec_B[n]`` (n < N) are the coefficients of
    u P_n = A_{n+1} P_{n+1} + B_n P_n + A_n P_{n-1}.
    """

    spec: WeightSpec
    N: int
    coeffs: np.ndarray
    leading: np.ndarray
    subleading: np.ndarray
    rec_A: np.ndarray
    rec_B: np.ndarray
    moments: MomentVector

    def poly(self, n):
        return self.coeffs[n, : n + 1]

    def __call__(self, n, u):
        return np.polynomial.polynomial.polyval(u, self.poly(n))


def _wilson():
    from . import wilsongen
    return wilsongen


def weight_eval(spec, tau):
    """Weight at tau >= 0 (array input allowed)."""
    t = np.abs(np.asarray(tau, dtype=float))
    kind = spec.kind
    if kind is WeightKind.WILSON:
        return _wilson().wilson_weight(t, spec.a)
    x = spec.x
    if kind is WeightKind.KL_SQUARE:
        return macdonald_imag(t, x) ** 2
    if kind is WeightKind.IM_K_SQUARE:
        return (t * macdonald_imag(t, x) / x) ** 2
    return macdonald_imag_dx(t, x) ** 2


class _CachedWeight:
    # node sets are reused by every power, so evaluate each set once
    def __init__(self, spec):
        self.spec = spec
        self.cache = {}

    def __call__(self, t):
        key = t.tobytes()
        v = self.cache.get(key)
        if v is None:
            v = weight_eval(self.spec, t)
            self.cache[key] = v
        return v


def _index_spec(spec, power):
    """Cutoff and panel rule for int tau^power w(tau) d tau."""
    x = spec.x
    extra = 2 if spec.kind is not WeightKind.KL_SQUARE else 0
    T = _direct_cutoff((power + extra) // 2 + 1, x, 1e-3)
    omega = max(1.0, 2 * math.log(2 * T / x))
    return T, QuadSpec(abs_tol=1e-300, rel_tol=1e-12, oscillation_hint=omega, max_refinements=4)


def _wilson_scale(a):
    return 30.0 / (len(a) - 1)


def _power_integrals(spec, powers, weight=None):
    """int_0^inf tau^p w(tau) d tau for each p, sharing weight evaluations."""
    if spec.kind is WeightKind.WILSON:
        return [_wilson().wilson_power_integral(spec.a, p) for p in powers]
    weight = weight or _CachedWeight(spec)
    T, qs = _index_spec(spec, max(powers))
    out = []
    for p in powers:
        r = integrate_interval(lambda t, p=p: t ** p * weight(t), 0.0, T, qs)
        out.append(r)
    return out


@lru_cache(maxsize=256)
def moment_vector(spec, N):
    """Moments m_0..m_{2N} of the weight in u, with error estimates.

    KL_SQUARE uses mu_j(x); IM_K_SQUARE uses mu_{j+1}(x) / x^2; the other
    kinds integrate directly.
    """
    if not 0 <= N <= 8:
        raise ValueError("moment vectors are supported for N <= 8")
    js = range(2 * N + 1)
    if spec.kind is WeightKind.KL_SQUARE:
        rs = [mu_result(j, spec.x, MomentRoute.COSH) for j in js]
        vals = [r.value for r in rs]
        errs = [r.error_estimate for r in rs]
    elif spec.kind is WeightKind.IM_K_SQUARE:
        x2 = spec.x ** 2
        rs = [mu_result(j + 1, spec.x, MomentRoute.COSH) for j in js]
        vals = [r.value / x2 for r in rs]
        errs = [r.error_estimate / x2 for r in rs]
    else:
        rs = _power_integrals(spec, [2 * j for j in js])
        if not all(r.converged for r in rs):
            raise ArithmeticError("moment quadrature did not converge")
        vals = [float(np.real(r.value)) for r in rs]
        errs = [r.error_estimate for r in rs]
    return MomentVector(spec, np.array(vals), np.array(errs))


def hankel(mv, order=None):
    return HankelMatrix(mv.N if order is None else order, mv.values)


def _leading_minor_failure(M):
    for k in range(1, M.shape[0] + 1):
        try:
            np.linalg.cholesky(M[:k, :k])
        except np.linalg.LinAlgError:
            return k
    return None


def ortho_basis(mv, N=None):
    """Orthonormal basis up to degree N (default: all the moments allow)."""
    N = mv.N if N is None else N
    M = hankel(mv, N).matrix
    d = 1.0 / np.sqrt(np.diag(M))
    Ms = d[:, None] * M * d[None, :]
    try:
        C = np.linalg.cholesky(Ms)
    except np.linalg.LinAlgError:
        raise ConditioningError(_leading_minor_failure(Ms) or N + 1) from None
    L = np.linalg.solve(C, np.eye(N + 1)) * d[None, :]
    L = np.tril(L)
    lead = np.diag(L).copy()
    sub = np.array([L[n, n - 1] if n else 0.0 for n in range(N + 1)])
    A = np.array([lead[n - 1] / lead[n] if n else 0.0 for n in range(N + 1)])
    ratio = sub / lead
    B = np.array([ratio[n] - ratio[n + 1] for n in range(N)])
    return OrthoBasis(mv.spec, N, L, lead, sub, A, B, mv)


@lru_cache(maxsize=256)
def basis_for(spec, N):
    """Cached ``ortho_basis(moment_vector(spec, N))``."""
    return ortho_basis(moment_vector(spec, N))


def hankel_det_row(mv, n):
    """Coefficients of P_n from the determinant formula.

    P_n(u) = (D_{n-1} D_n)^{-1/2} det[[m_{i+j}]_{i<n, j<=n}; [1, u, ..., u^n]]
    with D_n the Hankel determinant of order n + 1.
    """
    Mfull = hankel(mv, n).matrix
    Dn = np.linalg.det(Mfull)
    Dm = np.linalg.det(Mfull[:n, :n]) if n else 1.0
    top = Mfull[:n, :]
    out = np.empty(n + 1)
    for j in range(n + 1):
        minor = np.delete(top, j, axis=1)
        cof = np.linalg.det(minor) if n else 1.0
        out[j] = (-1) ** (n + j) * cof
    return out / math.sqrt(Dm * Dn)


def inner_product(p, q, spec, route="moment", mv=None):
    """int_0^inf p(tau^2) q(tau^2) w(tau) d tau for u-coefficient arrays p, q.

    ``route='moment'`` contracts with the Hankel matrix of ``mv`` (computed if
    omitted); ``route='direct'`` integrates over tau.
    """
    p = np.atleast_1d(np.asarray(p, dtype=float))
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if route == "moment":
        need = (len(p) + len(q) - 1) // 2
        mv = mv if mv is not None else moment_vector(spec, max(need, 0))
        if len(p) + len(q) - 2 > 2 * mv.N:
            raise ValueError("not enough moments for this degree")
        pq = np.convolve(p, q)
        return float(pq @ mv.values[: len(pq)])
    if route != "direct":
        raise ValueError(f"unknown route {route!r}")
    pq = np.convolve(p, q)
    if spec.kind is WeightKind.WILSON:
        return _wilson().wilson_poly_integral(spec.a, pq)
    T, qs = _index_spec(spec, 2 * (len(pq) - 1))
    r = integrate_interval(
        lambda t: np.polynomial.polynomial.polyval(t * t, pq) * weight_eval(spec, t), 0.0, T, qs)
    return float(np.real(r.value))


def three_term_residual(basis, n):
    """Max coefficient of u P_n - (A_{n+1} P_{n+1} + B_n P_n + A_n P_{n-1})."""
    if not 0 <= n < basis.N:
        raise ValueError("need n < N")
    L = basis.coeffs
    lhs = np.concatenate([[0.0], L[n, : basis.N]])
    rhs = basis.rec_A[n + 1] * L[n + 1] + basis.rec_B[n] * L[n]
    if n:
        rhs = rhs + basis.rec_A[n] * L[n - 1]
    scale = np.max(np.abs(L[n + 1])) * basis.rec_A[n + 1]
    return float(np.max(np.abs(lhs - rhs)) / scale)


def _pq_bases(x, n):
    N = max(n + 1, 2)
    return basis_for(WeightSpec.kl(x), N), basis_for(WeightSpec.imk(x), N)


def _projections(x, n):
    bp, bq = _pq_bases(x, n)
    H = hankel(bq.moments, bq.N).matrix
    return bq.coeffs @ H @ bp.coeffs[n], bp, bq


def connection_pq(x, n):
    """(alpha_n, beta_n) with P_n = alpha_n Q_n + beta_n Q_{n-1}.

    P_n is orthonormal for K_{i tau}(x)^2, Q_n for (Im K_{1+i tau}(x))^2;
    the coefficients are Im-weighted inner products of P_n with Q_n, Q_{n-1}.
    """
    h, _, _ = _projections(x, n)
    return float(h[n]), float(h[n - 1]) if n else 0.0


def connection_residual(x, n):
    """(coefficient residual of the two-term expansion, max |<P_n, Q_k>| for k <= n-2)."""
    h, bp, bq = _projections(x, n)
    expand = h[n] * bq.coeffs[n] + (h[n - 1] * bq.coeffs[n - 1] if n else 0.0)
    resid = np.max(np.abs(bp.coeffs[n] - expand)) / np.max(np.abs(bp.coeffs[n]))
    proj = float(np.max(np.abs(h[: max(n - 1, 0)]))) if n >= 2 else 0.0
    return float(resid), proj


def kernel_closed(tau, y):
    """pi^2 / (4 [cosh(pi y) + cosh(pi tau)])."""
    return math.pi ** 2 / (4 * (math.cosh(math.pi * y) + math.cosh(math.pi * tau)))
