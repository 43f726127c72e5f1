"""
Generalized Wilson families.

The weight on tau >= 0 is

    w(tau) = |prod_k Gamma(a_k + i tau)|^2 / |Gamma(2 i tau)|^2,
    1 / |Gamma(2 i tau)|^2 = 2 tau sinh(2 pi tau) / pi,

with orthonormal polynomials W_n(tau^2) built from its moments. Their
Kontorovich-Lebedev images

    F_n(x) = int_0^inf tau sinh(pi tau) w(tau) K_{i tau}(x) W_n(tau^2) d tau

(Phi = F_n / W_n for n = 0) are evaluated with composite Gauss-Legendre in
tau on panels narrower than the oscillation period of K_{i tau}(x), so the
same K table serves every parameter set and every n. For three parameters
tau sinh(pi tau) w(tau) grows polynomially and only the e^{-pi tau / 2} decay
of K cuts the integral off; that is why K needs relative accuracy there.

Integrals over x use the exp-sinh rule: F_n(x) ~ x^{min a} at the origin.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np
from scipy.special import gamma as cgamma
from scipy.special import roots_laguerre

from .orthokl import WeightSpec, basis_for, moment_vector
from .ppoly import ExactPoly, laguerre_exact
from .quadcore import (IntegralResult, QuadSpec, exp_sinh_rule, gauss_legendre_rule,
                       integrate_real_line, integrate_semi_axis)
from .specfun import log_gamma, macdonald_imag, macdonald_real

__all__ = [
    "WilsonParams",
    "LaguerreExpansion",
    "CoeffRoute",
    "wilson_weight",
    "wilson_weight_direct",
    "wilson_power_integral",
    "wilson_poly_integral",
    "wilson_moments",
    "wilson_basis",
    "wilson_m0_closed",
    "phi_eval",
    "phi_result",
    "f_eval",
    "af_eval",
    "f_table",
    "x_rule",
    "c_coeff",
    "c_coeff_result",
    "f_norm",
    "c_scale",
    "laguerre_expansion",
    "s_poly",
    "s_poly_direct",
    "stirling1",
    "hat_w",
    "kl_convolution_power",
]


@dataclass(frozen=True)
class WilsonParams:
    a: Tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) < 3:
            raise ValueError("at least three parameters are needed for the weight to decay")
        if min(a) <= 0:
            raise ValueError("parameters must be positive")
        object.__setattr__(self, "a", a)

    @property
    def spec(self):
        return WeightSpec.wilson(self.a)


def _a(params):
    return params.a if isinstance(params, WilsonParams) else WilsonParams(tuple(params)).a


@dataclass(frozen=True)
class LaguerreExpansion:
    """Coefficients c_{n,k} of F_n in Laguerre polynomials, k = 0..len-1.

    ``tail_bound`` estimates sum_{k > K} c_{n,k}^2 from a power-law fit to
    the last computed coefficients.
    """

    n: int
    coefficients: np.ndarray
    errors: np.ndarray
    tail_bound: float


class CoeffRoute(enum.Enum):
    GAUSS_LAGUERRE = "gauss_laguerre"
    POCHHAMMER = "pochhammer"


def _log_sinh(y):
    return y + np.log(-np.expm1(-2 * y)) - math.log(2)


def _log_weight(t, a):
    s = sum(2 * log_gamma(ak + 1j * t).real for ak in a)
    return s + np.log(2 * t) + _log_sinh(2 * np.pi * t) - math.log(math.pi)


def wilson_weight(tau, params):
    """w(tau), evaluated through summed log-gamma real parts; w(0) = 0."""
    a = _a(params)
    t = np.abs(np.asarray(tau, dtype=float))
    out = np.zeros_like(t)
    pos = t > 0
    if pos.any():
        out[pos] = np.exp(_log_weight(t[pos], a))
    return out if out.ndim else float(out)


def wilson_weight_direct(tau, params):
    """w(tau) from a product of complex gamma values (no logarithms)."""
    a = _a(params)
    t = np.asarray(tau, dtype=float)
    prod = np.ones_like(t, dtype=complex)
    for ak in a:
        prod = prod * cgamma(ak + 1j * t)
    return np.abs(prod) ** 2 * 2 * t * np.sinh(2 * np.pi * t) / np.pi


def _wilson_spec(rel_tol=1e-13):
    return QuadSpec(abs_tol=1e-300, rel_tol=rel_tol, max_refinements=10)


def _tau_scale(a):
    return 30.0 / (len(a) - 1)


def wilson_power_integral(a, p):
    """int_0^inf tau^p w(tau) d tau as an ``IntegralResult``."""
    a = _a(a)
    return integrate_semi_axis(lambda t: t ** p * wilson_weight(t, a), _wilson_spec(), _tau_scale(a))


def wilson_poly_integral(a, coeffs):
    """int_0^inf q(tau^2) w(tau) d tau for u-coefficients ``coeffs`` of q."""
    a = _a(a)
    c = np.asarray(coeffs, dtype=float)
    r = integrate_semi_axis(
        lambda t: np.polynomial.polynomial.polyval(t * t, c) * wilson_weight(t, a),
        _wilson_spec(), _tau_scale(a))
    return float(r.value)


def wilson_moments(params, N):
    """Moments m_j = int_0^inf tau^{2j} w(tau) d tau, j <= 2N."""
    return moment_vector(WeightSpec.wilson(_a(params)), N)


def wilson_basis(params, N):
    """Orthonormal W_0..W_N (cached)."""
    return basis_for(WeightSpec.wilson(_a(params)), N)


def wilson_m0_closed(params):
    """m_0 from the Wilson integrals (three or four parameters).

    2 pi prod_{j<k} Gamma(a_j + a_k), divided by Gamma(a_1+a_2+a_3+a_4) when
    there are four parameters.
    """
    a = _a(params)
    if len(a) not in (3, 4):
        raise ValueError("closed form available for three or four parameters")
    lg = sum(math.lgamma(a[j] + a[k]) for j in range(len(a)) for k in range(j + 1, len(a)))
    if len(a) == 4:
        lg -= math.lgamma(sum(a))
    return 2 * math.pi * math.exp(lg)


# ---------------------------------------------------------------- tau side

_TAU_ORDER = 20
_PANEL_PHASE = 2.5


def _tau_cutoff(a, power):
    """Where tau sinh(pi tau) w tau^power e^{-pi tau/2} drops 40 e-folds."""
    t = np.linspace(0.05, 400, 8000)
    env = _log_g(t, a) + power * np.log(t) - 0.5 * np.pi * t - 0.5 * np.log(t)
    T = t[np.nonzero(env > env.max() - 40)[0][-1]]
    return float(5 * math.ceil(T / 5))


def _log_g(t, a):
    return np.log(t) + _log_sinh(np.pi * t) + _log_weight(t, a)


@lru_cache(maxsize=4096)
def _tau_rule(x, T, phase=_PANEL_PHASE):
    # K_{i tau}(x) has phase rate log(2 tau / x) in tau
    rate = max(1.0, math.log(2 * T / x))
    width = min(1.0, phase / rate)
    npan = math.ceil(T / width)
    xg, wg = gauss_legendre_rule(_TAU_ORDER)
    e = np.linspace(0.0, T, npan + 1)
    h = 0.5 * np.diff(e)
    m = 0.5 * (e[1:] + e[:-1])
    t = (m[:, None] + h[:, None] * xg[None, :]).ravel()
    w = (h[:, None] * wg[None, :]).ravel()
    k = macdonald_imag(t, np.full_like(t, x))
    return t, w * k


def _integrand_vec(x, a, T, phase=_PANEL_PHASE):
    t, wk = _tau_rule(float(x), T, phase)
    return t, wk * np.exp(_log_g(t, a))


def _cutoff_for(a, basis):
    return _tau_cutoff(a, 2 * basis.N + 2)


def f_table(params, xs, basis=None, N=4, power=0, phase=_PANEL_PHASE):
    """Matrix of F_n(x_i) (``power`` = 1 gives A F_n, i.e. tau^2 inserted).

    Returns an array of shape (len(xs), basis.N + 1).
    """
    a = _a(params)
    basis = basis if basis is not None else wilson_basis(a, N)
    T = _cutoff_for(a, basis)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.empty((xs.size, basis.N + 1))
    for i, x in enumerate(xs):
        t, v = _integrand_vec(x, a, T, phase)
        u = t * t
        V = np.polynomial.polynomial.polyvander(u, basis.N) @ basis.coeffs.T
        if power:
            V = V * u[:, None] ** power
        out[i] = v @ V
    return out


def phi_result(x, params, T=None):
    """Phi(x) with an error estimate from a rule with wider panels."""
    a = _a(params)
    T = T if T is not None else _tau_cutoff(a, 2)
    _, v = _integrand_vec(x, a, T)
    _, vc = _integrand_vec(x, a, T, phase=1.6 * _PANEL_PHASE)
    val = float(v.sum())
    return IntegralResult(val, abs(val - float(vc.sum())), v.size + vc.size, True)


def phi_eval(x, params):
    """Phi(x) = int_0^inf tau sinh(pi tau) w(tau) K_{i tau}(x) d tau."""
    if np.ndim(x):
        return np.array([phi_eval(float(v), params) for v in np.ravel(x)]).reshape(np.shape(x))
    return phi_result(float(x), params).value


def f_eval(n, x, params, basis=None):
    """F_n(x); ``x`` may be an array."""
    basis = basis if basis is not None else wilson_basis(params, max(n, 1))
    if n > basis.N:
        raise ValueError("n exceeds the basis degree")
    v = f_table(params, x, basis)[:, n]
    return float(v[0]) if np.ndim(x) == 0 else v.reshape(np.shape(x))


def af_eval(n, x, params, basis=None):
    """A F_n(x) = int tau sinh(pi tau) w K_{i tau}(x) tau^2 W_n(tau^2) d tau."""
    basis = basis if basis is not None else wilson_basis(params, max(n, 1))
    v = f_table(params, x, basis, power=1)[:, n]
    return float(v[0]) if np.ndim(x) == 0 else v.reshape(np.shape(x))


# ------------------------------------------------------------------ x side

def x_rule(params, h=1.0 / 16, x_hi=60.0, tail_exponent=None):
    """Exp-sinh nodes and dx-weights adequate for F_n-type integrands.

    The lower end is placed where x^{s} < 1e-16 with ``s`` the exponent of the
    integrand at the origin (default ``min a``).
    """
    a = _a(params)
    s = min(a) if tail_exponent is None else tail_exponent
    return exp_sinh_rule(h, 10.0 ** (-16.0 / s), x_hi)


# ----------------------------------------------------- Laguerre coefficients

def stirling1(m, j):
    """Signed Stirling number of the first kind s(m, j)."""
    return _stirling_table(m)[m][j] if 0 <= j <= m else 0


@lru_cache(maxsize=None)
def _stirling_table(M):
    s = [[0] * (M + 1) for _ in range(M + 1)]
    s[0][0] = 1
    for m in range(1, M + 1):
        for j in range(1, m + 1):
            s[m][j] = s[m - 1][j - 1] - (m - 1) * s[m - 1][j]
    return s


def _pochhammer_coeffs(m, sign):
    # (sign * i tau)_m = sum_j |s(m, j)| (sign i)^j tau^j, kept as (re, im) integer pairs
    out = []
    for j in range(m + 1):
        c = abs(stirling1(m, j))
        r = [(1, 0), (0, 1), (-1, 0), (0, -1)][j % 4]
        out.append((c * r[0], c * r[1] * sign))
    return out


@lru_cache(maxsize=None)
def s_poly(k):
    """S_{k+1} / pi as an exact polynomial in u = tau^2.

    S_{k+1}(tau^2) = pi/(2k+1)! sum_{nu=0}^{k} C(k, nu) (-i tau)_{2(k-nu)+1} (i tau)_{2 nu+1};
    the pochhammer symbols are expanded with Stirling numbers of the first
    kind. The imaginary part and all odd powers of tau cancel exactly.
    """
    from fractions import Fraction

    if not 0 <= k <= 12:
        raise ValueError("s_poly supports 0 <= k <= 12")
    deg = 2 * k + 2
    re = [0] * (deg + 1)
    im = [0] * (deg + 1)
    for nu in range(k + 1):
        A = _pochhammer_coeffs(2 * (k - nu) + 1, -1)
        B = _pochhammer_coeffs(2 * nu + 1, 1)
        c = math.comb(k, nu)
        for j, (ar, ai) in enumerate(A):
            for l, (br, bi) in enumerate(B):
                re[j + l] += c * (ar * br - ai * bi)
                im[j + l] += c * (ar * bi + ai * br)
    if any(im) or any(re[1::2]):
        raise ArithmeticError("pochhammer sum is not a real polynomial in tau^2")
    f = math.factorial(2 * k + 1)
    return ExactPoly([Fraction(v, f) for v in re[0::2]], var="u")


def s_poly_direct(k):
    """Same polynomial from explicit products of linear factors (exact check)."""
    from fractions import Fraction

    # complex polynomials in tau as lists of (Fraction re, Fraction im)
    def mul(p, q):
        out = [[Fraction(0), Fraction(0)] for _ in range(len(p) + len(q) - 1)]
        for i, (pr, pi_) in enumerate(p):
            for j, (qr, qi) in enumerate(q):
                out[i + j][0] += pr * qr - pi_ * qi
                out[i + j][1] += pr * qi + pi_ * qr
        return out

    def poch(m, sign):
        p = [(Fraction(1), Fraction(0))]
        for r in range(m):
            p = mul(p, [(Fraction(r), Fraction(0)), (Fraction(0), Fraction(sign))])
        return p

    total = [[Fraction(0), Fraction(0)] for _ in range(2 * k + 3)]
    for nu in range(k + 1):
        term = mul(poch(2 * (k - nu) + 1, -1), poch(2 * nu + 1, 1))
        for j, (r, i) in enumerate(term):
            total[j][0] += math.comb(k, nu) * r
            total[j][1] += math.comb(k, nu) * i
    f = math.factorial(2 * k + 1)
    return [(r / f, i / f) for r, i in total]


def c_scale(k, params):
    """sqrt(int w S_{k+1}^2); bounds |c_{n,k}| since ||W_n|| = 1."""
    s = s_poly(k).to_float() * math.pi
    return math.sqrt(wilson_poly_integral(params, np.convolve(s, s)))


_GL_LEVELS = (32, 64, 128, 256)
_GL_CUT = 90.0


@lru_cache(maxsize=16)
def _laguerre_rule(n):
    x, w = roots_laguerre(n)
    # e^{-x} L_k F_n is below 1e-30 relative beyond the cut
    keep = x < _GL_CUT
    return x[keep], w[keep]


@lru_cache(maxsize=64)
def _gl_f(a, N, level):
    x, w = _laguerre_rule(level)
    return f_table(a, x, wilson_basis(a, N))


def _gl_sums(a, N, level, K):
    """sum_i w_i L_k(x_i) F_n(x_i) for n <= N, k <= K at one node count."""
    x, w = _laguerre_rule(level)
    L = np.array([laguerre_exact(k)(x) for k in range(K + 1)])
    return (L * w[None, :]) @ _gl_f(a, N, level)


def _richardson(v0, v1, v2):
    """Extrapolate v_j ~ c + C 2^{-p j}, with p estimated from the three values."""
    d1 = v1 - v0
    d2 = v2 - v1
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.log2(np.abs(d1) / np.abs(d2))
    p = np.clip(np.nan_to_num(p, nan=8.0, posinf=8.0, neginf=1.0), 1.0, 8.0)
    return v2 + d2 / (2.0 ** p - 1)


@lru_cache(maxsize=64)
def _gl_coeffs(a, N, K):
    """Extrapolated c_{n,k} (k <= K, n <= N) and their error estimates.

    F_n ~ x^{min a} at the origin, so Gauss-Laguerre converges only like a
    power of the node count; two Richardson extrapolations from overlapping
    triples of levels are formed and their difference is the error estimate.
    """
    seq = [_gl_sums(a, N, level, K) for level in _GL_LEVELS]
    first = _richardson(*seq[:3])
    last = _richardson(*seq[1:])
    return last, np.abs(last - first)


@lru_cache(maxsize=64)
def _xr_coeffs(a, N, K):
    """c_{n,k} by exp-sinh quadrature of the same integral, nested error."""
    x, w = x_rule(a)
    F = f_table(a, x, wilson_basis(a, N))
    L = np.array([laguerre_exact(k)(x) for k in range(K + 1)]) * (w * np.exp(-x))[None, :]
    fine = L @ F
    # the h = 1/8 rule keeps the nodes with even index t/h
    k = np.rint(np.arcsinh(np.log(x) / (0.5 * np.pi)) * 16).astype(int)
    even = k % 2 == 0
    coarse = 2 * L[:, even] @ F[even]
    return fine, np.abs(fine - coarse)


@lru_cache(maxsize=64)
def _coeff_table(a, N, K):
    """Gauss-Laguerre values where their error estimate is below 1e-6 ||F_n||,
    exp-sinh values elsewhere."""
    ext, err = _gl_coeffs(a, N, K)
    norms = np.array([f_norm(n, a, N) for n in range(N + 1)])
    bad = err > 1e-6 * norms[None, :]
    if bad.any():
        xv, xe = _xr_coeffs(a, N, K)
        ext = np.where(bad, xv, ext)
        err = np.where(bad, xe, err)
    return ext, err


def _check_nk(n, k):
    if not (0 <= n <= 8 and 0 <= k <= 40):
        raise ValueError("c_coeff supports 0 <= n <= 8 and 0 <= k <= 40")


def c_coeff_result(n, k, params, route=CoeffRoute.POCHHAMMER, N=None):
    """c_{n,k} with an error estimate, as (value, error)."""
    a = _a(params)
    route = CoeffRoute(route)
    _check_nk(n, k)
    N = max(n, 4) if N is None else N
    if route is CoeffRoute.POCHHAMMER:
        if k > 12:
            raise ValueError("the Pochhammer route supports k <= 12")
        basis = wilson_basis(a, N)
        s = s_poly(k).to_float() * math.pi
        r = integrate_semi_axis(
            lambda t: np.polynomial.polynomial.polyval(t * t, np.convolve(basis.poly(n), s))
            * wilson_weight(t, a), _wilson_spec(), _tau_scale(a))
        return float(r.value), float(r.error_estimate)
    ext, err = _coeff_table(a, N, max(k, 8))
    return float(ext[k, n]), float(err[k, n])


def c_coeff(n, k, params, route=CoeffRoute.POCHHAMMER, N=None):
    """Laguerre coefficient c_{n,k} of F_n.

    POCHHAMMER: int_0^inf w(tau) W_n(tau^2) S_{k+1}(tau^2) d tau.
    GAUSS_LAGUERRE: int_0^inf e^{-x} L_k(x) F_n(x) dx with 32, 64, 128 and
    256 nodes and Richardson extrapolation in the node count. Where the
    extrapolation error estimate exceeds 1e-6 ||F_n|| (F_n with log-type
    behaviour at the origin, e.g. equal parameters) the same integral is
    taken by exp-sinh quadrature instead.
    """
    return c_coeff_result(n, k, params, route, N)[0]


def f_norm(n, params, N=None):
    """(int_0^inf e^{-x} F_n(x)^2 dx)^{1/2}; bounds every |c_{n,k}|."""
    a = _a(params)
    basis = wilson_basis(a, max(n, 4) if N is None else N)
    x, w = x_rule(a, tail_exponent=2 * min(a))
    F = f_table(a, x, basis)[:, n]
    return math.sqrt(float(np.sum(w * np.exp(-x) * F * F)))


def laguerre_expansion(n, params, K=30, N=None):
    """c_{n,0..K} by the Gauss-Laguerre route with a power-law tail bound."""
    a = _a(params)
    N = N if N is not None else max(n, 4)
    ext, err = _coeff_table(a, N, max(K, 8))
    c = ext[:K + 1, n]
    e = err[:K + 1, n]
    ks = np.arange(K + 1)
    tail_k = ks[-8:]
    tail_c = np.abs(c[-8:])
    good = tail_c > 0
    tail = 0.0
    if good.sum() >= 3:
        slope, icpt = np.polyfit(np.log(tail_k[good]), np.log(tail_c[good]), 1)
        p = -slope
        if p > 0.5:
            # sum_{k>K} C^2 k^{-2p} <= C^2 K^{1-2p} / (2p-1)
            tail = math.exp(2 * icpt) * K ** (1 - 2 * p) / (2 * p - 1)
        else:
            tail = math.inf
    return LaguerreExpansion(n, c, e, tail)


# ------------------------------------ hat W and the convolution power

def hat_w(n, a_j, basis):
    """v-coefficients of hat W_n with W_n(A/4) x^{2 a_j} = x^{2 a_j} hat W_n(x^2).

    (A/4) acts on x^{2 a_j} v^m (v = x^2) as v^{m+1}/4 - (a_j + m)^2 v^m.
    """
    coeffs = basis.poly(n)
    out = np.zeros(n + 1)
    cur = np.zeros(n + 1)
    cur[0] = 1.0
    for m, f in enumerate(coeffs):
        out += f * cur
        if m < n:
            nxt = np.zeros(n + 1)
            for j in range(m + 1):
                nxt[j + 1] += cur[j] / 4
                nxt[j] -= (a_j + j) ** 2 * cur[j]
            cur = nxt
    return out


def kl_convolution_power(a, b, x):
    """(f * g)(x) for f = u^{2a-1}, g = y^{2b-1} by nested quadrature.

    (f * g)(x) = 1/(2x) int int exp(-(x (u^2 + y^2)/(u y) + y u / x) / 2) f(u) g(y) du dy,
    computed in logarithmic variables u = e^s, y = e^r; both are centred at
    the peak of exp((a+b) rho - e^rho / (2x)) with rho = s + r.
    """
    if not (0 < a <= 3 and 0 < b <= 3):
        raise ValueError("a, b must lie in (0, 3]")
    spec = QuadSpec(abs_tol=1e-300, rel_tol=1e-11)
    c = 0.5 * math.log(2 * x * (a + b))

    def inner(s):
        def g(r):
            r = r + c
            return np.exp(-x * np.cosh(s - r) - 0.5 * np.exp(s + r) / x + 2 * a * s + 2 * b * r)
        return float(integrate_real_line(g, spec, scale=4.0).value)

    def outer(sv):
        return np.array([inner(s + c) for s in np.atleast_1d(sv)])

    r = integrate_real_line(outer, spec, scale=4.0)
    return float(r.value) / (2 * x)
