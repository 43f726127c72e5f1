"""Wilson-type weight: orthogonality, the functions F_n and their Laguerre
coefficients c_{n,k}, recurrences and Parseval-type equalities."""

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..ppoly import double_factorial, l_table, p_chain
from ..quadcore import QuadSpec, integrate_semi_axis
from ..specfun import log_gamma, macdonald_imag
from ..wilsongen import (CoeffRoute, c_coeff, f_norm, f_table, hat_w, phi_eval, s_poly,
                         wilson_basis, wilson_poly_integral, wilson_weight, x_rule)
from .core import Category, register

PARAMS = ((1.0, 1.0, 1.0), (0.6, 0.8, 1.0), (1.0, 1.0, 1.0, 1.0))
N = 5
XS = (0.5, 1.0, 2.0)
GL = CoeffRoute.GAUSS_LAGUERRE
POCH = CoeffRoute.POCHHAMMER
_TIGHT = QuadSpec(abs_tol=1e-300, rel_tol=1e-12)


@lru_cache(maxsize=8)
def _basis(a):
    return wilson_basis(a, N)


def _c(n, k, a, route=POCH):
    if k < 0 or n < 0:
        return 0.0
    return c_coeff(n, k, a, route, N=4 if route is GL else None)


def _fn(n, a):
    return f_norm(n, a, 4)


@register("wilson-orth",
          "int_0^inf W_n(tau^2) W_m(tau^2) w(tau) d tau = delta_nm for the Wilson-type weight,"
          " by adaptive quadrature in tau",
          {"a": PARAMS, "nm": tuple((n, m) for n in range(N + 1) for m in range(n + 1))}, tol_abs=1e-6)
def _wilson_orth(p):
    n, m = p["nm"]
    b = _basis(p["a"])
    return wilson_poly_integral(p["a"], np.convolve(b.poly(n), b.poly(m))), float(n == m)


@register("hatw-poly",
          "int_0^inf x^{2a_j-1} hatW_n(x^2) K_{2i tau}(x) dx = 4^{a_j-1} |Gamma(a_j+i tau)|^2 W_n(tau^2)",
          {"a": PARAMS, "j": (0, 2), "n": (0, 1, 2, 3), "tau": (0.5, 1.0)}, tol_rel=1e-5)
def _hatw(p):
    a, n, tau = p["a"], p["n"], p["tau"]
    aj = a[p["j"]]
    hw = hat_w(n, aj, _basis(a))

    def g(x):
        return x ** (2 * aj - 1) * npoly.polyval(x * x, hw) * macdonald_imag(np.full_like(x, 2 * tau), x)

    lhs = integrate_semi_axis(g, _TIGHT, 4.0)
    scale = integrate_semi_axis(lambda x: np.abs(g(x)), _TIGHT, 4.0).value
    gam = math.exp(2 * log_gamma(aj + 1j * tau).real)
    return lhs.value, 4 ** (aj - 1) * gam * _basis(a)(n, tau * tau), scale


@lru_cache(maxsize=8)
def _x_side(a, tail):
    x, w = x_rule(a, tail_exponent=tail)
    return x, w, f_table(a, x, _basis(a))


@register("laguerre-F-orth",
          "int_0^inf e^{-x} p_m(x) F_n(x) dx / x = 0 for 1 <= m <= n-1;"
          " scale ||F_n|| ||p_m / x|| in L^2(e^{-x} dx)",
          {"a": PARAMS, "nm": tuple((n, m) for n in range(2, N + 1) for m in range(1, n))}, tol_rel=1e-5)
def _lag_f_orth(p):
    a = p["a"]
    n, m = p["nm"]
    x, w, F = _x_side(a, min(a))
    q = p_chain(m)[m].shift_down().to_float()
    pm = npoly.polyval(x, q)
    ew = w * np.exp(-x)
    lhs = float(np.sum(ew * pm * F[:, n]))
    scale = math.sqrt(float(np.sum(ew * F[:, n] ** 2)) * float(np.sum(ew * pm * pm)))
    return lhs, 0.0, scale


@register("c-vanish",
          "c_{n,k} = int_0^inf e^{-x} L_k(x) F_n(x) dx = 0 for k <= n-2 (Gauss-Laguerre route); scale ||F_n||",
          {"a": PARAMS, "nk": tuple((n, k) for n in range(2, 5) for k in range(n - 1))}, tol_rel=1e-6)
def _c_vanish(p):
    n, k = p["nk"]
    return _c(n, k, p["a"], GL), 0.0, _fn(n, p["a"])


@register("c-first",
          "c_{n,n-1} = (-1)^{n-1} pi / (f_n (2n-1)!! (n-1)!) with f_n the leading coefficient of W_n"
          " (Gauss-Laguerre route)",
          {"a": PARAMS, "n": (1, 2, 3, 4)}, tol_rel=1e-5)
def _c_first(p):
    n, a = p["n"], p["a"]
    f = _basis(a).leading
    rhs = (-1) ** (n - 1) * math.pi / (f[n] * double_factorial(2 * n - 1) * math.factorial(n - 1))
    return _c(n, n - 1, a, GL), rhs


@lru_cache(maxsize=1)
def _ltab():
    return l_table(13, 12)


@register("c-next",
          "((-1)^n / pi) c_{n,n} (2n+1)!! n! f_n + l_{n+1,n-1} / ((2n-1)!! (n-1)!) = -hat f_{n+1} / f_{n+1}"
          " with hat f the subleading coefficient (Gauss-Laguerre route)",
          {"a": PARAMS, "n": (1, 2, 3)}, tol_rel=1e-4)
def _c_next(p):
    n, a = p["n"], p["a"]
    b = _basis(a)
    f, fh = b.leading, b.subleading
    lhs = ((-1) ** n / math.pi * _c(n, n, a, GL) * double_factorial(2 * n + 1) * math.factorial(n) * f[n]
           + float(_ltab()[n + 1, n - 1]) / (double_factorial(2 * n - 1) * math.factorial(n - 1)))
    return lhs, -fh[n + 1] / f[n + 1]


def _h_ratio(p):
    n, a = p["n"], p["a"]
    b = _basis(a)
    f = b.leading
    if p["form"] == "inner":
        u_wn = np.concatenate([[0.0], b.poly(n)])
        return wilson_poly_integral(a, np.convolve(u_wn, b.poly(n + 1))), f[n] / f[n + 1]
    # c_{n+1,n} = (-1)^n 2^n c_{1,0} f_1 / (f_{n+1} (2n+1)!)
    rhs = (-1) ** n * 2 ** n * _c(1, 0, a) * f[1] / (f[n + 1] * math.factorial(2 * n + 1))
    return _c(n + 1, n, a), rhs


register("H-ratio",
         "H_{n+1} = <u W_n, W_{n+1}> = f_n / f_{n+1}, and the resulting product form"
         " c_{n+1,n} = (-1)^n 2^n c_{1,0} f_1 / (f_{n+1} (2n+1)!)",
         {"a": PARAMS, "n": (0, 1, 2, 3), "form": ("inner", "product")}, tol_rel=1e-6)(_h_ratio)


@register("c-identity",
          "H_{n+1} c_{n+1,k} + E_n c_{n,k} + H_n c_{n-1,k} = -(k+1)(2k+3) c_{n,k+1} + (5k^2+6k+2) c_{n,k}"
          " - 4k^2 c_{n,k-1} + k(k-1) c_{n,k-2}; scale ||F_n||",
          {"a": PARAMS, "n": (0, 1, 2, 3), "k": (0, 1, 2, 3, 4)}, tol_rel=1e-4)
def _c_identity(p):
    n, k, a = p["n"], p["k"], p["a"]
    b = _basis(a)
    H, E = b.rec_A, b.rec_B
    lhs = H[n + 1] * _c(n + 1, k, a) + E[n] * _c(n, k, a) + (H[n] * _c(n - 1, k, a) if n else 0.0)
    rhs = (-(k + 1) * (2 * k + 3) * _c(n, k + 1, a) + (5 * k * k + 6 * k + 2) * _c(n, k, a)
           - 4 * k * k * _c(n, k - 1, a) + k * (k - 1) * _c(n, k - 2, a))
    return lhs, rhs, _fn(n, a)


def _a_f(a, x, route):
    """Columns A F_n(x), n <= N; A = x^2 - (x d/dx)^2."""
    b = _basis(a)
    if route == "tau2":
        return f_table(a, [x], b, power=1)[0]
    h = 1e-3
    xs = x * np.exp(h * np.arange(-2, 3))
    F = f_table(a, xs, b)
    d2 = (-F[0] + 16 * F[1] - 30 * F[2] + 16 * F[3] - F[4]) / (12 * h * h)
    return x * x * F[2] - d2


@register("F-recurrence",
          "A F_n = H_{n+1} F_{n+1} + E_n F_n + H_n F_{n-1} with A = x^2 - (x d/dx)^2;"
          " A F_n by tau^2 insertion or by five-point differences in log x (h = 1e-3); scale sum of |terms|",
          {"a": PARAMS, "x": XS, "n": (0, 1, 2, 3), "route": ("tau2", "fd")}, tol_rel=1e-4)
def _f_rec(p):
    a, x, n = p["a"], p["x"], p["n"]
    b = _basis(a)
    H, E = b.rec_A, b.rec_B
    F = f_table(a, [x], b)[0]
    terms = [H[n + 1] * F[n + 1], E[n] * F[n], H[n] * F[n - 1] if n else 0.0]
    lhs = _a_f(a, x, p["route"])[n]
    return lhs, sum(terms), sum(abs(t) for t in terms) + abs(lhs)


@lru_cache(maxsize=8)
def _phi_nodes(a):
    x, w = x_rule(a)
    return x, w, np.asarray(phi_eval(x, a))


@register("phi-inversion",
          "int_0^inf K_{i tau}(x) Phi(x) dx / x = (pi^2 / 2) w(tau),"
          " Phi(x) = int_0^inf t sinh(pi t) w(t) K_{it}(x) dt",
          {"a": PARAMS, "tau": (0.5, 1.0, 2.0)}, tol_rel=1e-5)
def _phi_inv(p):
    a, tau = p["a"], p["tau"]
    x, w, phi = _phi_nodes(a)
    lhs = float(np.sum(w * macdonald_imag(np.full_like(x, tau), x) * phi / x))
    return lhs, 0.5 * math.pi ** 2 * float(wilson_weight(tau, a))


@register("parseval-F",
          "int_0^inf F_n(x)^2 dx / x = (pi^2 / 2) int_0^inf t sinh(pi t) w(t)^2 W_n(t^2)^2 dt;"
          " the x-integral runs to the origin and the part below x = 1e-3 is reported",
          {"a": PARAMS, "n": (0, 1, 2)}, tol_rel=1e-4, category=Category.EXTENDED)
def _parseval_f(p):
    a, n = p["a"], p["n"]
    x, w, F = _x_side(a, 2 * min(a))
    piece = w * F[:, n] ** 2 / x
    lhs = float(np.sum(piece))
    below = float(np.sum(piece[x < 1e-3]))
    b = _basis(a)

    def g(t):
        return t * np.sinh(np.pi * t) * wilson_weight(t, a) ** 2 * b(n, t * t) ** 2

    rhs = 0.5 * math.pi ** 2 * integrate_semi_axis(g, _TIGHT, 4.0).value
    return lhs, rhs, None, f"contribution of x < 1e-3: {below:.3e} ({below / lhs:.1e} relative)"


@lru_cache(maxsize=8)
def _p_moments(a, R):
    # int_0^inf e^{-x} p_r(x) Phi(x) dx / x, r <= R
    x, w, phi = _phi_nodes(a)
    ps = p_chain(R)
    return np.array([float(np.sum(w * np.exp(-x) * npoly.polyval(x, ps[r].to_float()) * phi / x))
                     for r in range(R + 1)])


@register("composition-orth",
          "sum_r [W_m W_n]_r (-1)^r int_0^inf e^{-x} p_r(x) Phi(x) dx / x = pi delta_mn,"
          " [.]_r the coefficient of u^r",
          {"a": PARAMS, "mn": tuple((m, n) for m in range(3) for n in range(m + 1))},
          tol_abs=1e-4, tol_rel=1e-4, category=Category.EXTENDED)
def _composition(p):
    a = p["a"]
    m, n = p["mn"]
    b = _basis(a)
    conv = np.convolve(b.poly(m), b.poly(n))
    mom = _p_moments(a, len(conv) - 1)
    signs = (-1.0) ** np.arange(len(conv))
    return float(np.sum(conv * signs * mom)), math.pi * float(m == n)


@register("s-parseval",
          "sum_{j<=k+1} c_{j,k}^2 = int_0^inf w(tau) (pi S_{k+1}(tau^2))^2 d tau",
          {"a": PARAMS, "k": (0, 1, 2, 3)}, tol_rel=1e-4)
def _s_parseval(p):
    a, k = p["a"], p["k"]
    lhs = sum(_c(j, k, a) ** 2 for j in range(k + 2))
    s = s_poly(k).to_float() * math.pi
    return lhs, wilson_poly_integral(a, np.convolve(s, s))


@register("c-dual-route",
          "c_{n,k} by Gauss-Laguerre quadrature of e^{-x} L_k F_n equals int w W_n pi S_{k+1} d tau;"
          " scale ||F_n||",
          {"a": PARAMS, "nk": tuple((n, k) for n in range(4) for k in range(max(n - 1, 0), 7))},
          tol_abs=1e-8, tol_rel=1e-5)
def _c_dual(p):
    n, k = p["nk"]
    a = p["a"]
    return _c(n, k, a, GL), _c(n, k, a, POCH), _fn(n, a)
