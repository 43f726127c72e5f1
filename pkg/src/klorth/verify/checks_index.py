"""Index-integral, moment and Wilson-integral identities."""

import math
from functools import lru_cache

import numpy as np

from ..moments import MomentRoute, DerivativeRoute, mu, mu2_closed, mu_closed, mu_derivative, \
    moment_recurrence_residual
from ..ppoly import gen_series_eval, l_rec_laguerre_residual, l_rec_shift_residual, l_table, \
    p_chain
from ..quadcore import QuadSpec, integrate_semi_axis
from ..specfun import log_gamma, macdonald, macdonald_imag, macdonald_real, macdonald_shifted
from ..wilsongen import kl_convolution_power, wilson_m0_closed, wilson_power_integral
from .core import Category, register
from .rules import d1, d2, panel_rule

X = (0.5, 1.0, 2.0)
TAU = (0.0, 0.5, 1.0, 2.0)
TAU_POS = (0.5, 1.0, 2.0)
Y = (0.0, 0.5, 1.0, 2.0)
H_FD = 1e-3

_TIGHT = QuadSpec(abs_tol=1e-300, rel_tol=1e-12)


def _cos_rule(x, decay):
    # integrand ~ e^{-decay tau}; phase rate y + log(2 tau / x) with y <= 2
    T = 40.0 / decay + 10.0
    omega = 2.0 + max(1.0, math.log(2 * T / x))
    return T, min(1.0, math.pi / omega)


@lru_cache(maxsize=32)
def _k_on(x, T, width, alpha=0.0):
    t, _ = panel_rule(T, width)
    if alpha == 0.0:
        return macdonald_imag(t, np.full_like(t, x)) + 0j
    return macdonald(alpha, t, x)


def _index_cos(x, y, decay, alpha=0.0, square=False, sine=False):
    T, width = _cos_rule(x, decay)
    t, w = panel_rule(T, width)
    k = _k_on(x, T, width, alpha)
    if square:
        f = k.real ** 2
    elif sine:
        f = k.imag
    else:
        f = k.real
    trig = np.sin(t * y) if sine else np.cos(t * y)
    return float(np.sum(w * trig * f))


@register("fc-kernel", "int_0^inf cos(tau y) K_{i tau}(x) d tau = (pi/2) exp(-x cosh y)",
          {"x": X, "y": Y}, tol_abs=1e-14, tol_rel=1e-9)
def _fc_kernel(p):
    lhs = _index_cos(p["x"], p["y"], 0.5 * math.pi)
    return lhs, 0.5 * math.pi * math.exp(-p["x"] * math.cosh(p["y"]))


@register("gamma-cosine",
          "int_0^inf cos(tau y) Gamma((s+i tau)/2) Gamma((s-i tau)/2) d tau = pi 2^{1-s} Gamma(s) / cosh^s y",
          {"s": (1.0, 1.5, 2.0), "y": Y}, tol_abs=1e-14, tol_rel=1e-9)
def _gamma_cosine(p):
    s, y = p["s"], p["y"]
    t, w = panel_rule(70.0, min(1.0, math.pi / (y + 1.0)))
    g = np.exp(2 * log_gamma(0.5 * (s + 1j * t)).real)
    lhs = float(np.sum(w * np.cos(t * y) * g))
    return lhs, math.pi * 2 ** (1 - s) * math.gamma(s) / math.cosh(y) ** s


@register("square-cosine",
          "int_0^inf cos(tau y) K_{i tau}(x)^2 d tau = (pi/2) K_0(2x cosh(y/2))",
          {"x": X, "y": Y}, tol_abs=1e-14, tol_rel=1e-9)
def _square_cosine(p):
    lhs = _index_cos(p["x"], p["y"], math.pi, square=True)
    return lhs, 0.5 * math.pi * macdonald_real(0.0, 2 * p["x"] * math.cosh(0.5 * p["y"]))


@register("ls-cos",
          "int_0^inf cos(tau y) Re K_{alpha+i tau}(x) d tau = (pi/2) exp(-x cosh y) cosh(alpha y)",
          {"alpha": (0.5, 1.5), "x": X, "y": Y}, tol_abs=1e-13, tol_rel=1e-9)
def _ls_cos(p):
    lhs = _index_cos(p["x"], p["y"], 0.5 * math.pi, alpha=p["alpha"])
    rhs = 0.5 * math.pi * math.exp(-p["x"] * math.cosh(p["y"])) * math.cosh(p["alpha"] * p["y"])
    return lhs, rhs


@register("ls-sin",
          "int_0^inf sin(tau y) Im K_{alpha+i tau}(x) d tau = (pi/2) exp(-x cosh y) sinh(alpha y)",
          {"alpha": (0.5, 1.5), "x": X, "y": Y}, tol_abs=1e-13, tol_rel=1e-9)
def _ls_sin(p):
    lhs = _index_cos(p["x"], p["y"], 0.5 * math.pi, alpha=p["alpha"], sine=True)
    rhs = 0.5 * math.pi * math.exp(-p["x"] * math.cosh(p["y"])) * math.sinh(p["alpha"] * p["y"])
    return lhs, rhs


@register("eigen-A",
          "A K_{i tau}(x) = tau^2 K_{i tau}(x) with A f = x^2 f - x (x f')'; five-point differences, h = 1e-3",
          {"tau": TAU, "x": X}, tol_abs=1e-8, tol_rel=1e-5)
def _eigen_a(p):
    tau, x = p["tau"], p["x"]

    def f(z):
        return macdonald_imag(tau, z)

    lhs = x * x * f(x) - x * d1(f, x, H_FD) - x * x * d2(f, x, H_FD)
    return lhs, tau * tau * f(x)


def _b_operator(tau, x):
    def f(z):
        return macdonald_imag(tau, z) ** 2

    tail = integrate_semi_axis(
        lambda s: (x + s) * macdonald_imag(np.full_like(s, tau), x + s) ** 2, _TIGHT, 2.0).value
    return 4 * x * x * f(x) - x * d1(f, x, H_FD) - x * x * d2(f, x, H_FD) + 4 * tail, f(x)


def _eigen_b(factor):
    def recipe(p):
        lhs, k2 = _b_operator(p["tau"], p["x"])
        return lhs, factor * p["tau"] ** 2 * k2
    return recipe


register("eigen-B",
         "B K_{i tau}(x)^2 = lambda K_{i tau}(x)^2 with B f = (4x^2 - x d/dx x d/dx) f + 4 int_x^inf y f(y) dy;"
         " variants lambda = tau^2 (printed) and 4 tau^2 (corrected); five-point differences, h = 1e-3",
         {"tau": TAU_POS, "x": X}, tol_rel=1e-5, category=Category.CANDIDATE,
         variants={"printed": _eigen_b(1.0), "corrected": _eigen_b(4.0)})


@register("imk-identity", "x Im K_{1+i tau}(x) = tau K_{i tau}(x)",
          {"tau": TAU, "x": X}, tol_abs=1e-14, tol_rel=1e-9)
def _imk_identity(p):
    tau, x = p["tau"], p["x"]
    return x * macdonald_shifted(1.0, tau, x).imag, tau * macdonald_imag(tau, x)


@register("dk-deriv",
          "d/dx K_{i tau}(x) = -Re K_{1+i tau}(x); five-point central difference, h = 1e-3",
          {"tau": TAU, "x": X}, tol_abs=1e-12, tol_rel=1e-6)
def _dk_deriv(p):
    tau, x = p["tau"], p["x"]
    return -macdonald_shifted(1.0, tau, x).real, d1(lambda z: macdonald_imag(tau, z), x, H_FD)


@register("p-int-rep",
          "p_n(x) = (2 (-1)^n / pi) e^x int_0^inf tau^{2n} K_{i tau}(x) d tau",
          {"n": tuple(range(6)), "x": X}, tol_abs=1e-12, tol_rel=1e-9)
def _p_int_rep(p):
    n, x = p["n"], p["x"]
    T = 80.0
    t, w = panel_rule(T, min(1.0, math.pi / max(1.0, math.log(2 * T / x))))
    k = macdonald_imag(t, np.full_like(t, x))
    f = w * t ** (2 * n) * k
    c = 2 * (-1) ** n / math.pi * math.exp(x)
    lhs = float(p_chain(n)[n](x))
    return lhs, c * float(np.sum(f)), abs(c) * float(np.sum(np.abs(f))) * 1e-3


@register("gen-func",
          "sum_{n<=12} p_n(x) y^{2n} / (2n)! = exp(-2x sinh^2(y/2)) (truncated series)",
          {"x": X, "y": (0.0, 0.1, 0.2, -0.2)}, tol_abs=1e-12)
def _gen_func(p):
    x, y = p["x"], p["y"]
    return gen_series_eval(x, y, 12), math.exp(-2 * x * math.sinh(0.5 * y) ** 2)


_PAIRS = {"cosh/laplace": (MomentRoute.COSH, MomentRoute.LAPLACE),
          "cosh/direct": (MomentRoute.COSH, MomentRoute.DIRECT),
          "laplace/direct": (MomentRoute.LAPLACE, MomentRoute.DIRECT)}


@register("mu-cross-route",
          "mu_n(x) = int_0^inf tau^{2n} K_{i tau}(x)^2 d tau equals its cosh-integral and Laplace-integral forms",
          {"n": tuple(range(6)), "x": X, "pair": tuple(_PAIRS)}, tol_rel=1e-7)
def _mu_cross(p):
    r1, r2 = _PAIRS[p["pair"]]
    return mu(p["n"], p["x"], r1), mu(p["n"], p["x"], r2)


@register("mu0-closed", "mu_0(x) = (pi/2) K_0(2x)", {"x": X}, tol_rel=1e-9)
def _mu0(p):
    return mu(0, p["x"], MomentRoute.DIRECT), mu_closed(0, p["x"])


@register("mu1-closed", "mu_1(x) = (pi x / 4) K_1(2x)", {"x": X}, tol_rel=1e-9)
def _mu1(p):
    return mu(1, p["x"], MomentRoute.DIRECT), mu_closed(1, p["x"])


def _mu2(variant):
    def recipe(p):
        return mu(2, p["x"], MomentRoute.DIRECT), mu2_closed(p["x"], variant)
    return recipe


register("mu2-closed-form",
         "mu_2(x) = (pi x / 16)[3x(K_2(2x) -+ K_0(2x)) - K_1(2x)]; variants minus (printed) and plus (corrected)",
         {"x": X}, tol_rel=1e-6, category=Category.CANDIDATE,
         variants={"printed": _mu2("printed"), "corrected": _mu2("corrected")})


def a1_closed(x, variant):
    """Leading coefficient of the degree-one orthonormal polynomial for K^2.

    ``printed``: 2 sqrt(2 K_0 / (pi x K_1)) [K_0 - x K_1]^{-1/2};
    ``corrected``: sqrt(8 / (pi x)) [3x K_0 + K_1 - x K_1^2 / K_0]^{-1/2};
    Bessel functions at 2x. A negative bracket gives NaN.
    """
    k0, k1 = macdonald_real(0.0, 2 * x), macdonald_real(1.0, 2 * x)
    if variant == "printed":
        br = k0 - x * k1
        pre = 2 * math.sqrt(2 * k0 / (math.pi * x * k1))
    elif variant == "corrected":
        br = 3 * x * k0 + k1 - x * k1 * k1 / k0
        pre = math.sqrt(8 / (math.pi * x))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return pre / math.sqrt(br) if br > 0 else math.nan


def _a1(variant):
    def recipe(p):
        x = p["x"]
        m0, m1, m2 = (mu(j, x, MomentRoute.DIRECT) for j in range(3))
        return (m2 - m1 * m1 / m0) ** -0.5, a1_closed(x, variant)
    return recipe


register("a1-closed-form",
         "a_1(x) = [mu_2 - mu_1^2/mu_0]^{-1/2} against its Bessel closed form;"
         " variants printed and corrected (the latter built on the corrected mu_2)",
         {"x": X}, tol_rel=1e-6, category=Category.CANDIDATE,
         variants={"printed": _a1("printed"), "corrected": _a1("corrected")})


def _p0(power):
    def recipe(p):
        m0 = mu(0, p["x"], MomentRoute.DIRECT)
        c = m0 ** -power
        return c * c * m0, 1.0
    return recipe


register("p0-normalization",
         "<P_0, P_0> = 1 for the K^2 weight; variants P_0 = mu_0^{-1/4} (printed) and mu_0^{-1/2} (corrected)",
         {"x": X}, tol_rel=1e-9, category=Category.CANDIDATE,
         variants={"printed": _p0(0.25), "corrected": _p0(0.5)})


@register("mu-prime",
          "mu_n'(x) = x sum_{k<n} (-1)^{n+k} C(2n-1, 2k) mu_k(x) against a five-point difference",
          {"n": tuple(range(1, 6)), "x": X}, tol_rel=1e-5)
def _mu_prime(p):
    n, x = p["n"], p["x"]
    return (mu_derivative(n, x, DerivativeRoute.FORMULA),
            mu_derivative(n, x, DerivativeRoute.CENTRAL_DIFF))


@register("mu-recurrence",
          "moment recurrence with terminating 2F1(2(k+1-n), 2k+1; 2(k+1); -1) coefficients;"
          " n = 1 reduces to x mu_0' = -4 mu_1; residual normalized by max(mu_n, mu_0)",
          {"n": (1, 2, 3, 4, 5), "x": X}, tol_abs=1e-9)
def _mu_recurrence(p):
    return moment_recurrence_residual(p["n"], p["x"]), 0.0


@register("conv-power",
          "KL convolution of u^{2a-1} and y^{2b-1} = 2^{a+b-1} x^{a+b-1} Gamma(a+b) K_{b-a}(x)",
          {"a": (), "b": (), "x": ()}, tol_rel=1e-5,
          points=({"a": 1.0, "b": 1.0, "x": 1.0}, {"a": 0.75, "b": 1.25, "x": 2.0},
                  {"a": 0.5, "b": 1.0, "x": 0.5}))
def _conv_power(p):
    a, b, x = p["a"], p["b"], p["x"]
    rhs = 2 ** (a + b - 1) * x ** (a + b - 1) * math.gamma(a + b) * macdonald_real(b - a, x)
    return kl_convolution_power(a, b, x), rhs


@register("wilson-3gamma",
          "int_0^inf |Gamma(a+i t)Gamma(b+i t)Gamma(c+i t)/Gamma(2 i t)|^2 d t"
          " = 2 pi Gamma(a+b) Gamma(a+c) Gamma(b+c)",
          {"a": ((1.0, 1.0, 1.0), (0.6, 0.8, 1.0), (0.5, 1.0, 1.5))}, tol_rel=1e-8)
def _wilson3(p):
    return wilson_power_integral(p["a"], 0).value, wilson_m0_closed(p["a"])


@register("wilson-4gamma",
          "int_0^inf |prod_{k<=4} Gamma(a_k+i t)/Gamma(2 i t)|^2 d t"
          " = 2 pi prod_{j<k} Gamma(a_j+a_k) / Gamma(a_1+a_2+a_3+a_4)",
          {"a": ((1.0, 1.0, 1.0, 1.0), (0.7, 0.9, 1.1, 1.3), (0.6, 0.8, 1.0, 1.2))}, tol_rel=1e-8)
def _wilson4(p):
    return wilson_power_integral(p["a"], 0).value, wilson_m0_closed(p["a"])


@lru_cache(maxsize=1)
def _ltab():
    return l_table(13, 12)


@register("l-rec-1",
          "(k+1) l_{m,k+1} - (2k+1) l_{m,k} + k l_{m,k-1} + int e^{-x} p_m L_k dx = 0 exactly,"
          " l_{m,k} = int_0^inf e^{-x} p_m(x) L_k(x) dx / x",
          {"m": tuple(range(1, 13)), "k": tuple(range(11))})
def _l_rec_1(p):
    return float(l_rec_laguerre_residual(_ltab(), p["m"], p["k"])), 0.0


def _l_rec_2(variant):
    def recipe(p):
        return float(l_rec_shift_residual(_ltab(), p["m"], p["k"], variant)), 0.0
    return recipe


def _l_rec_2_distinct(p):
    t = _ltab()
    return (l_rec_shift_residual(t, p["m"], p["k"], "printed") != 0) != \
        (l_rec_shift_residual(t, p["m"], p["k"], "corrected") != 0)


register("l-rec-2",
         "l_{m,k} through row m-1: printed five-term form with (k+1), (k^2-3k-1), 2k(1-k), k(k-1)"
         " against the form derived from A acting on L_k; exact rational residual",
         {"m": tuple(range(1, 13)), "k": tuple(range(11))}, category=Category.CANDIDATE,
         where=_l_rec_2_distinct,
         variants={"printed": _l_rec_2("printed"), "corrected": _l_rec_2("corrected")},
         note="grid restricted to the (m, k) where exactly one form has a nonzero residual")
