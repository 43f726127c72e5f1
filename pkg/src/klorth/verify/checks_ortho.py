"""Orthogonal polynomials for the KL-type weights: orthogonality, recurrences,
integral representations and the connection between the two families."""

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

from ..moments import DerivativeRoute, _direct_cutoff, mu_derivative
from ..orthokl import (WeightSpec, basis_for, connection_pq, hankel_det_row,
                       kernel_closed, moment_vector, three_term_residual)
from ..ppoly import p_chain
from ..quadcore import QuadSpec, integrate_interval, integrate_real_line, integrate_semi_axis
from ..specfun import bessel_i_sym, macdonald_imag, macdonald_imag_dx
from .core import Category, register
from .rules import d1, gram_of, panel_rule

X = (0.5, 1.0, 2.0)
TAU_POS = (0.5, 1.0, 2.0)
NMAX = 5
H_FD = 1e-3

_SPECS = {"kl": WeightSpec.kl, "imk": WeightSpec.imk, "rek": WeightSpec.rek}
_LINE = QuadSpec(abs_tol=1e-14, rel_tol=1e-13)
_TIGHT = QuadSpec(abs_tol=1e-300, rel_tol=1e-11)


@lru_cache(maxsize=32)
def _basis(kind, x, N=NMAX + 2):
    return basis_for(_SPECS[kind](x), N)


def _nm_pairs(nmax=NMAX):
    return tuple((n, m) for n in range(nmax + 1) for m in range(n + 1))


def _ortho(kind):
    def recipe(p):
        n, m = p["nm"]
        b = _basis(kind, p["x"])
        g = gram_of([b.poly(n)], [b.poly(m)], b.spec)[0, 0]
        return g, float(n == m)
    return recipe


for _kind, _desc in (("P", "K_{i tau}(x)^2"), ("Q", "(Im K_{1+i tau}(x))^2"),
                     ("R", "(Re K_{1+i tau}(x))^2")):
    register(f"ortho-{_kind}",
             f"int_0^inf {_kind}_n {_kind}_m {_desc} d tau = delta_nm, by direct quadrature in tau",
             {"x": X, "nm": _nm_pairs()}, tol_abs=1e-6)(_ortho({"P": "kl", "Q": "imk", "R": "rek"}[_kind]))


@register("three-term",
          "u P_n = A_{n+1} P_{n+1} + B_n P_n + A_n P_{n-1}; max coefficient residual relative to A_{n+1} P_{n+1}",
          {"weight": ("kl", "imk", "rek"), "x": X, "n": tuple(range(5))}, tol_abs=1e-8)
def _three_term(p):
    return three_term_residual(_basis(p["weight"], p["x"]), p["n"]), 0.0


@register("hankel-det",
          "P_n = det(Hankel rows mu_0..mu_{2n-1} with last row 1, u, ..., u^n) / sqrt(D_n D_{n+1});"
          " coefficient max-norm difference to the Gram-Schmidt basis",
          {"x": X, "n": tuple(range(4))}, tol_abs=1e-8)
def _hankel_det(p):
    n, x = p["n"], p["x"]
    spec = WeightSpec.kl(x)
    row = np.asarray(hankel_det_row(moment_vector(spec, n + 1), n), dtype=float)
    ref = _basis("kl", x).poly(n)
    return float(np.max(np.abs(row - ref)) / np.max(np.abs(ref))), 0.0


@register("kl-odd-monomial",
          "tau^{2n-1} / sinh(pi tau) = ((-1)^n / pi) int_0^inf e^{-t} K_{i tau}(t) p_n(t) dt / t",
          {"n": tuple(range(1, 6)), "tau": TAU_POS}, tol_abs=1e-13, tol_rel=1e-9)
def _kl_odd(p):
    n, tau = p["n"], p["tau"]
    q = p_chain(n)[n].shift_down().to_float()

    def g(t):
        return np.exp(-t) * macdonald_imag(np.full_like(t, tau), t) * npoly.polyval(t, q)

    r = integrate_semi_axis(g, _TIGHT, 1.0)
    return (-1) ** n / math.pi * r.value, tau ** (2 * n - 1) / math.sinh(math.pi * tau)


@register("erdelyi-kober",
          "int_0^inf K_{i tau}(x e^{-s}) e^{-s} / sqrt(1 - e^{-2s}) ds"
          " = pi K_{i tau/2}(x/2) [I_{i tau/2} + I_{-i tau/2}](x/2) / (4 cosh(pi tau / 2))",
          {"tau": TAU_POS, "x": X}, tol_abs=1e-14, tol_rel=1e-7)
def _erdelyi_kober(p):
    tau, x = p["tau"], p["x"]

    def g(s):
        return macdonald_imag(np.full_like(s, tau), x * np.exp(-s)) * np.exp(-s) / np.sqrt(-np.expm1(-2 * s))

    lhs = integrate_semi_axis(g, _TIGHT, 4.0).value
    rhs = math.pi * macdonald_imag(tau / 2, x / 2) * bessel_i_sym(tau / 2, x / 2) / (4 * math.cosh(math.pi * tau / 2))
    return lhs, rhs


@register("lemma1",
          "tau^{2n-1} = -(2^{2n+1} / pi^2) sinh(pi tau / 2)"
          " int_0^inf K_{i tau/2}(y) [I_{i tau/2} + I_{-i tau/2}](y) mu_n'(y) dy",
          {"n": (1, 2, 3), "tau": (1.0, 2.0)}, tol_rel=1e-4)
def _lemma1(p):
    n, tau = p["n"], p["tau"]

    def g(y):
        mp = np.array([mu_derivative(n, float(v), DerivativeRoute.FORMULA) for v in y])
        return macdonald_imag(np.full_like(y, tau / 2), y) * bessel_i_sym(tau / 2, y) * mp

    r = integrate_interval(g, 0.0, 40.0, QuadSpec(abs_tol=1e-300, rel_tol=1e-9))
    lhs = -2 ** (2 * n + 1) / math.pi ** 2 * math.sinh(math.pi * tau / 2) * r.value
    return lhs, tau ** (2 * n - 1)


def _line_integral(g):
    re = integrate_real_line(lambda y: g(y).real, _LINE, 2.0).value
    im = integrate_real_line(lambda y: g(y).imag, _LINE, 2.0).value
    return complex(re, im)


_THM1_F = {"u": (0.0, 1.0), "u^2": (0.0, 0.0, 1.0), "1+u-u^2/8": (1.0, 1.0, -0.125)}


@register("thm1",
          "f(4 tau^2) - f_0 = (i tau / 2) sinh(pi tau)"
          " int_R (f(4 (y-i)^2) - f_0) / ((y - i)(cosh(pi y) + cosh(pi tau))) dy; real and imaginary parts",
          {"f": tuple(_THM1_F), "tau": TAU_POS, "part": ("re", "im")}, tol_abs=1e-8, tol_rel=1e-6)
def _thm1(p):
    c = np.array(_THM1_F[p["f"]])
    tau = p["tau"]

    def g(y):
        z = y - 1j
        return (npoly.polyval(4 * z * z, c) - c[0]) / (z * (np.cosh(np.pi * y) + np.cosh(np.pi * tau)))

    rhs = 0.5j * tau * math.sinh(math.pi * tau) * _line_integral(g)
    exact = npoly.polyval(4 * tau * tau, c) - c[0]
    return (rhs.real, exact) if p["part"] == "re" else (rhs.imag, 0.0)


@register("p-int-eq",
          "P_n(4 tau^2) = (i / (2 tau)) sinh(pi tau) int_R (y - i) P_n(4 (y-i)^2) / (cosh(pi y) + cosh(pi tau)) dy",
          {"x": X, "n": (1, 2, 3), "tau": TAU_POS}, tol_rel=1e-4, category=Category.EXTENDED)
def _p_int_eq(p):
    c = _basis("kl", p["x"]).poly(p["n"])
    tau = p["tau"]

    def g(y):
        z = y - 1j
        return z * npoly.polyval(4 * z * z, c) / (np.cosh(np.pi * y) + np.cosh(np.pi * tau))

    rhs = 0.5j / tau * math.sinh(math.pi * tau) * _line_integral(g)
    return rhs.real, npoly.polyval(4 * tau * tau, c)


_KERNEL_PTS = tuple({"tau": t, "y": y} for t in (0.0, 0.5, 1.0, 2.0) for y in (0.0, 0.5, 1.0, 2.0))


@register("kernel-identity",
          "int_0^inf x K_{iy}(x) K_{i tau}(x)^2 [I_{iy} + I_{-iy}](x) dx = pi^2 / (4 (cosh(pi y) + cosh(pi tau)))",
          {"tau": (), "y": ()}, tol_rel=1e-6, points=_KERNEL_PTS)
def _kernel(p):
    tau, y = p["tau"], p["y"]

    def g(s):
        return (s * macdonald_imag(np.full_like(s, y), s) * macdonald_imag(np.full_like(s, tau), s) ** 2
                * bessel_i_sym(y, s))

    r = integrate_interval(g, 0.0, 40.0, QuadSpec(abs_tol=1e-300, rel_tol=1e-10))
    return r.value, kernel_closed(tau, y)


@register("lebedev-rep",
          "x K_{i tau}(x)^2 = -d/dx int_0^inf y sinh(pi y) K_{iy}(x)^2 / (cosh(pi tau) + cosh(pi y)) dy;"
          " five-point difference, h = 1e-3",
          {"tau": (0.5, 1.0), "x": X}, tol_rel=1e-4, category=Category.EXTENDED)
def _lebedev(p):
    tau, x = p["tau"], p["x"]

    def J(z):
        def g(y):
            return y * np.sinh(np.pi * y) * macdonald_imag(y, np.full_like(y, z)) ** 2 / (
                np.cosh(np.pi * tau) + np.cosh(np.pi * y))
        return integrate_semi_axis(g, QuadSpec(abs_tol=1e-300, rel_tol=1e-12), 4.0).value

    return -d1(J, x, H_FD), x * macdonald_imag(tau, x) ** 2


def _quasi_pairs():
    return tuple((n, m) for n in range(2, NMAX + 1) for m in range(n - 1))


@register("quasi-orth",
          "int_0^inf P_n(tau^2) tau^{2m} (Im K_{1+i tau}(x))^2 d tau = 0 for m <= n-2;"
          " measured against the Cauchy-Schwarz bound",
          {"x": X, "nm": _quasi_pairs()}, tol_rel=1e-6)
def _quasi(p):
    n, m = p["nm"]
    P = _basis("kl", p["x"])
    spec = WeightSpec.imk(p["x"])
    mono = np.eye(m + 1)[m]
    g = gram_of([P.poly(n), mono], [P.poly(n), mono], spec)
    return g[0, 1], 0.0, math.sqrt(g[0, 0] * g[1, 1])


@register("dkk",
          "int_0^inf Q_k(tau^2) tau^{2k} (Im K_{1+i tau}(x))^2 d tau = 1 / q_k with q_k the leading coefficient of Q_k",
          {"x": X, "k": tuple(range(NMAX + 1))}, tol_rel=1e-5)
def _dkk(p):
    k = p["k"]
    Q = _basis("imk", p["x"])
    return gram_of([Q.poly(k)], [np.eye(k + 1)[k]], Q.spec)[0, 0], 1.0 / Q.leading[k]


@lru_cache(maxsize=16)
def _connection_forms(x, n):
    P, Q = _basis("kl", x), _basis("imk", x)
    a, b, q, r = P.leading, P.subleading, Q.leading, Q.subleading
    al, be = connection_pq(x, n)
    xx = x * x
    kl = WeightSpec.kl(x)
    return {
        "alpha": (al, a[n] / q[n]),
        "beta-coef": (be, (b[n] - a[n] * r[n] / q[n]) / q[n - 1]),
        "beta": (be, q[n - 1] / (xx * a[n])),
        "B": (P.rec_B[n], xx * (al * al + be * be)),
        "B-closed": (P.rec_B[n], a[n] ** 2 * xx / q[n] ** 2 + q[n - 1] ** 2 / (xx * a[n] ** 2)),
        "b-next": (b[n + 1] / a[n + 1], r[n] / q[n] - xx * a[n] ** 2 / q[n] ** 2),
        "b-cur": (b[n] / a[n], r[n] / q[n] + q[n - 1] ** 2 / (xx * a[n] ** 2)),
        "B-diff": (P.rec_B[n] - Q.rec_B[n], q[n] ** 2 / (xx * a[n] ** 2) * (Q.rec_A[n] ** 2 - P.rec_A[n + 1] ** 2)),
        "B-diff-mid": (P.rec_B[n] - Q.rec_B[n], q[n - 1] ** 2 / (xx * a[n] ** 2) - q[n] ** 2 / (xx * a[n + 1] ** 2)),
        "pq": (gram_of([P.poly(n)], [Q.poly(n)], kl)[0, 0], q[n] / a[n]),
        "pq-beta": (q[n] / a[n], xx * be * q[n] / q[n - 1]),
        "int-n1": (gram_of([P.poly(n)], [np.eye(n + 2)[n + 1]], kl)[0, 0], -b[n + 1] / (a[n] * a[n + 1])),
        "int-n1-alpha": (xx / q[n] * (al - be * r[n] / q[n - 1]), -b[n + 1] / (a[n] * a[n + 1])),
        "alpha-b": (al, (r[n] - q[n] * b[n + 1] / a[n + 1]) / (xx * a[n])),
        "imk-lower": (gram_of([P.poly(n)], [np.eye(n)[n - 1]], WeightSpec.imk(x))[0, 0], 1.0 / (xx * a[n])),
        "imk-norm": (gram_of([P.poly(n)], [P.poly(n)], WeightSpec.imk(x))[0, 0], al * al + be * be),
    }


_FORMS = ("alpha", "beta-coef", "beta", "B", "B-closed", "b-next", "b-cur", "B-diff", "B-diff-mid",
          "pq", "pq-beta", "int-n1", "int-n1-alpha", "alpha-b", "imk-lower", "imk-norm")


@register("connection",
          "P_n = alpha_n Q_n + beta_n Q_{n-1} and the coefficient identities it implies"
          " (alpha_n, beta_n, B_n, subleading ratios, mixed inner products) in terms of a_n, b_n, q_n, r_n",
          {"form": _FORMS, "n": (1, 2, 3), "x": X}, tol_abs=1e-12, tol_rel=1e-5)
def _connection(p):
    return _connection_forms(p["x"], p["n"])[p["form"]]


@lru_cache(maxsize=8)
def _shift_nodes(x):
    T = _direct_cutoff(2 * NMAX + 2, x, 1e-3)
    t, w = panel_rule(round(T, 12), min(1.0, 2.5 / max(1.0, math.log(2 * T / x))))
    k = macdonald_imag(t, np.full_like(t, x))
    kd = macdonald_imag_dx(t, x)
    return t, w, k, kd


@register("shifted-orth",
          "sum over tau -> +-tau of Re int_0^inf P_n((tau+i)^2) (tau+i)^{2m} K_{i tau}(x)^2 d tau"
          " = 2 int_0^inf P_n(tau^2) tau^{2m} (Re K_{1+i tau}(x))^2 d tau for m <= n-2",
          {"x": X, "nm": _quasi_pairs()}, tol_rel=1e-4, category=Category.EXTENDED)
def _shifted(p):
    n, m = p["nm"]
    c = _basis("kl", p["x"]).poly(n)
    t, w, k, kd = _shift_nodes(p["x"])
    zp, zm = t + 1j, -t + 1j
    v = npoly.polyval(zp * zp, c) * zp ** (2 * m) + npoly.polyval(zm * zm, c) * zm ** (2 * m)
    q = npoly.polyval(t * t, c) * t ** (2 * m) * kd * kd
    return float(np.sum(w * v.real * k * k)), 2 * float(np.sum(w * q)), 2 * float(np.sum(w * np.abs(q)))

