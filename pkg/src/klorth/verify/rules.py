"""Fixed quadrature rules and difference stencils shared by the checks."""

import math
from functools import lru_cache

import numpy as np

from ..moments import _direct_cutoff
from ..orthokl import WeightKind, weight_eval
from ..quadcore import gauss_legendre_rule
from ..specfun import macdonald_imag

_ORDER = 20


@lru_cache(maxsize=256)
def panel_rule(T, width, order=_ORDER):
    """Composite Gauss-Legendre nodes and weights on [0, T], panels <= width."""
    npan = max(1, math.ceil(T / width))
    xg, wg = gauss_legendre_rule(order)
    e = np.linspace(0.0, T, npan + 1)
    h = 0.5 * np.diff(e)
    m = 0.5 * (e[1:] + e[:-1])
    t = (m[:, None] + h[:, None] * xg[None, :]).ravel()
    w = (h[:, None] * wg[None, :]).ravel()
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def index_rule(x, power, extra_rate=0.0):
    """Rule for int_0^T tau^power K_{i tau}(x)^2 (...) d tau on the index axis.

    T follows the e^{-pi tau} decay of K^2; panels are no wider than pi over
    the oscillation rate 2 log(2T/x) + ``extra_rate``.
    """
    T = _direct_cutoff(power // 2 + 1, x, 1e-3)
    omega = max(1.0, 2 * math.log(2 * T / x)) + extra_rate
    return panel_rule(round(T, 12), min(1.0, math.pi / omega))


@lru_cache(maxsize=64)
def kimag_nodes(x, T, width):
    t, _ = panel_rule(T, width)
    v = macdonald_imag(t, np.full_like(t, x))
    v.setflags(write=False)
    return v


def d1(f, x, h):
    """Five-point first derivative."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def d2(f, x, h):
    """Five-point second derivative."""
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)


@lru_cache(maxsize=64)
def weighted_nodes(spec, degree):
    """Nodes and weight-times-rule weights for int_0^inf p(tau^2) w(tau) d tau
    with deg p <= ``degree``, by a fixed panel rule."""
    if spec.kind is WeightKind.WILSON:
        raise ValueError("use the Wilson quadrature for Wilson weights")
    extra = 2 if spec.kind is not WeightKind.KL_SQUARE else 0
    t, w = index_rule(spec.x, 2 * degree + extra)
    ww = w * weight_eval(spec, t)
    return t, ww


def gram_of(rows_a, rows_b, spec):
    """Matrix of int_0^inf a_i(tau^2) b_j(tau^2) w(tau) d tau for coefficient rows."""
    A = [np.atleast_1d(np.asarray(r, dtype=float)) for r in rows_a]
    B = [np.atleast_1d(np.asarray(r, dtype=float)) for r in rows_b]
    deg = max(len(r) for r in A) + max(len(r) for r in B) - 2
    t, ww = weighted_nodes(spec, deg)
    u = t * t
    va = np.array([np.polynomial.polynomial.polyval(u, r) for r in A])
    vb = np.array([np.polynomial.polynomial.polyval(u, r) for r in B])
    return (va * ww[None, :]) @ vb.T
