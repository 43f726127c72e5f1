"""
Moments mu_n(x) = int_0^inf tau^{2n} K_{i tau}(x)^2 d tau.

Three independent routes:

* COSH     ((-1)^n pi / 2^{2n+1}) int_0^inf e^{-2x cosh u} p_n(2x cosh u) du
* LAPLACE  ((-1)^n pi / 4) int_0^inf e^{-2t - x^2/(2t)} p_n(t) dt / t
* DIRECT   the defining index integral, cut at T where tau^{2n} e^{-pi tau}
           is negligible.
"""

import enum
import math
from functools import lru_cache

import numpy as np

from .ppoly import p_chain
from .quadcore import IntegralResult, QuadSpec, integrate_interval, integrate_semi_axis
from .specfun import DomainError, macdonald_imag, macdonald_real

__all__ = [
    "MomentRoute",
    "DerivativeRoute",
    "MomentError",
    "mu",
    "mu_result",
    "mu_derivative",
    "mu_closed",
    "mu2_closed",
    "f21_terminating",
    "recurrence_bracket",
    "moment_recurrence_residual",
]

_TIGHT = QuadSpec(abs_tol=1e-300, rel_tol=1e-11, max_refinements=10)


class MomentRoute(enum.Enum):
    COSH = "cosh"
    LAPLACE = "laplace"
    DIRECT = "direct"


class DerivativeRoute(enum.Enum):
    FORMULA = "formula"
    CENTRAL_DIFF = "central_diff"


class MomentError(ArithmeticError):
    """Quadrature for a moment did not converge; ``route`` names the route."""

    def __init__(self, route, n, x, result):
        super().__init__(f"{route.value} route for mu_{n}({x}) did not converge "
                         f"(error estimate {result.error_estimate:.3g})")
        self.route = route
        self.result = result


def _check(n, x):
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= 16):
        raise ValueError("moments are supported for integer 0 <= n <= 16")
    if not x > 0:
        raise DomainError("moments need x > 0")


def _poly_float(n):
    return p_chain(n)[n].to_float()


def _horner(c, t):
    acc = np.zeros_like(t)
    for v in c[::-1]:
        acc = acc * t + v
    return acc


def _cosh_route(n, x):
    c = _poly_float(n)

    def f(u):
        # e^{-t} t^16 is below the double range past t = 800
        with np.errstate(over="ignore"):
            t = np.minimum(2 * x * np.cosh(u), 1e3)
        return np.where(t < 800.0, np.exp(-t) * _horner(c, t), 0.0)

    r = integrate_semi_axis(f, _TIGHT, scale=2.0)
    s = (-1) ** n * math.pi / 2 ** (2 * n + 1)
    return IntegralResult(s * r.value, abs(s) * r.error_estimate, r.evaluations, r.converged)


def _laplace_route(n, x):
    c = _poly_float(n)

    def f(t):
        with np.errstate(divide="ignore", over="ignore"):
            e = np.exp(-2 * t - x * x / (2 * t))
        return np.where(t > 0, e * _horner(c, t) / np.where(t > 0, t, 1.0), 0.0)

    r = integrate_semi_axis(f, _TIGHT, scale=max(1.0, x))
    s = (-1) ** n * math.pi / 4
    return IntegralResult(s * r.value, abs(s) * r.error_estimate, r.evaluations, r.converged)


def _direct_cutoff(n, x, scale, tol=1e-17):
    # tail of tau^{2n} K^2 is below 2 pi tau^{2n-1} e^{-pi tau} once tau > x
    T = max(20.0, 2.0 * x)
    while (2 * n - 1) * math.log(T) + math.log(2 * math.pi) - math.pi * T > math.log(tol * scale):
        T *= 1.1
    return T


def _direct_route(n, x):
    scale = abs(_cosh_route(n, x).value)
    T = _direct_cutoff(n, x, scale)
    # K^2 oscillates in tau with frequency about 2 log(2 tau / x)
    omega = max(1.0, 2 * math.log(2 * T / x))
    spec = QuadSpec(abs_tol=1e-300, rel_tol=1e-12, oscillation_hint=omega, max_refinements=4)

    def f(t):
        return t ** (2 * n) * _k_squared(x, t)

    return integrate_interval(f, 0.0, T, spec)


_K2_CACHE = {}


def _k_squared(x, t):
    key = (float(x), t.size, t.tobytes())
    v = _K2_CACHE.get(key)
    if v is None:
        if len(_K2_CACHE) > 256:
            _K2_CACHE.clear()
        v = macdonald_imag(t, np.full_like(t, x)) ** 2
        _K2_CACHE[key] = v
    return v


_ROUTES = {
    MomentRoute.COSH: _cosh_route,
    MomentRoute.LAPLACE: _laplace_route,
    MomentRoute.DIRECT: _direct_route,
}


@lru_cache(maxsize=4096)
def mu_result(n, x, route=MomentRoute.COSH):
    """mu_n(x) with its quadrature error estimate as an ``IntegralResult``."""
    _check(n, x)
    route = MomentRoute(route)
    r = _ROUTES[route](int(n), float(x))
    if not r.converged:
        raise MomentError(route, n, x, r)
    return r


def mu(n, x, route=MomentRoute.COSH):
    """mu_n(x) = int_0^inf tau^{2n} K_{i tau}(x)^2 d tau by the chosen route.

    Parameters
    ----------
    n : int
        Moment index, 0 <= n <= 16 (validated up to 12).
    x : float
        Positive argument; accuracy is validated on [0.1, 10].
    route : MomentRoute
        COSH (default), LAPLACE or DIRECT.
    """
    return float(mu_result(n, x, MomentRoute(route)).value)


def mu_closed(n, x):
    """Closed forms mu_0 = (pi/2) K_0(2x) and mu_1 = (pi x / 4) K_1(2x)."""
    if n == 0:
        return 0.5 * math.pi * macdonald_real(0.0, 2 * x)
    if n == 1:
        return 0.25 * math.pi * x * macdonald_real(1.0, 2 * x)
    raise ValueError("closed forms are available for n = 0, 1")


def mu2_closed(x, variant="corrected"):
    """(pi x / 16)[3x(K_2 -+ K_0) - K_1] at 2x.

    ``printed`` uses K_2 - K_0, ``corrected`` K_2 + K_0; only the latter equals
    the moment.
    """
    k0, k1, k2 = (macdonald_real(v, 2 * x) for v in (0.0, 1.0, 2.0))
    sgn = {"printed": -1.0, "corrected": 1.0}[variant]
    return math.pi * x / 16 * (3 * x * (k2 + sgn * k0) - k1)


def _five_point(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def mu_derivative(n, x, route=DerivativeRoute.FORMULA):
    """d mu_n / dx.

    FORMULA uses mu_n' = x sum_{k<n} (-1)^{n+k} C(2n-1, 2k) mu_k (n >= 1).
    CENTRAL_DIFF is a five-point stencil with h = 1e-4 max(1, x) on the COSH
    route.
    """
    route = DerivativeRoute(route)
    if route is DerivativeRoute.FORMULA:
        if n < 1:
            raise ValueError("the derivative formula needs n >= 1")
        return x * sum((-1) ** (n + k) * math.comb(2 * n - 1, 2 * k) * mu(k, x)
                       for k in range(n))
    h = 1e-4 * max(1.0, x)
    if x - 2 * h <= 0:
        raise DomainError("x too small for the difference stencil")
    return _five_point(lambda z: mu(n, z), x, h)


def f21_terminating(M, b, c):
    """2F1(-M, b; c; -1) as the finite sum of its M + 1 terms."""
    if M < 0 or int(M) != M:
        raise ValueError("M must be a non-negative integer")
    if c <= 0 and float(c).is_integer() and c >= -M:
        raise DomainError(f"2F1 parameter pole: c = {c} with M = {M}")
    term = 1.0
    total = 1.0
    for j in range(int(M)):
        term *= (-M + j) * (b + j) / ((c + j) * (j + 1)) * -1.0
        total += term
    return total


def recurrence_bracket(n, k):
    """C(2n-1, 2k+1) 2F1(2(k+1-n), 2k+1; 2(k+1); -1) - 1."""
    return math.comb(2 * n - 1, 2 * k + 1) * f21_terminating(2 * (n - k - 1), 2 * k + 1, 2 * (k + 1)) - 1


def moment_recurrence_residual(n, x):
    """Normalized residual of the moment recurrence with 2F1 coefficients.

    For n >= 2:
    (-1)^n mu_n + (3/2 - n) mu_1 + 1/2 sum_{k=2}^{n-1} (-1)^k C(2n-1, 2k-1) mu_k
        = x^2/8 sum_{k=0}^{n-2} (-1)^k [recurrence_bracket(n, k)] mu_k.
    At n = 1 the relation degenerates; its content there is x mu_0' = -4 mu_1,
    whose residual is returned instead. Divided by max(|mu_n|, mu_0).
    """
    if n < 1:
        raise ValueError("the recurrence starts at n = 1")
    m = [mu(k, x) for k in range(n + 1)]
    norm = max(abs(m[n]), m[0])
    if n == 1:
        return abs(x * mu_derivative(0, x, DerivativeRoute.CENTRAL_DIFF) + 4 * m[1]) / norm
    lhs = (-1) ** n * m[n] + (1.5 - n) * m[1]
    lhs += 0.5 * sum((-1) ** k * math.comb(2 * n - 1, 2 * k - 1) * m[k] for k in range(2, n))
    rhs = x * x / 8 * sum((-1) ** k * recurrence_bracket(n, k) * m[k] for k in range(n - 1))
    return abs(lhs - rhs) / norm
