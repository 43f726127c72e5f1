"""
Special-function kernels.

Macdonald functions are computed from the integral

    K_nu(x) = 1/2 * int_{-inf}^{inf} exp(-x cosh t + nu t) dt,   nu = alpha + i tau,

with the contour moved to Im t = theta, theta ~ arcsin(tau/x). On the shifted
line the integrand no longer oscillates with amplitude e^{-x}; its size is
comparable to the result, so the trapezoid rule (exponentially convergent for
this analytic, doubly decaying integrand) keeps *relative* accuracy even when
K_{i tau}(x) ~ e^{-pi tau/2} is tiny. Index integrals over tau rely on this.

For x <= 1 and tau >= 1/2 the imaginary-order case uses instead

    K_{i tau}(x) = -pi Im I_{i tau}(x) / sinh(pi tau),

whose power series converges in a handful of terms; I_{i tau} and I_{-i tau}
are complex conjugates, so nothing cancels.
"""

import math
from functools import lru_cache

import numpy as np

from .quadcore import trapezoid_rows

__all__ = [
    "ComplexValue",
    "DomainError",
    "AccuracyError",
    "macdonald",
    "macdonald_real",
    "macdonald_imag",
    "macdonald_imag_dx",
    "macdonald_shifted",
    "bessel_i_sym",
    "log_gamma",
]

ComplexValue = complex


class DomainError(ValueError):
    pass


class AccuracyError(ArithmeticError):
    pass


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("Macdonald functions need x > 0")
    return x


def _contour(alpha, tau, x):
    """Contour height theta and half width of the truncated line."""
    r = tau / x
    eps = np.clip(1.0 / np.maximum(tau, 1e-300), 0.02, 0.7)
    theta = np.minimum(np.arcsin(np.minimum(r, 1.0)), 0.5 * np.pi - eps)
    c = np.cos(theta)
    # drop the tails once exp(-x c (cosh s - 1) + |alpha| s) < e^{-need} * peak
    need = 40.0 + tau * (0.5 * np.pi - theta)
    aa = np.abs(alpha)
    smax = np.ones_like(x)
    grow = x * c * (np.cosh(smax) - 1) - aa * smax < need
    while grow.any():
        smax[grow] *= 1.25
        grow = x * c * (np.cosh(smax) - 1) - aa * smax < need
    return theta, smax


def macdonald(alpha, tau, x, rel_tol=1e-9):
    """K_{alpha + i tau}(x) for real alpha, tau and x > 0 (broadcasting).

    Returns a complex ndarray. The error of the returned values is far below
    ``rel_tol``; the tolerance only drives the step-halving stop.
    """
    x = _check_x(x)
    alpha, tau, x = np.broadcast_arrays(
        np.asarray(alpha, dtype=float), np.asarray(tau, dtype=float), x)
    shape = x.shape
    a = alpha.ravel()
    t = tau.ravel()
    xx = x.ravel()
    if not a.any():
        return _k_imag_order(t, xx, rel_tol).reshape(shape) + 0j
    neg = t < 0
    t = np.abs(t)
    theta, smax = _contour(a, t, xx)
    nu = a + 1j * t
    ith = 1j * theta

    def f(s, rows):
        z = s + ith[rows, None]
        return np.exp(-xx[rows, None] * np.cosh(z) + nu[rows, None] * z)

    val, _, ok, _ = trapezoid_rows(f, smax, rel_tol=rel_tol)
    if not ok.all():
        raise AccuracyError("contour trapezoid did not converge")
    val = 0.5 * val
    val[neg] = np.conj(val[neg])
    return val.reshape(shape)


_SERIES_X = 1.0
_SERIES_TAU = 0.5


def _k_imag_series(tau, x, deriv=False):
    z = 1j * tau
    # (x/2)^{i tau} / (Gamma(1 + i tau) sinh(pi tau)) without overflow
    lead = np.exp(z * np.log(0.5 * x) - log_gamma(z + 1) - np.pi * tau)
    lead = lead * 2 / -np.expm1(-2 * np.pi * tau)
    q = 0.25 * x * x
    term = np.ones_like(lead)
    total = np.ones_like(lead)
    if deriv:
        total = total * z / x
    for k in range(1, 80):
        term = term * q / (k * (k + z))
        add = term * (z + 2 * k) / x if deriv else term
        total = total + add
        if np.all(np.abs(add) <= 1e-17 * np.abs(total)):
            break
    return -np.pi * (lead * total).imag


def _k_imag_order(tau, x, rel_tol, deriv=False):
    tau = np.abs(tau)
    out = np.empty_like(x)
    ser = (x <= _SERIES_X) & (tau >= _SERIES_TAU)
    if ser.any():
        out[ser] = _k_imag_series(tau[ser], x[ser], deriv)
    rest = ~ser
    if rest.any():
        out[rest] = _k_imag_contour(tau[rest], x[rest], rel_tol, deriv)
    return out


def _k_imag_contour(tau, x, rel_tol, deriv=False):
    # real part of the contour integrand is even in s; the imaginary part
    # integrates to zero, so only exp(Re) cos(Im) on s >= 0 is summed
    tau = np.abs(tau)
    theta, smax = _contour(np.zeros_like(x), tau, x)
    xc = x * np.cos(theta)
    xs = x * np.sin(theta)
    tt = tau * theta
    cth, sth = np.cos(theta), np.sin(theta)

    def f(s, rows):
        es = np.exp(s)
        ch = 0.5 * (es + 1 / es)
        sh = 0.5 * (es - 1 / es)
        re = -xc[rows, None] * ch - tt[rows, None]
        im = tau[rows, None] * s - xs[rows, None] * sh
        if deriv:
            # d/dx brings down -cosh(s + i theta)
            c, sn = cth[rows, None], sth[rows, None]
            return -np.exp(re) * (ch * c * np.cos(im) - sh * sn * np.sin(im))
        return np.exp(re) * np.cos(im)

    val, _, ok, _ = trapezoid_rows(f, smax, rel_tol=rel_tol, even=True)
    if not ok.all():
        raise AccuracyError("contour trapezoid did not converge")
    return 0.5 * val.real


@lru_cache(maxsize=65536)
def _k_scalar(alpha, tau, x):
    return complex(macdonald(alpha, tau, x)[()])


def macdonald_real(nu, x):
    """K_nu(x) for real order nu and x > 0."""
    if np.ndim(nu) == 0 and np.ndim(x) == 0:
        _check_x(x)
        return _k_scalar(float(nu), 0.0, float(x)).real
    return macdonald(nu, 0.0, x).real


def macdonald_imag(tau, x):
    """K_{i tau}(x): real and even in tau."""
    if np.ndim(tau) == 0 and np.ndim(x) == 0:
        _check_x(x)
        return _k_scalar(0.0, abs(float(tau)), float(x)).real
    return macdonald(0.0, np.abs(tau), x).real


def macdonald_imag_dx(tau, x):
    """d/dx K_{i tau}(x), equal to -Re K_{1 + i tau}(x) (broadcasting)."""
    x = _check_x(x)
    tau, x = np.broadcast_arrays(np.abs(np.asarray(tau, dtype=float)), x)
    out = _k_imag_order(tau.ravel(), x.ravel().copy(), 1e-9, deriv=True)
    return out.reshape(x.shape) if x.ndim else float(out[0])


def macdonald_shifted(alpha, tau, x) -> ComplexValue:
    """K_{alpha + i tau}(x) as a complex number.

    The real part is int_0^inf e^{-x cosh t} cosh(alpha t) cos(tau t) dt and
    the imaginary part int_0^inf e^{-x cosh t} sinh(alpha t) sin(tau t) dt.
    """
    if np.ndim(alpha) == 0 and np.ndim(tau) == 0 and np.ndim(x) == 0:
        _check_x(x)
        v = _k_scalar(float(alpha), abs(float(tau)), float(x))
        if alpha == 0:
            v = complex(v.real, 0.0)
        return v.conjugate() if tau < 0 else v
    v = macdonald(alpha, tau, x)
    return np.where(np.asarray(alpha) == 0, v.real + 0j, v)


def bessel_i_sym(tau, x, max_terms=500):
    """I_{i tau}(x) + I_{-i tau}(x) for x in (0, 40] by its power series.

    Sums 2 Re[(x/2)^{i tau + 2k} / (k! Gamma(i tau + k + 1))]; ``x`` may be an
    array.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)) or np.any(xa > 40):
        raise DomainError("series route needs 0 < x <= 40")
    z = 1j * float(tau)
    q = (0.5 * xa) ** 2
    term = np.exp(z * np.log(0.5 * xa) - log_gamma(z + 1))
    total = term.real.copy()
    for k in range(1, max_terms + 1):
        term = term * q / (k * (z + k))
        total = total + term.real
        if k > 0.5 * np.max(xa) and np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            return 2 * total
    raise AccuracyError("I-series did not converge")


_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _lanczos(z):
    # valid for Re z >= 1/2
    zm = z - 1
    acc = np.full_like(zm, _LANCZOS_C[0])
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc = acc + c / (zm + i)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(acc)


# B_{2k} / (2k (2k-1)) for the Stirling series
_STIRLING = (1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360,
             1 / 156, -3617 / 122400)


def _stirling(z):
    # valid for |z| >= 10, Re z > 0
    w = 1.0 / z
    w2 = w * w
    acc = np.zeros_like(z)
    for c in reversed(_STIRLING):
        acc = acc * w2 + c
    return (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + acc * w


def log_gamma(z):
    """Principal branch of log Gamma(z) for complex z (scalar or array).

    Stirling series for |z| >= 10, Lanczos approximation elsewhere with
    Re z >= 1/2. Further left, the recurrence
    log Gamma(z) = log Gamma(z + n) - sum log(z + k) is used; it follows the
    principal branch because horizontal shifts never cross the cut.
    """
    za = np.asarray(z, dtype=complex)
    scalar = za.ndim == 0
    za = np.atleast_1d(za)
    pole = (za.imag == 0) & (za.real <= 0) & (za.real == np.round(za.real))
    if pole.any():
        raise DomainError("log_gamma has poles at non-positive integers")
    shift = np.where(za.real < 0.5, np.ceil(0.5 - za.real), 0.0)
    zs = za + shift
    big = np.abs(zs) >= 10
    out = np.where(big, _stirling(np.where(big, zs, 10.0)), _lanczos(np.where(big, 1.0, zs)))
    nmax = int(shift.max()) if shift.size else 0
    for k in range(nmax):
        use = shift > k
        out = out - np.where(use, np.log(np.where(use, za + k, 1.0)), 0.0)
    return complex(out[0]) if scalar else out
