import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from klorth.ppoly import (
    ExactPoly, double_factorial, gen_series_eval, l_rec_laguerre_residual, l_rec_shift_residual,
    l_table, laguerre_exact, laguerre_integral, p_alt_routes, p_chain,
)

F = Fraction


def test_first_polynomials():
    p = p_chain(5)
    assert p[0].coeffs == (F(1),)
    assert p[1].coeffs == (0, -1)
    assert p[2].coeffs == (0, -1, 3)
    assert p[3].coeffs == (0, -1, 15, -15)
    assert p[5].leading == -945


@pytest.mark.parametrize("n", range(21))
def test_alternative_routes_agree(n):
    diff_route, resid = p_alt_routes(n)
    assert diff_route.coeffs == p_chain(n)[n].coeffs
    assert resid.is_zero()


@pytest.mark.parametrize("n", range(1, 16))
def test_structure(n):
    p = p_chain(n)[n]
    assert p.degree == n
    assert p.coeff(0) == 0
    assert p.leading == (-1) ** n * double_factorial(2 * n - 1)
    # coefficients alternate in sign: (-1)^j c_j > 0
    assert all((-1) ** j * c > 0 for j, c in enumerate(p.coeffs) if j >= 1)


def test_range_guard():
    with pytest.raises(ValueError):
        p_chain(65)
    with pytest.raises(ValueError):
        p_alt_routes(-1)


def test_laguerre():
    assert laguerre_exact(2).coeffs == (1, -2, F(1, 2))
    for k in range(2, 12):
        lhs = laguerre_exact(k) * (k)
        rhs = (laguerre_exact(k - 1) * (2 * k - 1) - laguerre_exact(k - 1).shift_up()
               - laguerre_exact(k - 2) * (k - 1))
        assert (lhs - rhs).is_zero()


def test_laguerre_orthonormal():
    for j in range(6):
        for k in range(6):
            assert laguerre_integral(laguerre_exact(j) * laguerre_exact(k)) == (j == k)


def test_l_table_values():
    t = l_table(12, 12)
    assert t[1, 0] == -1
    assert t[2, 1] == -3
    assert t[1, 2] == 0
    for m in range(1, 13):
        for k in range(m, 13):
            assert t[m, k] == 0
    for n in range(1, 11):
        assert t[n, n - 1] == -double_factorial(2 * n - 1) * math.factorial(n - 1)


def test_double_factorial():
    assert [double_factorial(n) for n in (-1, 0, 1, 5, 7, 8)] == [1, 1, 1, 15, 105, 384]


def test_laguerre_recurrence_exact():
    t = l_table(13, 12)
    for m in range(1, 13):
        for k in range(0, 11):
            assert l_rec_laguerre_residual(t, m, k) == 0


def test_row_recurrence_corrected():
    t = l_table(13, 12)
    for m in range(2, 13):
        for k in range(0, 11):
            assert l_rec_shift_residual(t, m, k, "corrected") == 0
    assert l_rec_shift_residual(t, 1, 0, "corrected") != 0


def test_row_recurrence_printed_is_not_exact():
    t = l_table(13, 12)
    assert any(l_rec_shift_residual(t, m, k, "printed") != 0 for m in range(2, 13) for k in range(11))
    with pytest.raises(ValueError):
        l_rec_shift_residual(t, 2, 0, "other")


@pytest.mark.parametrize("x", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("y", [0.0, 0.1, -0.15, 0.2])
def test_generating_function(x, y):
    assert abs(gen_series_eval(x, y, 12) - math.exp(-2 * x * math.sinh(y / 2) ** 2)) <= 1e-12


def test_generating_function_guard():
    with pytest.raises(ValueError):
        gen_series_eval(1.0, 0.6, 12)


def test_exact_poly_arithmetic():
    a = ExactPoly([1, 2])
    b = ExactPoly([0, 1])
    assert (a * b).coeffs == (0, 1, 2)
    assert (a - a).is_zero()
    assert a(F(1, 2)) == 2
    assert a.shift_up().shift_down().coeffs == a.coeffs
    assert ExactPoly([3, 0, 5]).deriv().coeffs == (0, 10)
    assert ExactPoly([1, 2, 0, 0]).degree == 1
    np.testing.assert_array_equal(ExactPoly([F(1, 4), 2]).to_float(), [0.25, 2.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 14), st.fractions(-3, 3, max_denominator=20))
def test_differential_equation(n, x):
    # p_{n+1} = x^2 p_n'' + x(1 - 2x) p_n' - x p_n
    p = p_chain(n + 1)
    d = p[n].deriv()
    rhs = x * x * d.deriv()(x) + x * (1 - 2 * x) * d(x) - x * p[n](x)
    assert p[n + 1](x) == rhs


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 12))
def test_l_entries_are_integers(m, k):
    assert l_table(12, 12)[m, k].denominator == 1
