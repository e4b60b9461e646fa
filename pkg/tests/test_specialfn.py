import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ossp.specialfn import (
    log_gen_factorial,
    log_gen_factorial_scaled_row,
    log_noncentral_gf_scaled,
    log_noncentral_gf_scaled_row,
    log_rising,
)

from oracles import gfc_exact, gfc_nc_exact, rising_frac


def test_log_rising_empty_product():
    assert log_rising(3.7, 0) == 0.0
    assert log_rising(1e-9, 0) == 0.0


def test_log_rising_factorial():
    assert log_rising(1.0, 5) == pytest.approx(math.log(120.0), rel=1e-14)


def test_log_rising_matches_direct_product():
    direct = 1.0
    for i in range(7):
        direct *= 2.5 + i
    assert math.exp(log_rising(2.5, 7)) == pytest.approx(direct, rel=1e-12)


def test_log_rising_large_r_uses_lgamma():
    v = log_rising(2.0, 500)
    exact_log = sum(math.log(2 + i) for i in range(500))
    assert v == pytest.approx(exact_log, rel=1e-13)


def test_log_rising_domain_errors():
    with pytest.raises(ValueError):
        log_rising(0.0, 1)
    with pytest.raises(ValueError):
        log_rising(-0.5, 2)
    with pytest.raises(ValueError):
        log_rising(1.0, -1)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(1e-3, 100.0), r=st.integers(0, 150), s=st.integers(0, 150))
def test_log_rising_additivity(a, r, s):
    lhs = log_rising(a, r + s)
    rhs = log_rising(a, r) + log_rising(a + r, s)
    assert lhs == pytest.approx(rhs, abs=1e-12, rel=1e-12)


def test_gen_factorial_single_step():
    assert log_gen_factorial(1, 1, 0.5) == pytest.approx(math.log(0.5), abs=1e-14)


def test_gen_factorial_alternating_sum():
    got = math.exp(log_gen_factorial(4, 2, 0.25))
    want = float(gfc_exact(4, 2, Fraction(1, 4)))
    assert got == pytest.approx(want, rel=1e-12)


def test_gen_factorial_zero_cells():
    assert log_gen_factorial(3, 0, 0.5) == -math.inf
    row = log_gen_factorial_scaled_row(5, 0.5)
    assert row[0] == -math.inf
    assert np.all(np.isfinite(row[1:]))


def test_gen_factorial_domain_errors():
    with pytest.raises(ValueError):
        log_gen_factorial(4, 2, 0.0)
    with pytest.raises(ValueError):
        log_gen_factorial(4, 2, 1.0)
    with pytest.raises(ValueError):
        log_gen_factorial(4, 5, 0.5)


@pytest.mark.parametrize("alpha", [Fraction(1, 4), Fraction(1, 2), Fraction(7, 10)])
def test_gen_factorial_recurrence_vs_exact(alpha):
    for n in range(1, 13):
        row = log_gen_factorial_scaled_row(n, float(alpha))
        for k in range(1, n + 1):
            want = gfc_exact(n, k, alpha) / alpha ** k
            assert math.exp(row[k]) == pytest.approx(float(want), rel=1e-10)


def test_gen_factorial_scaled_row_dp_limit_is_stirling():
    # unsigned Stirling numbers of the first kind for n = 5: 24, 50, 35, 10, 1
    row = log_gen_factorial_scaled_row(5, 0.0)
    want = [24.0, 50.0, 35.0, 10.0, 1.0]
    got = [math.exp(v) for v in row[1:]]
    assert got == pytest.approx(want, rel=1e-12)


def test_noncentral_one_step():
    assert log_noncentral_gf_scaled(1, 1, 0.4, -3.0) == pytest.approx(0.0, abs=1e-14)


def test_noncentral_s0_is_rising():
    assert math.exp(log_noncentral_gf_scaled(3, 0, 0.4, -2.0)) == pytest.approx(24.0, rel=1e-13)


def test_noncentral_alternating_sum():
    got = math.exp(log_noncentral_gf_scaled(5, 2, 0.5, -4.0))
    want = gfc_nc_exact(5, 2, Fraction(1, 2), Fraction(-4)) / Fraction(1, 4)
    assert got == pytest.approx(float(want), rel=1e-12)


def test_noncentral_domain_errors():
    with pytest.raises(ValueError):
        log_noncentral_gf_scaled(3, 1, 0.4, 0.0)
    with pytest.raises(ValueError):
        log_noncentral_gf_scaled(3, 4, 0.4, -1.0)
    with pytest.raises(ValueError):
        log_noncentral_gf_scaled_row(3, -0.1, -1.0)


@pytest.mark.parametrize("alpha,gamma", [
    (Fraction(1, 4), Fraction(-7, 2)),
    (Fraction(1, 2), Fraction(-1)),
])
def test_noncentral_recurrence_vs_exact(alpha, gamma):
    for m in range(0, 13):
        row = log_noncentral_gf_scaled_row(m, float(alpha), float(gamma))
        for s in range(0, m + 1):
            want = gfc_nc_exact(m, s, alpha, gamma) / alpha ** s
            assert math.exp(row[s]) == pytest.approx(float(want), rel=1e-10)


def test_noncentral_dp_limit_vs_symbolic():
    # alpha -> 0 limit of C(m,s;alpha,gamma)/alpha^s, extracted symbolically
    import sympy

    a = sympy.Symbol("a")
    gamma = sympy.Rational(-5, 2)
    for m in range(0, 9):
        row = log_noncentral_gf_scaled_row(m, 0.0, float(gamma))
        for s in range(0, m + 1):
            expr = sympy.Integer(0)
            for i in range(s + 1):
                term = sympy.Integer(1)
                for j in range(m):
                    term *= -i * a - gamma + j
                expr += sympy.binomial(s, i) * (-1) ** i * term
            poly = sympy.Poly(sympy.expand(expr / sympy.factorial(s)), a)
            want = poly.coeff_monomial(a ** s) if s > 0 else poly.coeff_monomial(1)
            assert math.exp(row[s]) == pytest.approx(float(want), rel=1e-10)
