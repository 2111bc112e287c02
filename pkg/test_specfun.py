#!/usr/bin/env python3
"""
Special function tests
Checked against scipy.special and brute-force quadrature
"""

import math
import sys

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from specfun import (
    EULER_GAMMA,
    SpecialFunctionDomainError,
    UnsupportedOrderError,
    exp_scaled_expn,
    exp_scaled_upper_gamma_zero,
    regularized_lower_gamma,
    regularized_upper_gamma,
    scaled_upper_gamma_neg_int,
    upper_gamma_neg_int,
    upper_gamma_zero,
)

X_GRID = (1e-8, 1e-4, 0.01, 0.1, 0.5, 0.99, 1.0, 1.01, 2.0, 5.0, 20.0, 100.0)


def _quad_upper_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt; the part beyond x + 60 is below e^-60 relative"""
    value, _ = quad(lambda t: t ** (a - 1.0) * math.exp(-t), x, x + 60.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return value


def _quad_upper_gamma_log(a: float, x: float) -> float:
    """Gamma(a, x) with t = x e^u: int_0^U x^a e^{a u - x e^u} du, smooth in u even for tiny x"""
    log_x = math.log(x)
    edges = np.linspace(0.0, math.log1p(60.0 / x), 17)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _ = quad(lambda u: math.exp(a * (log_x + u) - x * math.exp(u)), lo, hi,
                        epsabs=0.0, epsrel=1e-13, limit=200)
        total += value
    return total


LOG_GRID = np.geomspace(1e-6, 1e2, 25)


def test_upper_gamma_zero_reference_values():
    assert upper_gamma_zero(1.0) == pytest.approx(0.219383934395520, rel=1e-12)
    assert upper_gamma_zero(0.5) == pytest.approx(0.559773594776161, rel=1e-12)
    assert upper_gamma_zero(1.0) == pytest.approx(_quad_upper_gamma(0.0, 1.0), rel=1e-9)


def test_upper_gamma_zero_matches_scipy():
    for x in X_GRID:
        assert upper_gamma_zero(x) == pytest.approx(special.exp1(x), rel=1e-12), x


def test_upper_gamma_zero_is_decreasing():
    values = [upper_gamma_zero(x) for x in X_GRID]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_exp_scaled_gamma_zero():
    assert exp_scaled_upper_gamma_zero(1.0) == pytest.approx(0.596347362323194, rel=1e-12)
    # Asymptotic tail through 1/x^6
    x = 1e3
    tail = (1 - 1 / x + 2 / x ** 2 - 6 / x ** 3 + 24 / x ** 4 - 120 / x ** 5) / x
    assert exp_scaled_upper_gamma_zero(x) == pytest.approx(tail, rel=1e-9)
    assert 1e4 * exp_scaled_upper_gamma_zero(1e4) == pytest.approx(1.0, rel=1e-3)
    assert exp_scaled_upper_gamma_zero(1e-8) == pytest.approx(-math.log(1e-8) - EULER_GAMMA, abs=1e-6)
    assert math.isfinite(exp_scaled_upper_gamma_zero(1e300))


def test_exp_scaled_expn_matches_scipy():
    for order in range(1, 12):
        for x in (1e-6, 0.05, 0.7, 1.0, 3.0, 12.0, 50.0, 300.0):
            expected = math.exp(x) * special.expn(order, x)
            assert exp_scaled_expn(order, x) == pytest.approx(expected, rel=1e-9), (order, x)


def test_exp_scaled_expn_large_argument():
    x = 1e3
    for order in (1, 3, 8):
        # e^x E_n(x) ~ (1/x) sum_k (-1)^k n(n+1)...(n+k-1) / x^k
        terms, rising = [], 1.0
        for k in range(8):
            terms.append((-1) ** k * rising / x ** k)
            rising *= order + k
        assert exp_scaled_expn(order, x) == pytest.approx(math.fsum(terms) / x, rel=1e-9), order


def test_upper_gamma_neg_int_reference_values():
    assert upper_gamma_neg_int(0, 1.0) == pytest.approx(upper_gamma_zero(1.0), rel=1e-14)
    assert upper_gamma_neg_int(1, 1.0) == pytest.approx(math.exp(-1.0) - upper_gamma_zero(1.0), rel=1e-12)
    assert upper_gamma_neg_int(1, 1.0) == pytest.approx(0.148495506775922, rel=1e-11)
    assert upper_gamma_neg_int(2, 0.5) == pytest.approx(_quad_upper_gamma(-2.0, 0.5), rel=1e-9)


def test_upper_gamma_neg_int_matches_quadrature():
    for n in range(0, 7):
        for x in (0.3, 0.5, 2.0, 10.0, 40.0):
            assert upper_gamma_neg_int(n, x) == pytest.approx(_quad_upper_gamma(-float(n), x), rel=1e-9), (n, x)


def test_upper_gamma_neg_int_matches_scipy_expn():
    for n in range(0, 31, 3):
        for x in (1e-3, 0.2, 1.0, 7.5, 60.0):
            expected = x ** (-n) * special.expn(n + 1, x)
            assert upper_gamma_neg_int(n, x) == pytest.approx(expected, rel=1e-9), (n, x)


def test_scaled_gamma_value_unscales():
    tagged = scaled_upper_gamma_neg_int(2, 3.0)
    assert tagged.is_exp_scaled
    assert tagged.unscaled(3.0) == pytest.approx(upper_gamma_neg_int(2, 3.0), rel=1e-13)
    # e^{-x} underflows quietly
    assert scaled_upper_gamma_neg_int(1, 1e3).unscaled(1e3) == 0.0


def test_regularized_lower_gamma_values():
    assert regularized_lower_gamma(3, 0.0) == 0.0
    assert regularized_lower_gamma(3, 2.0) == pytest.approx(1.0 - 5.0 * math.exp(-2.0), rel=1e-13)
    assert regularized_lower_gamma(3, 2.0) == pytest.approx(0.323323583816936, rel=1e-12)
    for x in (1e-3, 0.4, 3.0, 17.0):
        assert regularized_lower_gamma(1, x) == pytest.approx(-math.expm1(-x), rel=1e-13)
    erlang, _ = quad(lambda t: t * t * math.exp(-t) / 2.0, 0.0, 2.0, epsabs=0.0, epsrel=1e-13)
    assert regularized_lower_gamma(3, 2.0) == pytest.approx(erlang, rel=1e-11)


def test_regularized_gamma_pair_matches_scipy():
    for shape in range(1, 9):
        for x in (1e-3, 0.3, 1.0, 4.0, 9.5, 30.0, 200.0):
            assert regularized_lower_gamma(shape, x) == pytest.approx(special.gammainc(shape, x), rel=1e-10)
            assert regularized_upper_gamma(shape, x) == pytest.approx(special.gammaincc(shape, x), rel=1e-10)
            total = regularized_lower_gamma(shape, x) + regularized_upper_gamma(shape, x)
            assert total == pytest.approx(1.0, abs=1e-14)


def test_regularized_lower_gamma_monotone_to_one():
    values = [regularized_lower_gamma(4, x) for x in (0.0, 0.5, 1.0, 5.0, 10.0, 50.0, 500.0)]
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] == 1.0
    assert regularized_lower_gamma(4, math.inf) == 1.0


def test_domain_errors():
    with pytest.raises(SpecialFunctionDomainError):
        upper_gamma_zero(0.0)
    with pytest.raises(SpecialFunctionDomainError):
        exp_scaled_upper_gamma_zero(-1.0)
    with pytest.raises(SpecialFunctionDomainError):
        upper_gamma_neg_int(-1, 1.0)
    with pytest.raises(SpecialFunctionDomainError):
        upper_gamma_neg_int(1.5, 1.0)
    with pytest.raises(SpecialFunctionDomainError):
        regularized_lower_gamma(0, 1.0)
    with pytest.raises(SpecialFunctionDomainError):
        regularized_lower_gamma(2, -0.1)


def test_recurrence_consistency_on_log_grid():
    # -n Gamma(-n, x) + x^{-n} e^{-x} = Gamma(-n + 1, x); tolerance widens with the cancellation
    for n in range(1, 7):
        for x in LOG_GRID:
            power_term = x ** (-n) * math.exp(-x)
            lhs = -n * upper_gamma_neg_int(n, x) + power_term
            rhs = upper_gamma_neg_int(n - 1, x)
            assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-14 * power_term), (n, x)


def test_scaling_consistency_up_to_600():
    for x in np.geomspace(1e-6, 600.0, 40):
        unscaled = exp_scaled_upper_gamma_zero(x) * math.exp(-x)
        assert unscaled == pytest.approx(upper_gamma_zero(x), rel=1e-12), x


def test_quadrature_agreement_on_log_grid():
    for x in LOG_GRID:
        expected_zero = _quad_upper_gamma_log(0.0, x)
        assert upper_gamma_zero(x) == pytest.approx(expected_zero, rel=1e-9), x
        assert exp_scaled_upper_gamma_zero(x) == pytest.approx(expected_zero * math.exp(x), rel=1e-9), x
        for n in range(0, 7):
            assert upper_gamma_neg_int(n, x) == pytest.approx(_quad_upper_gamma_log(-float(n), x), rel=1e-9), (n, x)
            shape = n + 1
            lower, _ = quad(lambda t: t ** (shape - 1) * math.exp(-t) / math.factorial(shape - 1), 0.0, x,
                             epsabs=0.0, epsrel=1e-13, limit=200)
            assert regularized_lower_gamma(shape, x) == pytest.approx(lower, rel=1e-9), (shape, x)


def test_tiny_argument_high_order_overflows_to_inf():
    assert upper_gamma_neg_int(30, 1e-20) == math.inf
    tagged = scaled_upper_gamma_neg_int(30, 1e-20)
    assert tagged.is_exp_scaled and tagged.value == math.inf
    assert math.isfinite(upper_gamma_neg_int(30, 1e-6))


def test_unsupported_order():
    # Default antenna cap 16 allows n up to 30
    assert upper_gamma_neg_int(30, 5.0) > 0.0
    with pytest.raises(UnsupportedOrderError):
        upper_gamma_neg_int(31, 5.0)
    with pytest.raises(UnsupportedOrderError):
        upper_gamma_neg_int(3, 5.0, max_order=2)


if __name__ == "__main__":
    tests = [(name, fn) for name, fn in list(globals().items()) if name.startswith("test_") and callable(fn)]
    passed = 0
    for name, fn in tests:
        try:
            fn()
            print(f"✅ {name}")
            passed += 1
        except Exception as e:
            print(f"❌ {name}: {e!r}")
    print(f"\n📊 Results: {passed}/{len(tests)} tests passed")
    sys.exit(0 if passed == len(tests) else 1)
