#!/usr/bin/env python3
"""
Special functions for the CRS-NOMA closed forms
Exponential integrals E_n, Gamma(0, x), Gamma(-n, x) and the regularized
incomplete gamma pair for integer shape.

The series / continued fraction pair follows "Numerical Recipes",
chapter 6 (expint, gser). Everything here is pure and reentrant.
"""

import math
from dataclasses import dataclass
from typing import Optional

from config import Config

EULER_GAMMA = 0.57721566490153286061
_EPS = 1.0e-16
_FPMIN = 1.0e-300
_MAX_ITER = 10_000
# Series / continued-fraction switch point for E_n
_SWITCH_X = 1.0
# Digits the forward E_n recurrence may lose before falling back
_MAX_LOST_DIGITS = 4.0


class SpecialFunctionDomainError(ValueError):
    """Argument outside the domain of the requested function"""


class UnsupportedOrderError(ValueError):
    """Order beyond the configured Gamma(-n, x) cap"""


@dataclass(frozen=True)
class ScaledGammaValue:
    """Gamma(., x) or e^x * Gamma(., x), tagged so callers know which"""
    value: float
    is_exp_scaled: bool

    def unscaled(self, x: float) -> float:
        if not self.is_exp_scaled:
            return self.value
        # e^{-x} underflows quietly to 0 for x > ~745
        return self.value * math.exp(-x)


def _require_positive(x: float, name: str = "x") -> float:
    x = float(x)
    if not x > 0.0 or math.isnan(x):
        raise SpecialFunctionDomainError(f"{name} must be > 0, got {x}")
    return x


def _require_order(order: int, minimum: int) -> int:
    if isinstance(order, bool) or int(order) != order:
        raise SpecialFunctionDomainError(f"order must be an integer, got {order!r}")
    order = int(order)
    if order < minimum:
        raise SpecialFunctionDomainError(f"order must be >= {minimum}, got {order}")
    return order


def _expn_series(order: int, x: float) -> float:
    """E_order(x) by power series, 0 < x <= 1"""
    nm1 = order - 1
    total = 1.0 / nm1 if nm1 != 0 else -math.log(x) - EULER_GAMMA
    fact = 1.0
    for i in range(1, _MAX_ITER + 1):
        fact *= -x / i
        if i != nm1:
            delta = -fact / (i - nm1)
        else:
            psi = -EULER_GAMMA + math.fsum(1.0 / k for k in range(1, nm1 + 1))
            delta = fact * (-math.log(x) + psi)
        total += delta
        if abs(delta) < abs(total) * _EPS:
            return total
    raise ArithmeticError(f"E_{order} series did not converge at x={x}")


def _expn_scaled_cf(order: int, x: float) -> float:
    """e^x * E_order(x) by modified Lentz continued fraction, x > 1"""
    nm1 = order - 1
    b = x + order
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (nm1 + i)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E_{order} continued fraction did not converge at x={x}")


def _expn_scaled_direct(order: int, x: float) -> float:
    if x <= _SWITCH_X:
        return math.exp(x) * _expn_series(order, x)
    return _expn_scaled_cf(order, x)


def upper_gamma_zero(x: float) -> float:
    """Gamma(0, x) = E_1(x) = -Ei(-x)"""
    x = _require_positive(x)
    if x <= _SWITCH_X:
        return _expn_series(1, x)
    return _expn_scaled_cf(1, x) * math.exp(-x)


def exp_scaled_upper_gamma_zero(x: float) -> float:
    """e^x * Gamma(0, x), finite for any x up to ~1e300"""
    x = _require_positive(x)
    return _expn_scaled_direct(1, x)


def exp_scaled_expn(order: int, x: float) -> float:
    """e^x * E_order(x) for integer order >= 1.

    Forward recurrence S_{k+1} = (1 - x S_k) / k from S_1 = e^x E_1(x).
    When 1 - x S_k cancels (large x) the accumulated digit loss is
    tracked and the value is recomputed directly once it reaches 4 digits.
    """
    order = _require_order(order, 1)
    x = _require_positive(x)
    scaled = _expn_scaled_direct(1, x)
    lost_digits = 0.0
    for k in range(1, order):
        residual = 1.0 - x * scaled
        if residual <= 0.0:
            return _expn_scaled_direct(order, x)
        if residual < 1.0:
            lost_digits += -math.log10(residual)
            if lost_digits >= _MAX_LOST_DIGITS:
                return _expn_scaled_direct(order, x)
        scaled = residual / k
    return scaled


def upper_gamma_neg_int(n: int, x: float, max_order: Optional[int] = None) -> float:
    """Gamma(-n, x) = x^{-n} E_{n+1}(x) for integer n >= 0"""
    n = _require_order(n, 0)
    x = _require_positive(x)
    cap = Config.max_gamma_order() if max_order is None else max_order
    if n > cap:
        raise UnsupportedOrderError(
            f"Gamma(-{n}, x) exceeds the supported order {cap}; raise CRS_NOMA_MAX_ANTENNAS"
        )
    scaled = exp_scaled_expn(n + 1, x)
    try:
        return scaled * math.exp(-x - n * math.log(x))
    except OverflowError:
        # x^{-n} beyond the float range (tiny x, large n)
        return math.inf


def scaled_upper_gamma_neg_int(n: int, x: float, max_order: Optional[int] = None) -> ScaledGammaValue:
    """e^x * Gamma(-n, x) as a tagged value"""
    n = _require_order(n, 0)
    x = _require_positive(x)
    cap = Config.max_gamma_order() if max_order is None else max_order
    if n > cap:
        raise UnsupportedOrderError(f"Gamma(-{n}, x) exceeds the supported order {cap}")
    try:
        power = x ** (-n)
    except OverflowError:
        power = math.inf
    return ScaledGammaValue(exp_scaled_expn(n + 1, x) * power, True)


def _lower_gamma_series(shape: int, x: float) -> float:
    """P(shape, x) by the gser series, used where P itself is small"""
    term = 1.0 / shape
    total = term
    ap = float(shape)
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(shape * math.log(x) - x - math.lgamma(shape))


def _erlang_tail(shape: int, x: float) -> float:
    """Q(shape, x) = e^{-x} sum_{m<shape} x^m / m!, terms formed in log space"""
    log_x = math.log(x)
    return math.fsum(math.exp(m * log_x - x - math.lgamma(m + 1)) for m in range(shape))


def regularized_lower_gamma(shape: int, x: float) -> float:
    """P(shape, x) = gamma(shape, x) / Gamma(shape) for integer shape >= 1"""
    shape = _require_order(shape, 1)
    x = float(x)
    if x < 0.0 or math.isnan(x):
        raise SpecialFunctionDomainError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < shape + 1.0:
        return min(1.0, _lower_gamma_series(shape, x))
    return 1.0 - _erlang_tail(shape, x)


def regularized_upper_gamma(shape: int, x: float) -> float:
    """Q(shape, x) = 1 - P(shape, x), accurate in the far tail"""
    shape = _require_order(shape, 1)
    x = float(x)
    if x < 0.0 or math.isnan(x):
        raise SpecialFunctionDomainError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < shape + 1.0:
        return max(0.0, 1.0 - _lower_gamma_series(shape, x))
    return _erlang_tail(shape, x)
