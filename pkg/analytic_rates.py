#!/usr/bin/env python3
"""
Closed-form average achievable rates for CRS-NOMA
SC: alternating binomial sums of e^{y} Gamma(0, y).
MRC: positive double sums of e^{y} Gamma(-n, y) terms.
Rates are in bits/s/Hz and include the 1/2 pre-log of the two-slot protocol.
"""

import math
from dataclasses import dataclass
from typing import List

from config import Config
from model import SystemConfig, derive_constants
from specfun import UnsupportedOrderError, exp_scaled_expn, exp_scaled_upper_gamma_zero

_PRELOG = 1.0 / (2.0 * math.log(2.0))

SCHEMES = ("NOMA-SC", "NOMA-MRC", "OMA-SC", "OMA-MRC")
METHODS = ("closed-form", "quadrature", "monte-carlo")


class NumericalRegimeError(ArithmeticError):
    """A closed-form rate evaluated negative"""


@dataclass(frozen=True)
class RateResult:
    c_s1: float
    c_s2: float
    c_sum: float
    scheme: str
    method: str

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")

    @classmethod
    def noma(cls, c_s1: float, c_s2: float, combiner: str, method: str) -> "RateResult":
        return cls(c_s1, c_s2, c_s1 + c_s2, f"NOMA-{combiner}", method)

    @classmethod
    def oma(cls, rate: float, combiner: str, method: str) -> "RateResult":
        return cls(rate, 0.0, rate, f"OMA-{combiner}", method)


def _checked(total: float, label: str, rho: float) -> float:
    if not math.isfinite(total) or total < 0.0:
        raise NumericalRegimeError(f"{label} evaluated to {total!r} at rho={rho!r}")
    return total


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not (math.isfinite(rho) and rho > 0.0):
        raise ValueError(f"rho must be positive and finite, got {rho!r}")
    return rho


def _sign_binomial(n_r: int, n_d: int, k: int, j: int) -> int:
    return (-1) ** (k + j) * math.comb(n_r, k) * math.comb(n_d, j)


# --- Selection combining ---------------------------------------------------

def rate_s1_sc(cfg: SystemConfig, rho: float) -> float:
    rho = _check_rho(rho)
    constants = derive_constants(cfg, rho)
    terms: List[float] = []
    for k in range(1, cfg.n_r + 1):
        for j in range(1, cfg.n_d + 1):
            chi = constants.chi(k, j)
            bracket = (
                exp_scaled_upper_gamma_zero(chi / rho)
                - exp_scaled_upper_gamma_zero(chi / (rho * cfg.a2))
            )
            terms.append(_sign_binomial(cfg.n_r, cfg.n_d, k, j) * bracket)
    return _checked(_PRELOG * math.fsum(terms), "rate_s1_sc", rho)


def rate_s2_sc(cfg: SystemConfig, rho: float) -> float:
    rho = _check_rho(rho)
    constants = derive_constants(cfg, rho)
    terms = [
        _sign_binomial(cfg.n_r, cfg.n_d, k, j) * exp_scaled_upper_gamma_zero(constants.theta_kj(k, j) / rho)
        for k in range(1, cfg.n_r + 1)
        for j in range(1, cfg.n_d + 1)
    ]
    return _checked(_PRELOG * math.fsum(terms), "rate_s2_sc", rho)


def rate_sum_sc(cfg: SystemConfig, rho: float) -> RateResult:
    return RateResult.noma(rate_s1_sc(cfg, rho), rate_s2_sc(cfg, rho), "SC", "closed-form")


# --- Maximal-ratio combining -----------------------------------------------
#
# rho^{-n} e^{y} Gamma(-n, y) with y = c / rho equals c^{-n} e^{y} E_{n+1}(y),
# so every term is a bounded weight times e^{y} E_{n+1}(y). The weight
# n! / (i! j! (c u)^i (c v)^j) is formed in log space.

def _check_order(cfg: SystemConfig):
    needed = cfg.n_r + cfg.n_d - 2
    cap = Config.max_gamma_order()
    if needed > cap:
        raise UnsupportedOrderError(f"MRC sums need Gamma(-{needed}, x); supported order is {cap}")


def _log_weight(i: int, j: int, log_p: float, log_q: float) -> float:
    return math.lgamma(i + j + 1) - math.lgamma(i + 1) - math.lgamma(j + 1) + i * log_p + j * log_q


def rate_s1_mrc(cfg: SystemConfig, rho: float) -> float:
    rho = _check_rho(rho)
    _check_order(cfg)
    phi = derive_constants(cfg, rho).phi
    log_p = -math.log(cfg.omega_sr * phi)
    log_q = -math.log(cfg.omega_sd * phi)
    y_direct = phi / rho
    y_weak = phi / (rho * cfg.a2)
    terms: List[float] = []
    for i in range(cfg.n_r):
        for j in range(cfg.n_d):
            n = i + j
            bracket = exp_scaled_expn(n + 1, y_direct) - exp_scaled_expn(n + 1, y_weak)
            terms.append(math.exp(_log_weight(i, j, log_p, log_q)) * bracket)
    return _checked(_PRELOG * math.fsum(terms), "rate_s1_mrc", rho)


def rate_s2_mrc(cfg: SystemConfig, rho: float) -> float:
    rho = _check_rho(rho)
    _check_order(cfg)
    xi = derive_constants(cfg, rho).xi
    log_p = -math.log(cfg.a2 * cfg.omega_sr * xi)
    log_q = -math.log(cfg.omega_rd * xi)
    y = xi / rho
    terms = [
        math.exp(_log_weight(i, j, log_p, log_q)) * exp_scaled_expn(i + j + 1, y)
        for i in range(cfg.n_r)
        for j in range(cfg.n_d)
    ]
    return _checked(_PRELOG * math.fsum(terms), "rate_s2_mrc", rho)


def rate_sum_mrc(cfg: SystemConfig, rho: float) -> RateResult:
    return RateResult.noma(rate_s1_mrc(cfg, rho), rate_s2_mrc(cfg, rho), "MRC", "closed-form")


def rate_result(cfg: SystemConfig, rho: float, combiner: str) -> RateResult:
    """Closed-form NOMA sum rate for the named combiner"""
    combiner = str(combiner).upper()
    if combiner == "SC":
        return rate_sum_sc(cfg, rho)
    if combiner == "MRC":
        return rate_sum_mrc(cfg, rho)
    raise ValueError(f"combiner must be SC or MRC, got {combiner!r}")


def rate_ceiling_s1(cfg: SystemConfig) -> float:
    """Interference-limited ceiling of the s1 rate: 0.5 log2(1/a2)"""
    return 0.5 * math.log2(1.0 / cfg.a2)
