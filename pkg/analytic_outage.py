#!/usr/bin/env python3
"""
Closed-form outage probabilities for CRS-NOMA with SC or MRC
Order-statistic (SC) and Gamma (MRC) channel-gain distributions, outage of
both symbols, and the high-SNR diversity asymptotes.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from model import DerivedConstants, InfeasiblePowerSplitError, SystemConfig, derive_constants, validate_noma_feasibility
from specfun import SpecialFunctionDomainError, regularized_lower_gamma, regularized_upper_gamma

COMBINERS = ("SC", "MRC")


def _check_combiner(combiner: str) -> str:
    combiner = str(combiner).upper()
    if combiner not in COMBINERS:
        raise ValueError(f"combiner must be one of {COMBINERS}, got {combiner!r}")
    return combiner


def _check_argument(x: float) -> float:
    x = float(x)
    if x < 0.0 or math.isnan(x):
        raise SpecialFunctionDomainError(f"x must be >= 0, got {x}")
    return x


# --- Channel-gain distributions -------------------------------------------

def cdf_sc_gain(n: int, omega: float, x: float) -> float:
    """CDF of the max of n exponential gains with mean omega: (1 - e^{-x/omega})^n"""
    x = _check_argument(x)
    if x == 0.0:
        return 0.0
    return (-math.expm1(-x / omega)) ** n


def cdf_sc_gain_series(n: int, omega: float, x: float) -> float:
    """Alternating binomial form 1 + sum_k (-1)^k C(n,k) e^{-kx/omega}; cross-check only"""
    x = _check_argument(x)
    terms = [1.0] + [(-1) ** k * math.comb(n, k) * math.exp(-k * x / omega) for k in range(1, n + 1)]
    return math.fsum(terms)


def survival_sc_gain(n: int, omega: float, x: float) -> float:
    """1 - (1 - e^{-x/omega})^n without cancellation in either tail"""
    x = _check_argument(x)
    if x == 0.0:
        return 1.0
    return -math.expm1(n * math.log1p(-math.exp(-x / omega)))


def density_sc_gain(n: int, omega: float, x: float) -> float:
    if x < 0.0:
        return 0.0
    decay = math.exp(-x / omega)
    return n / omega * decay * (-math.expm1(-x / omega)) ** (n - 1)


def mean_sc_gain(n: int, omega: float) -> float:
    """E[max of n exponentials] = omega * H_n"""
    return omega * math.fsum(1.0 / k for k in range(1, n + 1))


def cdf_mrc_gain(n: int, omega: float, x: float) -> float:
    """CDF of a sum of n exponential gains (Gamma, shape n, scale omega)"""
    x = _check_argument(x)
    return regularized_lower_gamma(n, x / omega)


def survival_mrc_gain(n: int, omega: float, x: float) -> float:
    x = _check_argument(x)
    return regularized_upper_gamma(n, x / omega)


def density_mrc_gain(n: int, omega: float, x: float) -> float:
    if x < 0.0:
        return 0.0
    if x == 0.0:
        return 1.0 / omega if n == 1 else 0.0
    return math.exp((n - 1) * math.log(x) - x / omega - n * math.log(omega) - math.lgamma(n))


def gain_cdf(combiner: str, n: int, omega: float, x: float) -> float:
    if _check_combiner(combiner) == "SC":
        return cdf_sc_gain(n, omega, x)
    return cdf_mrc_gain(n, omega, x)


def gain_survival(combiner: str, n: int, omega: float, x: float) -> float:
    if _check_combiner(combiner) == "SC":
        return survival_sc_gain(n, omega, x)
    return survival_mrc_gain(n, omega, x)


def gain_density(combiner: str, n: int, omega: float, x: float) -> float:
    if _check_combiner(combiner) == "SC":
        return density_sc_gain(n, omega, x)
    return density_mrc_gain(n, omega, x)


def _union(p: float, q: float) -> float:
    """P(A or B) for independent events"""
    return p + q - p * q


# --- Outage probabilities ---------------------------------------------------

@dataclass(frozen=True)
class OutagePoint:
    p_out_s1: float
    p_out_s2: float
    rho: float
    scheme: str  # SC | MRC
    method: str  # closed-form | monte-carlo | asymptote
    feasible: bool = True


def outage_s1(cfg: SystemConfig, rho: float, combiner: str) -> float:
    """P(min(gain_sr, gain_sd) < Theta_1); exactly 1 for an infeasible split"""
    combiner = _check_combiner(combiner)
    constants = derive_constants(cfg, rho)
    if not constants.feasible:
        return 1.0
    theta1 = constants.theta1
    f_sr = gain_cdf(combiner, cfg.n_r, cfg.omega_sr, theta1)
    f_sd = gain_cdf(combiner, cfg.n_d, cfg.omega_sd, theta1)
    return _union(f_sr, f_sd)


def outage_s2(cfg: SystemConfig, rho: float, combiner: str) -> float:
    """P(gain_sr < Theta or gain_rd < eps2/rho), Theta = max(Theta_1, Theta_2).

    With an infeasible split the relay never decodes s1, so SIC and hence
    s2 always fail: the result is exactly 1.
    """
    combiner = _check_combiner(combiner)
    constants = derive_constants(cfg, rho)
    if not constants.feasible:
        return 1.0
    f_sr = gain_cdf(combiner, cfg.n_r, cfg.omega_sr, constants.theta)
    f_rd = gain_cdf(combiner, cfg.n_d, cfg.omega_rd, constants.rd_threshold)
    return _union(f_sr, f_rd)


def outage_point(cfg: SystemConfig, rho: float, combiner: str) -> OutagePoint:
    combiner = _check_combiner(combiner)
    return OutagePoint(
        p_out_s1=outage_s1(cfg, rho, combiner),
        p_out_s2=outage_s2(cfg, rho, combiner),
        rho=float(rho),
        scheme=combiner,
        method="closed-form",
        feasible=validate_noma_feasibility(cfg).feasible,
    )


# --- Diversity asymptotes ---------------------------------------------------

@dataclass(frozen=True)
class DiversityAsymptote:
    """Outage ~ coefficient * rho^{-order} as rho -> infinity"""
    coefficient: float
    order: int

    def __iter__(self):
        return iter((self.coefficient, self.order))

    def at(self, rho: float) -> float:
        return self.coefficient * float(rho) ** (-self.order)


def _leading_cdf_factor(combiner: str, n: int) -> Fraction:
    """c_n in F(t/rho) = c_n (t/omega)^n rho^{-n} + O(rho^{-n-1})"""
    if combiner == "SC":
        # Lowest surviving power of the alternating binomial expansion
        stirling = sum(math.comb(n, k) * (-1) ** k * k ** n for k in range(1, n + 1))
        return Fraction((-1) ** n * stirling, math.factorial(n))
    # gamma(n, t) / Gamma(n) = t^n / n! + O(t^{n+1})
    return Fraction(1, math.factorial(n))


def _link_term(combiner: str, n: int, omega: float, scaled_threshold: float) -> float:
    return float(_leading_cdf_factor(combiner, n)) * (scaled_threshold / omega) ** n


def _require_feasible(cfg: SystemConfig) -> DerivedConstants:
    constants = derive_constants(cfg, 1.0)
    if not constants.feasible:
        raise InfeasiblePowerSplitError(validate_noma_feasibility(cfg).message)
    return constants


def diversity_asymptote_s1(cfg: SystemConfig, combiner: str) -> DiversityAsymptote:
    """Leading term of outage_s1; the cross term decays at order n_r + n_d and drops out"""
    combiner = _check_combiner(combiner)
    unit = _require_feasible(cfg)
    order = min(cfg.n_r, cfg.n_d)
    coefficient = 0.0
    if cfg.n_r == order:
        coefficient += _link_term(combiner, cfg.n_r, cfg.omega_sr, unit.theta1)
    if cfg.n_d == order:
        coefficient += _link_term(combiner, cfg.n_d, cfg.omega_sd, unit.theta1)
    return DiversityAsymptote(coefficient, order)


def diversity_asymptote_s2(cfg: SystemConfig, combiner: str) -> DiversityAsymptote:
    combiner = _check_combiner(combiner)
    unit = _require_feasible(cfg)
    order = min(cfg.n_r, cfg.n_d)
    coefficient = 0.0
    if cfg.n_r == order:
        coefficient += _link_term(combiner, cfg.n_r, cfg.omega_sr, unit.theta)
    if cfg.n_d == order:
        coefficient += _link_term(combiner, cfg.n_d, cfg.omega_rd, unit.rd_threshold)
    return DiversityAsymptote(coefficient, order)


def outage_asymptote(cfg: SystemConfig, rho: float, combiner: str) -> OutagePoint:
    """High-SNR straight lines for both symbols, capped at 1"""
    combiner = _check_combiner(combiner)
    s1 = diversity_asymptote_s1(cfg, combiner)
    s2 = diversity_asymptote_s2(cfg, combiner)
    return OutagePoint(
        p_out_s1=min(1.0, s1.at(rho)),
        p_out_s2=min(1.0, s2.at(rho)),
        rho=float(rho),
        scheme=combiner,
        method="asymptote",
    )


def loglog_slope(rhos, probabilities) -> float:
    """Least-squares slope of log10(p) against log10(rho)"""
    x = np.log10(np.asarray(rhos, dtype=float))
    y = np.log10(np.asarray(probabilities, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
