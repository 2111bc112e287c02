#!/usr/bin/env python3
"""
Independent verification engines for CRS-NOMA
1. Adaptive quadrature of the rate integrals over survival functions
2. Seeded Monte Carlo simulation of the two-slot protocol
Both also provide the only evaluation of the OMA baselines.
"""

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from analytic_outage import gain_cdf, gain_density, gain_survival
from config import Config
from model import SystemConfig, derive_constants

OMA_COMBINERS = ("mrc-across-slots", "sc-across-slots")
DEFAULT_OMA_COMBINER = "mrc-across-slots"
QUAD_TARGETS = ("s1_sc", "s2_sc", "s1_mrc", "s2_mrc", "oma_sc", "oma_mrc")

_LN2 = math.log(2.0)


class QuadratureToleranceError(RuntimeError):
    """Adaptive refinement stalled above the requested tolerance"""


def split_scheme(scheme: str) -> Tuple[str, str]:
    """'NOMA-SC' -> ('NOMA', 'SC')"""
    try:
        access, combiner = str(scheme).upper().split("-")
    except ValueError:
        raise ValueError(f"scheme must look like NOMA-SC or OMA-MRC, got {scheme!r}")
    if access not in ("NOMA", "OMA") or combiner not in ("SC", "MRC"):
        raise ValueError(f"Unknown scheme {scheme!r}")
    return access, combiner


def _check_oma_combiner(oma_combiner: str) -> str:
    if oma_combiner not in OMA_COMBINERS:
        raise ValueError(f"oma_combiner must be one of {OMA_COMBINERS}, got {oma_combiner!r}")
    return oma_combiner


# --- Fading draws -------------------------------------------------------------

@dataclass(frozen=True)
class FadingRealization:
    """Per-trial channel statistics; every field is an array over trials"""
    delta_sr: np.ndarray
    delta_sd: np.ndarray
    delta_rd: np.ndarray
    lambda_sr: np.ndarray
    lambda_sd: np.ndarray
    lambda_rd: np.ndarray

    def __len__(self) -> int:
        return int(self.delta_sr.shape[0])

    @property
    def w_sc(self) -> np.ndarray:
        """SC per slot, MRC across the two slots"""
        return np.minimum(self.delta_sr, self.delta_sd + self.delta_rd)

    @property
    def z_mrc(self) -> np.ndarray:
        return np.minimum(self.lambda_sr, self.lambda_sd + self.lambda_rd)

    @property
    def w_sc_degraded(self) -> np.ndarray:
        """SC per slot, then SC across slots"""
        return np.minimum(self.delta_sr, np.maximum(self.delta_sd, self.delta_rd))

    @property
    def z_mrc_degraded(self) -> np.ndarray:
        return np.minimum(self.lambda_sr, np.maximum(self.lambda_sd, self.lambda_rd))

    def gains(self, combiner: str) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if combiner == "SC":
            return self.delta_sr, self.delta_sd, self.delta_rd
        return self.lambda_sr, self.lambda_sd, self.lambda_rd

    def oma_statistic(self, combiner: str, oma_combiner: str = DEFAULT_OMA_COMBINER) -> np.ndarray:
        degraded = _check_oma_combiner(oma_combiner) == "sc-across-slots"
        if combiner == "SC":
            return self.w_sc_degraded if degraded else self.w_sc
        return self.z_mrc_degraded if degraded else self.z_mrc


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one fixed-size block of trials"""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(block),))
    return np.random.Generator(np.random.Philox(sequence))


def _exponential(generator: np.random.Generator, omega: float, shape: Tuple[int, int]) -> np.ndarray:
    # Inverse CDF -omega * ln(U) with U = 1 - u in (0, 1]
    return -omega * np.log1p(-generator.random(shape))


def draw_realizations(cfg: SystemConfig, generator: np.random.Generator, count: int) -> FadingRealization:
    """Draw |h|^2 per antenna and form SC (max) and MRC (sum) statistics from the same draws"""
    h_sr = _exponential(generator, cfg.omega_sr, (count, cfg.n_r))
    h_sd = _exponential(generator, cfg.omega_sd, (count, cfg.n_d))
    h_rd = _exponential(generator, cfg.omega_rd, (count, cfg.n_d))
    return FadingRealization(
        delta_sr=h_sr.max(axis=1),
        delta_sd=h_sd.max(axis=1),
        delta_rd=h_rd.max(axis=1),
        lambda_sr=h_sr.sum(axis=1),
        lambda_sd=h_sd.sum(axis=1),
        lambda_rd=h_rd.sum(axis=1),
    )


def draw_realization(cfg: SystemConfig, generator: np.random.Generator) -> FadingRealization:
    return draw_realizations(cfg, generator, 1)


# --- Per-trial samples -----------------------------------------------------

def _half_log2(snr: np.ndarray) -> np.ndarray:
    return 0.5 * np.log1p(snr) / _LN2


def rate_samples(
    realization: FadingRealization,
    cfg: SystemConfig,
    rho: float,
    scheme: str,
    oma_combiner: str = DEFAULT_OMA_COMBINER,
) -> Tuple[np.ndarray, np.ndarray]:
    """Instantaneous (s1, s2) rates; s2 is zero for OMA"""
    access, combiner = split_scheme(scheme)
    if access == "OMA":
        s1 = _half_log2(rho * realization.oma_statistic(combiner, oma_combiner))
        return s1, np.zeros_like(s1)
    g_sr, g_sd, g_rd = realization.gains(combiner)
    x = np.minimum(g_sr, g_sd)
    s1 = _half_log2(cfg.a1 * rho * x / (1.0 + cfg.a2 * rho * x))
    s2 = _half_log2(rho * np.minimum(cfg.a2 * g_sr, g_rd))
    return s1, s2


@dataclass(frozen=True)
class OutageEvents:
    s1: np.ndarray
    s2: np.ndarray            # union of the three disjoint decode-failure cases
    s2_collapsed: np.ndarray  # gain_sr < Theta or gain_rd < eps2 / rho


def outage_events(realization: FadingRealization, cfg: SystemConfig, rho: float, combiner: str) -> OutageEvents:
    """Simulate the decode chain literally by comparing instantaneous rates with targets"""
    g_sr, g_sd, g_rd = realization.gains(combiner)

    def s1_rate(g):
        return 0.5 * np.log2(1.0 + cfg.a1 * rho * g / (1.0 + cfg.a2 * rho * g))

    relay_s1 = s1_rate(g_sr) >= cfg.r1
    destination_s1 = s1_rate(g_sd) >= cfg.r1
    relay_s2 = 0.5 * np.log2(1.0 + cfg.a2 * rho * g_sr) >= cfg.r2
    destination_s2 = 0.5 * np.log2(1.0 + rho * g_rd) >= cfg.r2

    s1 = ~(relay_s1 & destination_s1)
    relay_fails_s1 = ~relay_s1
    relay_fails_s2 = relay_s1 & ~relay_s2
    destination_fails_s2 = relay_s1 & relay_s2 & ~destination_s2
    s2 = relay_fails_s1 | relay_fails_s2 | destination_fails_s2

    constants = derive_constants(cfg, rho)
    if constants.feasible:
        s2_collapsed = (g_sr < constants.theta) | (g_rd < constants.rd_threshold)
    else:
        s2_collapsed = np.ones_like(s2)
    return OutageEvents(s1=s1, s2=s2, s2_collapsed=s2_collapsed)


# --- Monte Carlo estimates -----------------------------------------------------

@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int

    @classmethod
    def from_sums(cls, total: float, total_sq: float, trials: int, seed: int) -> "McEstimate":
        mean = total / trials
        if trials > 1:
            variance = max(0.0, (total_sq - total * total / trials) / (trials - 1))
        else:
            variance = 0.0
        return cls(mean, math.sqrt(variance / trials), trials, seed)

    @classmethod
    def from_count(cls, count: int, trials: int, seed: int) -> "McEstimate":
        p = count / trials
        return cls(p, math.sqrt(p * (1.0 - p) / trials), trials, seed)


@dataclass(frozen=True)
class McRateEstimate:
    s1: McEstimate
    s2: McEstimate
    sum: McEstimate
    scheme: str


@dataclass(frozen=True)
class McOutageEstimate:
    s1: McEstimate
    s2: McEstimate
    combiner: str


def _block_sizes(trials: int) -> List[int]:
    block = Config.MC_BLOCK_SIZE
    return [min(block, trials - start) for start in range(0, trials, block)]


def _map_blocks(work: Callable[[np.random.Generator, int], Sequence], trials: int, seed: int, workers: int) -> List:
    """Run work(generator, size) per block; results come back in block order"""
    if int(trials) < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    tasks = list(enumerate(_block_sizes(int(trials))))

    def run(task):
        block, size = task
        return work(block_generator(seed, block), size)

    workers = Config.resolve_workers(workers)
    if workers <= 1 or len(tasks) == 1:
        return [run(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(run, tasks))


def mc_rate(
    cfg: SystemConfig,
    rho: float,
    scheme: str,
    trials: int,
    seed: int,
    workers: int = 1,
    oma_combiner: str = DEFAULT_OMA_COMBINER,
) -> McRateEstimate:
    """Mean instantaneous rate (+/- standard error) over seeded fading draws"""
    split_scheme(scheme)
    _check_oma_combiner(oma_combiner)

    def work(generator, size):
        realization = draw_realizations(cfg, generator, size)
        s1, s2 = rate_samples(realization, cfg, rho, scheme, oma_combiner)
        total = s1 + s2
        return (
            float(s1.sum()), float((s1 * s1).sum()),
            float(s2.sum()), float((s2 * s2).sum()),
            float(total.sum()), float((total * total).sum()),
        )

    partials = _map_blocks(work, trials, seed, workers)
    sums = [math.fsum(column) for column in zip(*partials)]
    return McRateEstimate(
        s1=McEstimate.from_sums(sums[0], sums[1], trials, seed),
        s2=McEstimate.from_sums(sums[2], sums[3], trials, seed),
        sum=McEstimate.from_sums(sums[4], sums[5], trials, seed),
        scheme=str(scheme).upper(),
    )


def mc_outage(
    cfg: SystemConfig,
    rho: float,
    combiner: str,
    trials: int,
    seed: int,
    workers: int = 1,
) -> McOutageEstimate:
    """Outage frequencies of s1 and s2 (three-case decomposition) +/- binomial SE"""
    combiner = str(combiner).upper()

    def work(generator, size):
        events = outage_events(draw_realizations(cfg, generator, size), cfg, rho, combiner)
        return int(events.s1.sum()), int(events.s2.sum())

    partials = _map_blocks(work, trials, seed, workers)
    count_s1 = sum(p[0] for p in partials)
    count_s2 = sum(p[1] for p in partials)
    return McOutageEstimate(
        s1=McEstimate.from_count(count_s1, trials, seed),
        s2=McEstimate.from_count(count_s2, trials, seed),
        combiner=combiner,
    )


# --- Quadrature oracle ---------------------------------------------------------

@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error: float
    tail_bound: float
    x_max: float


def _quad(integrand: Callable[[float], float], a: float, b: float, epsabs: float) -> Tuple[float, float]:
    with warnings.catch_warnings():
        # Convergence is judged on the returned error estimate
        warnings.simplefilter("ignore", IntegrationWarning)
        value, error = quad(integrand, a, b, epsabs=epsabs, epsrel=Config.QUAD_EPSREL, limit=200)
    return value, error


def survival_gain_sum(cfg: SystemConfig, combiner: str, x: float) -> float:
    """P(gain_sd + gain_rd > x) = S_sd(x) + int_0^x f_sd(t) S_rd(x - t) dt"""
    if x <= 0.0:
        return 1.0
    head = gain_survival(combiner, cfg.n_d, cfg.omega_sd, x)

    def integrand(t):
        return gain_density(combiner, cfg.n_d, cfg.omega_sd, t) * gain_survival(combiner, cfg.n_d, cfg.omega_rd, x - t)

    body, _ = _quad(integrand, 0.0, x, epsabs=1e-15)
    return min(1.0, head + body)


def cdf_gain_sum(cfg: SystemConfig, combiner: str, x: float) -> float:
    """CDF of gain_sd + gain_rd by one-dimensional convolution quadrature"""
    return 1.0 - survival_gain_sum(cfg, combiner, x)


def _survival_of(cfg: SystemConfig, target: str, oma_combiner: str) -> Tuple[Callable[[float], float], float]:
    """Survival function of the target statistic and a bound on its second moment"""
    combiner = target.split("_")[1].upper()
    sr_moment = cfg.n_r * (cfg.n_r + 1) * cfg.omega_sr ** 2

    def s_sr(x):
        return gain_survival(combiner, cfg.n_r, cfg.omega_sr, x)

    if target.startswith("s1"):
        def survival(x):
            return s_sr(x) * gain_survival(combiner, cfg.n_d, cfg.omega_sd, x)
        return survival, sr_moment

    if target.startswith("s2"):
        def survival(x):
            return s_sr(x / cfg.a2) * gain_survival(combiner, cfg.n_d, cfg.omega_rd, x)
        return survival, sr_moment * cfg.a2 ** 2

    if _check_oma_combiner(oma_combiner) == "sc-across-slots":
        def survival(x):
            f_max = gain_cdf(combiner, cfg.n_d, cfg.omega_sd, x) * gain_cdf(combiner, cfg.n_d, cfg.omega_rd, x)
            return s_sr(x) * (1.0 - f_max)
    else:
        def survival(x):
            s = s_sr(x)
            if s == 0.0:
                return 0.0
            return s * survival_gain_sum(cfg, combiner, x)
    return survival, sr_moment


def _truncation(survival: Callable[[float], float], second_moment: float, epsabs: float) -> Tuple[float, float]:
    """Smallest doubling x_max with S(x_max) < 1e-16 and a small enough tail.

    For x >= x_max the kernel is below 1/x, and int_x^inf S <= sqrt(E[Z^2] S(x)).
    """
    x = 1.0
    for _ in range(80):
        s = survival(x)
        bound = math.sqrt(second_moment * s) / x
        if s < 1e-16 and bound < 0.1 * epsabs:
            return x, bound
        x *= 2.0
    raise QuadratureToleranceError("survival function does not decay; cannot truncate the integral")


def _integrate_rate(kernel: Callable[[float], float], survival: Callable[[float], float],
                    second_moment: float, rho: float, epsabs: float) -> QuadResult:
    x_max, tail = _truncation(survival, second_moment, epsabs)
    lo = min(0.1 / rho, 1e-3 * x_max)
    edges = [0.0] + list(np.geomspace(lo, x_max, Config.QUAD_SEGMENTS))
    segment_eps = epsabs / len(edges)

    def integrand(x):
        return survival(x) * kernel(x)

    values, errors = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        value, error = _quad(integrand, a, b, segment_eps)
        values.append(value)
        errors.append(error)
    total = math.fsum(values) / (2.0 * _LN2)
    error = math.fsum(errors) / (2.0 * _LN2)
    allowed = epsabs + 10.0 * Config.QUAD_EPSREL * abs(total)
    if error > allowed:
        raise QuadratureToleranceError(
            f"quadrature error estimate {error:.3e} exceeds tolerance {allowed:.3e} at rho={rho:g}"
        )
    return QuadResult(total, error + tail, tail, x_max)


def quad_rate_detailed(
    cfg: SystemConfig,
    rho: float,
    which: str,
    oma_combiner: str = DEFAULT_OMA_COMBINER,
    epsabs: float = None,
) -> QuadResult:
    if which not in QUAD_TARGETS:
        raise ValueError(f"which must be one of {QUAD_TARGETS}, got {which!r}")
    rho = float(rho)
    epsabs = Config.QUAD_EPSABS if epsabs is None else epsabs
    survival, second_moment = _survival_of(cfg, which, oma_combiner)

    if which.startswith("s1"):
        # rho/(1+rho x) - rho a2/(1+rho a2 x), combined into one positive kernel
        a2 = cfg.a2

        def kernel(x):
            return rho * (1.0 - a2) / ((1.0 + rho * x) * (1.0 + rho * a2 * x))
    else:
        def kernel(x):
            return rho / (1.0 + rho * x)

    return _integrate_rate(kernel, survival, second_moment, rho, epsabs)


def quad_rate(cfg: SystemConfig, rho: float, which: str, oma_combiner: str = DEFAULT_OMA_COMBINER) -> float:
    """Rate in bits/s/Hz by adaptive Gauss-Kronrod quadrature"""
    return quad_rate_detailed(cfg, rho, which, oma_combiner).value
