#!/usr/bin/env python3
"""
CRS-NOMA system model
System configuration, SNR grids and every derived constant the closed forms consume.
All internal math is linear; dB only appears at the I/O boundary.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Tuple

from config import Config

_SPLIT_TOLERANCE = 1e-12


class ConfigError(ValueError):
    """Invalid system configuration or SNR grid"""


class InfeasiblePowerSplitError(ValueError):
    """a1 <= eps1 * a2: Theta_1 is negative or divergent"""


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (float(value_db) / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(float(value))


def snr_threshold(rate: float) -> float:
    """eps = 2^{2R} - 1 (two time slots per symbol pair)"""
    return 2.0 ** (2.0 * rate) - 1.0


@dataclass(frozen=True)
class SystemConfig:
    """Channel gains, antenna counts, power split and target rates"""
    omega_sd: float
    omega_sr: float
    omega_rd: float
    n_r: int = 1
    n_d: int = 1
    a1: float = 0.9
    a2: float = 0.1
    r1: float = 1.0
    r2: float = 1.0

    def __post_init__(self):
        for name in ("omega_sd", "omega_sr", "omega_rd"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
        cap = Config.max_antennas()
        for name in ("n_r", "n_d"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
            if value > cap:
                raise ConfigError(f"{name}={value} exceeds the antenna cap {cap} (CRS_NOMA_MAX_ANTENNAS)")
        for name in ("a1", "a2", "r1", "r2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {value!r}")
        if abs(self.a1 + self.a2 - 1.0) > _SPLIT_TOLERANCE:
            raise ConfigError(f"a1 + a2 must equal 1, got {self.a1} + {self.a2}")
        if not self.a1 > self.a2:
            raise ConfigError(f"a1 must exceed a2, got a1={self.a1}, a2={self.a2}")
        if not self.omega_sd < self.omega_sr:
            warnings.warn(
                f"omega_sd={self.omega_sd} is not below omega_sr={self.omega_sr}; "
                "the closed forms still hold but relaying is unusual here",
                UserWarning,
                stacklevel=3,
            )

    @property
    def eps1(self) -> float:
        return snr_threshold(self.r1)

    @property
    def eps2(self) -> float:
        return snr_threshold(self.r2)

    def with_antennas(self, n_r: int, n_d: int) -> "SystemConfig":
        return replace(self, n_r=n_r, n_d=n_d)

    @classmethod
    def reference_default(cls, n_r: int = 1, n_d: int = 1) -> "SystemConfig":
        """Reference system: Omega=(1, 10, 2.5), a2=0.1, R1=R2=1"""
        return cls.from_mapping({**Config.REFERENCE_SYSTEM, "n_r": n_r, "n_d": n_d})

    @classmethod
    def from_mapping(cls, values: Mapping) -> "SystemConfig":
        """Build from a flat mapping (strings allowed); a1 defaults to 1 - a2"""
        unknown = sorted(set(values) - set(Config.SYSTEM_KEYS))
        if unknown:
            raise ConfigError(f"Unknown system keys: {', '.join(unknown)}")
        parsed: Dict[str, object] = {}
        for key, raw in values.items():
            if raw is None or (isinstance(raw, str) and raw.strip() == ""):
                raise ConfigError(f"Missing value for {key}")
            try:
                if key in ("n_r", "n_d"):
                    number = float(raw)
                    if number != int(number):
                        raise ValueError
                    parsed[key] = int(number)
                else:
                    parsed[key] = float(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"Cannot parse {key}={raw!r}")
        missing = [k for k in ("omega_sd", "omega_sr", "omega_rd") if k not in parsed]
        if missing:
            raise ConfigError(f"Missing system keys: {', '.join(missing)}")
        if "a1" not in parsed and "a2" in parsed:
            parsed["a1"] = 1.0 - parsed["a2"]
        elif "a2" not in parsed and "a1" in parsed:
            parsed["a2"] = 1.0 - parsed["a1"]
        return cls(**parsed)

    @classmethod
    def from_file(cls, path: str) -> "SystemConfig":
        return cls.from_mapping(Config.read_system_file(path))


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    eps1: float
    margin: float  # a1 - eps1 * a2
    message: str


def validate_noma_feasibility(cfg: SystemConfig) -> FeasibilityReport:
    """Check a1 > eps1 * a2; otherwise s1 is always in outage"""
    eps1 = cfg.eps1
    margin = cfg.a1 - eps1 * cfg.a2
    if margin > 0.0:
        message = f"feasible: a1={cfg.a1:g} > eps1*a2={eps1 * cfg.a2:g}"
        return FeasibilityReport(True, eps1, margin, message)
    if margin == 0.0:
        message = (
            f"infeasible (boundary): a1={cfg.a1:g} equals eps1*a2; Theta_1 diverges, "
            "s1 outage is 1 at every SNR"
        )
    else:
        message = (
            f"infeasible: a1={cfg.a1:g} < eps1*a2={eps1 * cfg.a2:g}; Theta_1 is negative, "
            "s1 outage is 1 at every SNR"
        )
    return FeasibilityReport(False, eps1, margin, message)


@dataclass(frozen=True)
class DerivedConstants:
    """Thresholds at one transmit SNR plus the rho-free series exponents"""
    cfg: SystemConfig
    rho: float
    eps1: float = field(init=False)
    eps2: float = field(init=False)
    phi: float = field(init=False)
    xi: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ConfigError(f"rho must be positive and finite, got {self.rho!r}")
        cfg = self.cfg
        object.__setattr__(self, "eps1", cfg.eps1)
        object.__setattr__(self, "eps2", cfg.eps2)
        object.__setattr__(self, "phi", 1.0 / cfg.omega_sr + 1.0 / cfg.omega_sd)
        object.__setattr__(self, "xi", 1.0 / (cfg.omega_sr * cfg.a2) + 1.0 / cfg.omega_rd)

    @property
    def feasible(self) -> bool:
        return self.cfg.a1 > self.eps1 * self.cfg.a2

    @property
    def theta1(self) -> float:
        if not self.feasible:
            raise InfeasiblePowerSplitError(validate_noma_feasibility(self.cfg).message)
        return self.eps1 / (self.rho * (self.cfg.a1 - self.eps1 * self.cfg.a2))

    @property
    def theta2(self) -> float:
        return self.eps2 / (self.cfg.a2 * self.rho)

    @property
    def theta(self) -> float:
        return max(self.theta1, self.theta2)

    @property
    def rd_threshold(self) -> float:
        """eps2 / rho, the relay-to-destination outage threshold"""
        return self.eps2 / self.rho

    def chi(self, k: int, j: int) -> float:
        return k / self.cfg.omega_sr + j / self.cfg.omega_sd

    def theta_kj(self, k: int, j: int) -> float:
        return k / (self.cfg.omega_sr * self.cfg.a2) + j / self.cfg.omega_rd


def derive_constants(cfg: SystemConfig, rho: float) -> DerivedConstants:
    return DerivedConstants(cfg, float(rho))


@dataclass(frozen=True)
class SnrGrid:
    """Strictly increasing transmit SNR points (linear), with dB labels"""
    points: Tuple[float, ...]
    labels_db: Tuple[float, ...]

    def __post_init__(self):
        if not self.points:
            raise ConfigError("SNR grid is empty")
        if len(self.points) != len(self.labels_db):
            raise ConfigError("SNR grid points and dB labels differ in length")
        if any(not (math.isfinite(p) and p > 0) for p in self.points):
            raise ConfigError("SNR grid points must be positive and finite")
        if any(b <= a for a, b in zip(self.points, self.points[1:])):
            raise ConfigError("SNR grid must be strictly increasing")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.labels_db, self.points))

    @classmethod
    def from_db(cls, values_db: Iterable[float]) -> "SnrGrid":
        labels = tuple(float(v) for v in values_db)
        return cls(tuple(db_to_linear(v) for v in labels), labels)

    @classmethod
    def from_db_range(cls, start: float, stop: float, step: float) -> "SnrGrid":
        """Inclusive range START..STOP in steps of STEP dB"""
        if not step > 0:
            raise ConfigError(f"SNR step must be positive, got {step}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count <= 0:
            raise ConfigError(f"SNR range {start}:{stop}:{step} is empty")
        # Round labels so 0.1-dB steps print cleanly
        return cls.from_db(round(start + i * step, 10) for i in range(count))

    @classmethod
    def parse(cls, text: str) -> "SnrGrid":
        """Parse START:STOP:STEP (or a comma list of dB values)"""
        text = (text or "").strip()
        if not text:
            raise ConfigError("SNR grid is empty")
        try:
            if ":" in text:
                parts = [float(p) for p in text.split(":")]
                if len(parts) != 3:
                    raise ValueError
                return cls.from_db_range(*parts)
            return cls.from_db(float(p) for p in text.split(",") if p.strip())
        except ValueError:
            raise ConfigError(f"Cannot parse SNR grid {text!r}; expected START:STOP:STEP")


def parse_antennas(text: str) -> List[Tuple[int, int]]:
    """Parse "NrxNd,NrxNd,..." into (n_r, n_d) pairs"""
    pairs: List[Tuple[int, int]] = []
    for chunk in (text or "").split(","):
        chunk = chunk.strip().lower()
        if not chunk:
            continue
        try:
            n_r, n_d = (int(v) for v in chunk.split("x"))
        except ValueError:
            raise ConfigError(f"Cannot parse antenna pair {chunk!r}; expected NrxNd")
        if n_r < 1 or n_d < 1:
            raise ConfigError(f"Antenna counts must be positive, got {chunk!r}")
        pairs.append((n_r, n_d))
    if not pairs:
        raise ConfigError("No antenna configurations given")
    return pairs


def feasibility_lines(cfg: SystemConfig) -> List[str]:
    """Human-readable feasibility diagnostics for the CLI"""
    report = validate_noma_feasibility(cfg)
    lines = [report.message]
    if report.feasible:
        constants = derive_constants(cfg, 1.0)
        lines.append(
            f"Theta_1*rho={constants.theta1:g}, Theta_2*rho={constants.theta2:g}, Theta*rho={constants.theta:g}"
        )
    return lines
