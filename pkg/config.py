import os
from typing import Dict, Optional

import yaml
from dotenv import dotenv_values, load_dotenv

load_dotenv()

_HERE = os.path.dirname(os.path.abspath(__file__))


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}")


class Config:
    # Monte Carlo defaults (overridable per run)
    RATE_TRIALS = _env_int("CRS_NOMA_RATE_TRIALS", 1_000_000)
    OUTAGE_TRIALS = _env_int("CRS_NOMA_OUTAGE_TRIALS", 10_000_000)
    DEFAULT_SEED = _env_int("CRS_NOMA_SEED", 42)
    MC_BLOCK_SIZE = 65_536

    # Quadrature oracle
    QUAD_EPSABS = 1e-10
    QUAD_EPSREL = 1e-12
    QUAD_SEGMENTS = 48

    # Output
    FLOAT_DIGITS = 12

    # Reference system of the figure presets (Omega_sd < Omega_sr)
    REFERENCE_SYSTEM = {
        "omega_sd": 1.0,
        "omega_sr": 10.0,
        "omega_rd": 2.5,
        "a1": 0.9,
        "a2": 0.1,
        "r1": 1.0,
        "r2": 1.0,
    }

    # Keys accepted in a flat key=value system file
    SYSTEM_KEYS = (
        "omega_sd", "omega_sr", "omega_rd",
        "n_r", "n_d", "a1", "a2", "r1", "r2",
    )

    @classmethod
    def max_antennas(cls) -> int:
        """Antenna cap; binomial sums and Gamma(-n, x) stay well conditioned up to 16"""
        cap = _env_int("CRS_NOMA_MAX_ANTENNAS", 16)
        if cap < 1:
            raise ValueError("CRS_NOMA_MAX_ANTENNAS must be at least 1")
        return cap

    @classmethod
    def max_gamma_order(cls) -> int:
        """Largest n for Gamma(-n, x); n = i + j in the MRC sums"""
        return 2 * (cls.max_antennas() - 1)

    @classmethod
    def worker_cap(cls) -> int:
        """Worker limit from CRS_NOMA_THREADS, read on every call"""
        cap = _env_int("CRS_NOMA_THREADS", os.cpu_count() or 1)
        return max(1, cap)

    @classmethod
    def resolve_workers(cls, requested: Optional[int] = None) -> int:
        cap = cls.worker_cap()
        if requested is None:
            return cap
        return max(1, min(int(requested), cap))

    @classmethod
    def presets_path(cls) -> str:
        return os.getenv("CRS_NOMA_PRESETS", os.path.join(_HERE, "crs_presets.yaml"))

    @classmethod
    def load_presets(cls) -> Dict:
        """Load the preset file (system block + named sweep presets)"""
        path = cls.presets_path()
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
        except OSError as e:
            raise OSError(f"Cannot read presets file {path}: {e}")
        data.setdefault("system", dict(cls.REFERENCE_SYSTEM))
        data.setdefault("presets", {})
        return data

    @classmethod
    def read_system_file(cls, path: str) -> Dict[str, str]:
        """Read a flat key=value system file; values stay strings"""
        if not os.path.exists(path):
            raise FileNotFoundError(f"System config file not found: {path}")
        values = dotenv_values(path)
        return {key.strip().lower(): value for key, value in values.items()}
