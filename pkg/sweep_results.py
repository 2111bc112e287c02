#!/usr/bin/env python3
"""
CRS-NOMA Sweep Results
Result table for rate/outage sweeps, CSV/JSON emission and the summary report
"""

import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import pandas as pd

from config import Config

COLUMNS = (
    "scheme", "combiner", "n_r", "n_d", "rho_db", "method",
    "c_s1", "c_s2", "c_sum", "p_out_s1", "p_out_s2",
    "se_c_s1", "se_c_s2", "se_c_sum", "se_p_out_s1", "se_p_out_s2",
    "seed", "trials",
)
SCHEMA_HEADER = ",".join(COLUMNS)
FORMATS = ("csv", "json")

_TEXT_COLUMNS = ("scheme", "combiner", "method")
_INT_COLUMNS = ("n_r", "n_d")
_NULLABLE_INT_COLUMNS = ("seed", "trials")
_FLOAT_COLUMNS = tuple(c for c in COLUMNS if c not in _TEXT_COLUMNS + _INT_COLUMNS + _NULLABLE_INT_COLUMNS)


@dataclass
class SweepRow:
    """One (configuration, SNR point, method) result; unused columns stay None"""
    scheme: str    # NOMA | OMA
    combiner: str  # SC | MRC
    n_r: int
    n_d: int
    rho_db: float
    method: str    # closed-form | quadrature | monte-carlo | asymptote
    c_s1: Optional[float] = None
    c_s2: Optional[float] = None
    c_sum: Optional[float] = None
    p_out_s1: Optional[float] = None
    p_out_s2: Optional[float] = None
    se_c_s1: Optional[float] = None
    se_c_s2: Optional[float] = None
    se_c_sum: Optional[float] = None
    se_p_out_s1: Optional[float] = None
    se_p_out_s2: Optional[float] = None
    seed: Optional[int] = None
    trials: Optional[int] = None


def _round_sig(value: Optional[float]) -> Optional[float]:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return float(f"{value:.{Config.FLOAT_DIGITS}g}")


def _clean(value):
    """pandas NA/NaN -> None, numpy scalars -> Python scalars"""
    if value is None or value is pd.NA:
        return None
    if isinstance(value, float) and math.isnan(value):
        return None
    if hasattr(value, "item"):
        return value.item()
    return value


class SweepResult:
    """Ordered rows of a sweep, in declared sweep order"""

    def __init__(self, rows: Iterable[SweepRow] = ()):
        self.rows: List[SweepRow] = list(rows)

    def __len__(self) -> int:
        return len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(r) for r in self.rows], columns=list(COLUMNS))
        for column in _FLOAT_COLUMNS:
            frame[column] = frame[column].astype("float64")
        for column in _INT_COLUMNS:
            frame[column] = frame[column].astype("int64")
        for column in _NULLABLE_INT_COLUMNS:
            frame[column] = frame[column].astype("Int64")
        return frame

    # --- Emission -----------------------------------------------------------

    def emit(self, fmt: str = "csv") -> bytes:
        """Serialize as CSV (header + one line per row) or a JSON array of row objects"""
        if fmt == "csv":
            buffer = io.StringIO()
            self.to_frame().to_csv(
                buffer,
                index=False,
                float_format=f"%.{Config.FLOAT_DIGITS}g",
                na_rep="",
                lineterminator="\n",
            )
            return buffer.getvalue().encode("utf-8")
        if fmt == "json":
            records = []
            for row in self.rows:
                record = asdict(row)
                for column in _FLOAT_COLUMNS:
                    record[column] = _round_sig(record[column])
                records.append(record)
            return (json.dumps(records, indent=2) + "\n").encode("utf-8")
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")

    @classmethod
    def parse(cls, data: bytes, fmt: str = "csv") -> "SweepResult":
        if fmt == "csv":
            header = data.split(b"\n", 1)[0].decode("utf-8").strip()
            if header != SCHEMA_HEADER:
                raise ValueError(f"unexpected CSV header: {header}")
            frame = pd.read_csv(
                io.BytesIO(data),
                dtype={c: str for c in _TEXT_COLUMNS},
                keep_default_na=False,
                na_values=[""],
                float_precision="round_trip",
            )
            rows = [
                SweepRow(**{column: _clean(record[column]) for column in COLUMNS})
                for record in frame.to_dict("records")
            ]
        elif fmt == "json":
            rows = [SweepRow(**record) for record in json.loads(data.decode("utf-8"))]
        else:
            raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
        for row in rows:
            row.n_r, row.n_d = int(row.n_r), int(row.n_d)
            row.rho_db = float(row.rho_db)
            for column in _FLOAT_COLUMNS:
                value = getattr(row, column)
                setattr(row, column, None if value is None else float(value))
            for column in _NULLABLE_INT_COLUMNS:
                value = getattr(row, column)
                setattr(row, column, None if value is None else int(value))
        return cls(rows)

    def write(self, path: str, fmt: str = "csv"):
        """Write emitted bytes to path; I/O errors name the path"""
        payload = self.emit(fmt)
        try:
            with open(path, "wb") as f:
                f.write(payload)
        except OSError as e:
            raise OSError(f"Cannot write results to {path}: {e}")

    # --- Summary --------------------------------------------------------------

    def crossover_db(self, combiner: str, n_r: int, n_d: int,
                     oma_n_r: Optional[int] = None, oma_n_d: Optional[int] = None) -> Optional[float]:
        """Lowest SNR (dB) where the NOMA sum rate overtakes the OMA rate.

        Linear interpolation between grid points; None when NOMA never leads.
        The OMA antenna pair defaults to the NOMA one.
        """
        frame = self.to_frame()
        noma = _rate_curve(frame, "NOMA", combiner, n_r, n_d, ("closed-form", "quadrature", "monte-carlo"))
        oma = _rate_curve(frame, "OMA", combiner,
                          n_r if oma_n_r is None else oma_n_r,
                          n_d if oma_n_d is None else oma_n_d,
                          ("quadrature", "monte-carlo"))
        if noma is None or oma is None:
            return None
        joined = pd.concat([noma.rename("noma"), oma.rename("oma")], axis=1, join="inner").sort_index()
        if joined.empty:
            return None
        diff = (joined["noma"] - joined["oma"]).tolist()
        snr = joined.index.tolist()
        if diff[0] > 0:
            return float(snr[0])
        for i in range(1, len(diff)):
            if diff[i] > 0:
                lo, hi = diff[i - 1], diff[i]
                return float(snr[i - 1] + (snr[i] - snr[i - 1]) * (-lo) / (hi - lo))
        return None

    def summary(self) -> List[Dict]:
        """Per scheme/combiner/antennas: peak sum rate, lowest outage, crossover"""
        frame = self.to_frame()
        if frame.empty:
            return []
        report = []
        for (scheme, combiner, n_r, n_d), group in frame.groupby(["scheme", "combiner", "n_r", "n_d"], sort=False):
            entry = {
                "scheme": scheme,
                "combiner": combiner,
                "antennas": f"{n_r}x{n_d}",
                "methods": list(dict.fromkeys(group["method"])),
                "peak_c_sum": _max_or_none(group["c_sum"]),
                "min_p_out_s1": _min_or_none(group["p_out_s1"]),
                "min_p_out_s2": _min_or_none(group["p_out_s2"]),
            }
            if scheme == "NOMA":
                entry["crossover_db"] = self.crossover_db(combiner, int(n_r), int(n_d))
            report.append(entry)
        return report


def _rate_curve(frame: pd.DataFrame, scheme: str, combiner: str, n_r: int, n_d: int,
                preference: Sequence[str]) -> Optional[pd.Series]:
    subset = frame[
        (frame["scheme"] == scheme) & (frame["combiner"] == combiner)
        & (frame["n_r"] == n_r) & (frame["n_d"] == n_d) & frame["c_sum"].notna()
    ]
    for method in preference:
        curve = subset[subset["method"] == method]
        if not curve.empty:
            return curve.set_index("rho_db")["c_sum"]
    return None


def _max_or_none(series: pd.Series) -> Optional[float]:
    series = series.dropna()
    return None if series.empty else float(series.max())


def _min_or_none(series: pd.Series) -> Optional[float]:
    series = series.dropna()
    return None if series.empty else float(series.min())
