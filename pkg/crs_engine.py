#!/usr/bin/env python3
"""
CRS-NOMA Sweep Engine - Main Orchestrator
Sweeps SNR grids and antenna configurations through the closed-form,
quadrature, Monte Carlo and asymptote methods and emits the result table.
"""

import argparse
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from analytic_outage import outage_asymptote, outage_point
from analytic_rates import rate_result
from config import Config
from model import ConfigError, SnrGrid, SystemConfig, feasibility_lines, parse_antennas, validate_noma_feasibility
from oracle import DEFAULT_OMA_COMBINER, OMA_COMBINERS, QuadratureToleranceError, mc_outage, mc_rate, quad_rate
from sweep_results import FORMATS, SweepResult, SweepRow
from validation import run_validation

METHOD_ALIASES = {
    "analytic": "closed-form",
    "closed-form": "closed-form",
    "quad": "quadrature",
    "quadrature": "quadrature",
    "mc": "monte-carlo",
    "monte-carlo": "monte-carlo",
    "asymptote": "asymptote",
}
KINDS = ("rate", "outage", "all")
DEFAULT_SNR_DB = "0:40:2"


def parse_methods(values) -> List[str]:
    """Map CLI method names to row method names, keeping first-seen order"""
    if isinstance(values, str):
        values = values.split(",")
    methods = []
    for value in values:
        value = str(value).strip().lower()
        if not value:
            continue
        if value not in METHOD_ALIASES:
            raise ConfigError(f"Unknown method {value!r}; choose from {', '.join(METHOD_ALIASES)}")
        if METHOD_ALIASES[value] not in methods:
            methods.append(METHOD_ALIASES[value])
    if not methods:
        raise ConfigError("No methods given")
    return methods


@dataclass(frozen=True)
class SweepTask:
    kind: str      # rate | outage
    scheme: str    # NOMA | OMA
    combiner: str  # SC | MRC
    n_r: int
    n_d: int
    method: str
    rho_db: float
    rho: float


@dataclass
class SweepPlan:
    """Everything a sweep needs; tasks come out in declared order"""
    system: SystemConfig
    grid: SnrGrid
    kind: str = "rate"
    combiners: List[str] = field(default_factory=lambda: ["SC", "MRC"])
    schemes: List[str] = field(default_factory=lambda: ["NOMA", "OMA"])
    antennas: List[Tuple[int, int]] = field(default_factory=lambda: [(1, 1)])
    methods: List[str] = field(default_factory=lambda: ["closed-form"])
    rate_trials: int = Config.RATE_TRIALS
    outage_trials: int = Config.OUTAGE_TRIALS
    seed: int = Config.DEFAULT_SEED
    oma_combiner: str = DEFAULT_OMA_COMBINER

    def kinds(self) -> List[str]:
        return ["rate", "outage"] if self.kind == "all" else [self.kind]

    def tasks(self) -> List[SweepTask]:
        tasks = []
        for kind in self.kinds():
            for combiner in self.combiners:
                for n_r, n_d in self.antennas:
                    for scheme in self.schemes:
                        for method in self.methods:
                            if not _supported(kind, scheme, method):
                                continue
                            for rho_db, rho in self.grid:
                                tasks.append(SweepTask(kind, scheme, combiner, n_r, n_d, method, rho_db, rho))
        return tasks

    def configs(self) -> List[SystemConfig]:
        return [self.system.with_antennas(n_r, n_d) for n_r, n_d in self.antennas]


def _supported(kind: str, scheme: str, method: str) -> bool:
    """OMA has no closed form and no outage; outage has no quadrature; rates have no asymptote"""
    if kind == "rate":
        return method != "asymptote" and not (scheme == "OMA" and method == "closed-form")
    return scheme == "NOMA" and method != "quadrature"


class CrsNomaEngine:
    def __init__(self, plan: SweepPlan, quiet: bool = False):
        self.plan = plan
        self.quiet = quiet

    def status(self, message: str):
        # stdout may carry the result table
        if not self.quiet:
            print(message, file=sys.stderr)

    def evaluate(self, task: SweepTask) -> SweepRow:
        plan = self.plan
        cfg = plan.system.with_antennas(task.n_r, task.n_d)
        row = SweepRow(task.scheme, task.combiner, task.n_r, task.n_d, task.rho_db, task.method)

        if task.kind == "rate":
            if task.method == "closed-form":
                result = rate_result(cfg, task.rho, task.combiner)
                row.c_s1, row.c_s2, row.c_sum = result.c_s1, result.c_s2, result.c_sum
            elif task.method == "quadrature":
                if task.scheme == "OMA":
                    row.c_s1 = quad_rate(cfg, task.rho, f"oma_{task.combiner.lower()}", plan.oma_combiner)
                    row.c_s2 = 0.0
                else:
                    row.c_s1 = quad_rate(cfg, task.rho, f"s1_{task.combiner.lower()}")
                    row.c_s2 = quad_rate(cfg, task.rho, f"s2_{task.combiner.lower()}")
                row.c_sum = row.c_s1 + row.c_s2
            else:
                estimate = mc_rate(cfg, task.rho, f"{task.scheme}-{task.combiner}", plan.rate_trials,
                                   plan.seed, workers=1, oma_combiner=plan.oma_combiner)
                row.c_s1, row.c_s2, row.c_sum = estimate.s1.mean, estimate.s2.mean, estimate.sum.mean
                row.se_c_s1, row.se_c_s2, row.se_c_sum = (
                    estimate.s1.std_error, estimate.s2.std_error, estimate.sum.std_error
                )
                row.seed, row.trials = plan.seed, plan.rate_trials
            return row

        if task.method == "closed-form":
            point = outage_point(cfg, task.rho, task.combiner)
        elif task.method == "asymptote":
            point = outage_asymptote(cfg, task.rho, task.combiner)
        else:
            estimate = mc_outage(cfg, task.rho, task.combiner, plan.outage_trials, plan.seed, workers=1)
            row.p_out_s1, row.p_out_s2 = estimate.s1.mean, estimate.s2.mean
            row.se_p_out_s1, row.se_p_out_s2 = estimate.s1.std_error, estimate.s2.std_error
            row.seed, row.trials = plan.seed, plan.outage_trials
            return row
        row.p_out_s1, row.p_out_s2 = point.p_out_s1, point.p_out_s2
        return row

    def run_sweep(self, workers: Optional[int] = None) -> SweepResult:
        """Evaluate every task; rows keep declared order whatever the worker count"""
        tasks = self.plan.tasks()
        workers = Config.resolve_workers(workers)
        self.status(f"🚀 Starting CRS-NOMA sweep: {len(tasks)} points on {workers} worker(s)")
        for kind in self.plan.kinds():
            self.status(f"📡 {kind}: {', '.join(self.plan.combiners)} x {len(self.plan.antennas)} antenna pair(s) "
                        f"x {len(self.plan.grid)} SNR point(s), methods {', '.join(self.plan.methods)}")
        if workers <= 1 or len(tasks) <= 1:
            rows = [self.evaluate(task) for task in tasks]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(self.evaluate, tasks))
        self.status(f"✅ Sweep complete: {len(rows)} rows")
        return SweepResult(rows)

    def print_summary(self, result: SweepResult):
        if self.quiet:
            return
        self.status("📊 Summary")
        for entry in result.summary():
            parts = [f"{entry['scheme']}-{entry['combiner']} {entry['antennas']}"]
            if entry["peak_c_sum"] is not None:
                parts.append(f"peak C_sum {entry['peak_c_sum']:.4f} bits/s/Hz")
            if entry["min_p_out_s1"] is not None:
                parts.append(f"min P_out s1 {entry['min_p_out_s1']:.3e}, s2 {entry['min_p_out_s2']:.3e}")
            if entry.get("crossover_db") is not None:
                parts.append(f"NOMA overtakes OMA at {entry['crossover_db']:.1f} dB")
            self.status("   " + ", ".join(parts))


# --- Command line -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crs_engine",
        description="Rates and outage of cooperative relaying NOMA with SC/MRC receive diversity",
    )
    parser.add_argument("--config", metavar="PATH", help="flat key=value system file")
    parser.add_argument("--preset", metavar="NAME", help="sweep preset from the presets YAML")
    parser.add_argument("--methods", metavar="LIST", help="comma list: analytic, quad, mc, asymptote")
    parser.add_argument("--snr-db", metavar="START:STOP:STEP", help="transmit SNR grid in dB (inclusive); use --snr-db=-10:0:5 for negative starts")
    parser.add_argument("--antennas", metavar="NrxNd,...", help='antenna pairs, e.g. "1x1,2x2"')
    parser.add_argument("--trials", type=int, metavar="N", help="Monte Carlo trials (rates and outage)")
    parser.add_argument("--seed", type=int, metavar="N", help="Monte Carlo seed")
    parser.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    parser.add_argument("--format", choices=FORMATS, default="csv")
    parser.add_argument("--validate", action="store_true", help="run the agreement suite instead of a sweep")
    parser.add_argument("--oma-combiner", choices=OMA_COMBINERS, help="destination combining across the two OMA slots")
    parser.add_argument("--kind", choices=KINDS, help="rate, outage or all")
    parser.add_argument("--workers", type=int, metavar="N", help="worker threads (capped by CRS_NOMA_THREADS)")
    parser.add_argument("--quiet", action="store_true", help="no status lines on stderr")
    return parser


def _load_preset(name: Optional[str]) -> Tuple[Dict, Dict]:
    presets = Config.load_presets()
    if name is None:
        return presets["system"], {}
    if name not in presets["presets"]:
        raise ConfigError(f"Unknown preset {name!r}; available: {', '.join(presets['presets'])}")
    return presets["system"], presets["presets"][name]


def _upper_list(values, allowed: Sequence[str], what: str) -> List[str]:
    if isinstance(values, str):
        values = values.split(",")
    items = [str(v).strip().upper() for v in values if str(v).strip()]
    bad = [v for v in items if v not in allowed]
    if bad or not items:
        raise ConfigError(f"Invalid {what}: {', '.join(bad) or 'none given'}")
    return items


def plan_from_args(args: argparse.Namespace, grid: SnrGrid) -> SweepPlan:
    """Preset fields first, then any explicit flag on top"""
    system_values, preset = _load_preset(args.preset)
    if args.config:
        system = SystemConfig.from_file(args.config)
    else:
        system = SystemConfig.from_mapping(system_values)

    antennas = parse_antennas(args.antennas or ",".join(preset.get("antennas", [])) or f"{system.n_r}x{system.n_d}")
    kind = args.kind or preset.get("kind", "rate")
    if kind not in KINDS:
        raise ConfigError(f"Invalid kind {kind!r}")
    trials_rate = args.trials if args.trials is not None else Config.RATE_TRIALS
    trials_outage = args.trials if args.trials is not None else Config.OUTAGE_TRIALS
    if trials_rate < 1 or trials_outage < 1:
        raise ConfigError("--trials must be at least 1")

    return SweepPlan(
        system=system,
        grid=grid,
        kind=kind,
        combiners=_upper_list(preset.get("combiners", ["SC", "MRC"]), ("SC", "MRC"), "combiners"),
        schemes=_upper_list(preset.get("schemes", ["NOMA", "OMA"]), ("NOMA", "OMA"), "schemes"),
        antennas=antennas,
        methods=parse_methods(args.methods or preset.get("methods", ["analytic"])),
        rate_trials=trials_rate,
        outage_trials=trials_outage,
        seed=args.seed if args.seed is not None else Config.DEFAULT_SEED,
        oma_combiner=args.oma_combiner or preset.get("oma_combiner", DEFAULT_OMA_COMBINER),
    )


def _preset_grid(args: argparse.Namespace) -> str:
    if args.snr_db is not None:
        return args.snr_db
    if args.preset:
        _, preset = _load_preset(args.preset)
        return str(preset.get("snr_db", DEFAULT_SNR_DB))
    return DEFAULT_SNR_DB


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Exit codes: 0 success, 1 configuration/validation/I-O failure, 2 usage error"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    def status(message: str):
        if not args.quiet:
            print(message, file=sys.stderr)

    try:
        grid_text = _preset_grid(args)
    except (ConfigError, OSError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    try:
        grid = SnrGrid.parse(grid_text)
    except ConfigError as e:
        parser.print_usage(sys.stderr)
        print(f"❌ {e}", file=sys.stderr)
        return 2

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UserWarning)
            plan = plan_from_args(args, grid)
        for warning in caught:
            status(f"⚠️ {warning.message}")
        for cfg in plan.configs():
            report = validate_noma_feasibility(cfg)
            if not report.feasible:
                print(f"❌ Infeasible power split for {cfg.n_r}x{cfg.n_d}:", file=sys.stderr)
                for line in feasibility_lines(cfg):
                    print(f"   {line}", file=sys.stderr)
                return 1
    except (ConfigError, FileNotFoundError, OSError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1

    if args.validate:
        status("🚀 Running CRS-NOMA validation suite...")
        report = run_validation(
            base=plan.system,
            rate_trials=args.trials,
            outage_trials=args.trials,
            seed=plan.seed,
            workers=args.workers,
            progress=status,
        )
        report.print_report()
        if report.passed:
            status("🎉 All checks within tolerance")
            return 0
        print(f"❌ {len(report.failures)} item(s) out of tolerance", file=sys.stderr)
        return 1

    engine = CrsNomaEngine(plan, quiet=args.quiet)
    try:
        result = engine.run_sweep(args.workers)
    except (ArithmeticError, QuadratureToleranceError) as e:
        print(f"❌ Sweep failed: {e}", file=sys.stderr)
        return 1

    try:
        if args.out:
            result.write(args.out, args.format)
            status(f"✅ Results written to {args.out}")
        else:
            sys.stdout.buffer.write(result.emit(args.format))
            sys.stdout.flush()
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1

    engine.print_summary(result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
