#!/usr/bin/env python3
"""
Complete system tests
End-to-end agreement of closed forms, quadrature and Monte Carlo on the reference system
"""

import io
import sys

import pytest

from analytic_rates import rate_result
from model import SystemConfig, db_to_linear
from oracle import mc_rate, quad_rate
from validation import (
    ValidationItem,
    ValidationReport,
    binomial_tolerance,
    check_combiner_dominance,
    check_diversity_order,
    check_noma_oma_extremes,
    check_outage_agreement,
    check_rate_agreement,
    check_single_antenna_collapse,
    run_validation,
)

REFERENCE = SystemConfig.reference_default()
SEED = 42


def _assert_all_pass(items):
    assert items
    failures = [item.line() for item in items if not item.passed]
    assert not failures, "\n".join(failures)


def test_rate_triple_agreement():
    items = check_rate_agreement(REFERENCE, 200_000, SEED, None)
    # 2 combiners x 3 antenna pairs x 9 SNR points x (2 quadrature + 2 Monte Carlo)
    assert len(items) == 2 * 3 * 9 * 4
    _assert_all_pass(items)


def test_single_antenna_collapse():
    _assert_all_pass(check_single_antenna_collapse(REFERENCE))


def test_noma_overtakes_oma_at_high_snr():
    _assert_all_pass(check_noma_oma_extremes(REFERENCE))


def test_noma_matches_oma_with_more_antennas():
    rho = db_to_linear(40)
    noma_sc = rate_result(REFERENCE.with_antennas(1, 1), rho, "SC").c_sum
    oma_sc = quad_rate(REFERENCE.with_antennas(2, 2), rho, "oma_sc")
    assert abs(noma_sc - oma_sc) <= 0.05
    noma_mrc = rate_result(REFERENCE.with_antennas(2, 2), rho, "MRC").c_sum
    oma_mrc = quad_rate(REFERENCE.with_antennas(4, 4), rho, "oma_mrc")
    assert abs(noma_mrc - oma_mrc) <= 0.05


def test_noma_sc_beats_simulated_oma_at_30_db():
    cfg = REFERENCE.with_antennas(2, 2)
    rho = db_to_linear(30)
    noma = rate_result(cfg, rho, "SC").c_sum
    oma = mc_rate(cfg, rho, "OMA-SC", trials=200_000, seed=SEED)
    assert noma > oma.sum.mean + 4 * oma.sum.std_error


def test_outage_matches_monte_carlo():
    items = check_outage_agreement(REFERENCE, 2_000_000, SEED, None)
    assert len(items) == 2 * 3 * 3 * 2
    _assert_all_pass(items)


def test_full_diversity_order():
    _assert_all_pass(check_diversity_order(REFERENCE))


def test_mrc_dominates_sc():
    _assert_all_pass(check_combiner_dominance(REFERENCE))


def test_binomial_tolerance():
    assert binomial_tolerance(0.0, 1000) == pytest.approx(1e-3)
    assert binomial_tolerance(0.5, 10_000) == pytest.approx(4 * 0.005 + 1e-4)


def test_report_localizes_failures():
    report = ValidationReport([
        ValidationItem("closed-form vs quadrature", "SC 2x2", 20.0, "c_s1", 3e-7, 1e-6),
        ValidationItem("closed-form vs quadrature", "MRC 4x4", 35.0, "c_s2", 2e-6, 1e-6),
        ValidationItem("diversity order", "SC 1x2", None, "slope p_out_s1", 0.05, 0.15),
    ])
    assert not report.passed
    assert [item.config for item in report.failures] == ["MRC 4x4"]
    assert report.max_discrepancies()["closed-form vs quadrature"] == (2e-6, 1e-6)
    stream = io.StringIO()
    report.print_report(stream)
    text = stream.getvalue()
    assert "MRC 4x4 @ 35 dB c_s2" in text
    assert "2/3 items within tolerance" in text


def test_run_validation_without_monte_carlo():
    messages = []
    report = run_validation(rate_trials=0, outage_trials=0, seed=SEED, progress=messages.append)
    assert report.passed, "\n".join(item.line() for item in report.failures)
    assert not any("monte-carlo" in item.check for item in report.items)
    assert len([m for m in messages if m.startswith("📡")]) == 6


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
