#!/usr/bin/env python3
"""
System model tests
Configuration invariants, feasibility, derived thresholds and SNR grids
"""

import os
import sys
import tempfile
import warnings

import pytest

from config import Config
from model import (
    ConfigError,
    InfeasiblePowerSplitError,
    SnrGrid,
    SystemConfig,
    db_to_linear,
    derive_constants,
    feasibility_lines,
    linear_to_db,
    parse_antennas,
    snr_threshold,
    validate_noma_feasibility,
)


def test_reference_default_system():
    cfg = SystemConfig.reference_default(2, 4)
    assert (cfg.omega_sd, cfg.omega_sr, cfg.omega_rd) == (1.0, 10.0, 2.5)
    assert (cfg.n_r, cfg.n_d) == (2, 4)
    assert cfg.a1 == pytest.approx(0.9)
    assert cfg.eps1 == pytest.approx(3.0)
    assert cfg.eps2 == pytest.approx(3.0)


def test_power_split_must_sum_to_one():
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 10.0, 2.5, a1=0.8, a2=0.1)
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 10.0, 2.5, a1=0.4, a2=0.6)
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 10.0, 2.5, a1=0.5, a2=0.5)


def test_invalid_gains_and_antennas():
    with pytest.raises(ConfigError):
        SystemConfig(0.0, 10.0, 2.5)
    with pytest.raises(ConfigError):
        SystemConfig(1.0, float("inf"), 2.5)
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 10.0, 2.5, n_r=0)
    with pytest.raises(ConfigError):
        SystemConfig(1.0, 10.0, 2.5, n_d=Config.max_antennas() + 1)


def test_strong_direct_link_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        SystemConfig(20.0, 10.0, 2.5)
    assert any(issubclass(w.category, UserWarning) for w in caught)


def test_feasibility_reports():
    feasible = validate_noma_feasibility(SystemConfig(1.0, 10.0, 2.5, a1=0.9, a2=0.1))
    assert feasible.feasible and feasible.margin == pytest.approx(0.6)

    infeasible = validate_noma_feasibility(SystemConfig(1.0, 10.0, 2.5, a1=0.7, a2=0.3))
    assert not infeasible.feasible and infeasible.margin < 0

    boundary = validate_noma_feasibility(SystemConfig(1.0, 10.0, 2.5, a1=0.75, a2=0.25))
    assert not boundary.feasible
    assert "boundary" in boundary.message


def test_derived_thresholds_at_unit_snr():
    constants = derive_constants(SystemConfig.reference_default(), 1.0)
    assert constants.theta1 == pytest.approx(5.0)
    assert constants.theta2 == pytest.approx(30.0)
    assert constants.theta == pytest.approx(30.0)
    assert constants.rd_threshold == pytest.approx(3.0)
    assert constants.phi == pytest.approx(1.0 / 10.0 + 1.0)
    assert constants.xi == pytest.approx(1.0 / (10.0 * 0.1) + 1.0 / 2.5)
    assert constants.chi(2, 1) == pytest.approx(2.0 / 10.0 + 1.0)
    assert constants.theta_kj(1, 2) == pytest.approx(1.0 + 2.0 / 2.5)


def test_thresholds_scale_with_snr():
    cfg = SystemConfig.reference_default()
    low, high = derive_constants(cfg, 2.0), derive_constants(cfg, 200.0)
    assert low.theta1 / high.theta1 == pytest.approx(100.0)
    assert low.theta == pytest.approx(max(low.theta1, low.theta2))


def test_theta1_dominates_with_small_a2():
    cfg = SystemConfig(1.0, 10.0, 2.5, a1=0.96, a2=0.04, r1=2.0, r2=0.5)
    constants = derive_constants(cfg, 1.0)
    assert constants.theta1 == pytest.approx(15.0 / 0.36)
    assert constants.theta2 == pytest.approx(1.0 / 0.04)
    assert constants.theta == constants.theta1


def test_infeasible_theta1_raises():
    constants = derive_constants(SystemConfig(1.0, 10.0, 2.5, a1=0.7, a2=0.3), 10.0)
    assert not constants.feasible
    with pytest.raises(InfeasiblePowerSplitError):
        constants.theta1


def test_db_conversions():
    assert db_to_linear(10.0) == pytest.approx(10.0)
    assert db_to_linear(-3.0) == pytest.approx(0.501187233627, rel=1e-10)
    assert linear_to_db(db_to_linear(17.5)) == pytest.approx(17.5)
    assert snr_threshold(0.5) == pytest.approx(1.0)


def test_snr_grid_parsing():
    grid = SnrGrid.parse("0:40:2")
    assert len(grid) == 21
    assert grid.labels_db[0] == 0.0 and grid.labels_db[-1] == 40.0
    assert grid.points[-1] == pytest.approx(1e4)
    assert SnrGrid.parse("0, 10, 20").labels_db == (0.0, 10.0, 20.0)
    assert len(SnrGrid.parse("0:1:0.1")) == 11


def test_snr_grid_rejects_empty_and_unordered():
    for text in ("", "  ", "10:0:1", "0:10"):
        with pytest.raises(ConfigError):
            SnrGrid.parse(text)
    with pytest.raises(ConfigError):
        SnrGrid.from_db([10.0, 5.0])


def test_parse_antennas():
    assert parse_antennas("1x1, 2x4,4X4") == [(1, 1), (2, 4), (4, 4)]
    for text in ("", "2by2", "0x1"):
        with pytest.raises(ConfigError):
            parse_antennas(text)


def test_system_file_round_trip():
    with tempfile.TemporaryDirectory() as folder:
        path = os.path.join(folder, "system.env")
        with open(path, "w") as f:
            f.write("# reference system\nOMEGA_SD=1\nomega_sr=10\nomega_rd=2.5\nn_r=2\nn_d=2\na2=0.1\nr1=1\nr2=1\n")
        cfg = SystemConfig.from_file(path)
    assert cfg == SystemConfig.reference_default(2, 2)


def test_from_mapping_errors():
    with pytest.raises(ConfigError):
        SystemConfig.from_mapping({"omega_sd": "1", "omega_sr": "10"})
    with pytest.raises(ConfigError):
        SystemConfig.from_mapping({"omega_sd": "1", "omega_sr": "10", "omega_rd": "2.5", "power": "3"})
    with pytest.raises(ConfigError):
        SystemConfig.from_mapping({"omega_sd": "1", "omega_sr": "ten", "omega_rd": "2.5"})
    with pytest.raises(ConfigError):
        SystemConfig.from_mapping({"omega_sd": "1", "omega_sr": "10", "omega_rd": "2.5", "n_r": "1.5"})
    with pytest.raises(FileNotFoundError):
        SystemConfig.from_file("/nonexistent/system.env")


def test_feasibility_lines():
    lines = feasibility_lines(SystemConfig.reference_default())
    assert lines[0].startswith("feasible")
    assert "Theta_1*rho=5" in lines[1]
    assert len(feasibility_lines(SystemConfig(1.0, 10.0, 2.5, a1=0.7, a2=0.3))) == 1


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
