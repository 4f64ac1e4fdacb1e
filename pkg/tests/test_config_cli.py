"""Tests for the configuration schema, presets, and the command-line driver.

Contracts under test: parse/serialize round-trips exactly, unknown keys are
rejected with their dotted path, presets materialize to their documented
closed forms, threshold-relative scaling is exact at t = 0, and the CLI maps
outcomes onto its documented exit codes with a stable results layout.
"""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kuzlab import ConfigError, Grid, ModelKind, PhysicalParams, Scheme, SimState
from kuzlab.cli import main
from kuzlab.config import (
    ExperimentKind,
    GaussianBump,
    MeanZeroPeriodic,
    RunConfig,
    SineMode,
    ZeroVelocityGaussian,
    initial_data,
    materialize_preset,
    parse_config,
    serialize_config,
    with_overrides,
)
from kuzlab.energies import EnvelopeParams, energy_half_m, energy_m, thresholds
from kuzlab.io import read_reports_csv, read_table_csv
from kuzlab.jets import build_jet


class TestParseSerialize:
    def test_empty_config_is_all_defaults(self) -> None:
        cfg = parse_config("{}")
        assert cfg == RunConfig()
        assert cfg.model is ModelKind.KUZNETSOV
        assert cfg.grid == Grid.cube(1, 256)
        assert cfg.preset == SineMode()

    def test_round_trip_is_identity(self) -> None:
        texts = [
            "{}",
            json.dumps(
                {
                    "model": "westervelt",
                    "params": {"c": 1.5, "nu": 0.25, "eps": 0.05},
                    "grid": {"n": 2, "points": [32, 64], "lengths": [6.0, 12.0], "origin_centered": True},
                    "preset": {"kind": "gaussian_bump", "width": 0.5, "amplitude": 0.02},
                    "scheme": "imex",
                    "dt": 0.01,
                    "horizon": 3.5,
                    "energies": {"e_m_orders": [0, 2], "half_m": 2},
                    "experiment": "decay",
                    "seed": 11,
                    "relative_to_threshold": True,
                    "decay": {"m": 2},
                }
            ),
            json.dumps(
                {
                    "preset": {"kind": "mean_zero_periodic", "mode": [2], "amplitude": 0.03},
                    "sweep": {"eps_list": [0.4, 0.2], "workers": 2, "tail_threshold": 0.05},
                    "stability": {"perturbation": "noise", "perturbation_amplitude": 1e-4},
                    "envelope": {"B": 12.0, "C_m": 2.0},
                    "linreg": {"forcing_omega": 2.5},
                }
            ),
        ]
        for text in texts:
            cfg = parse_config(text)
            assert parse_config(serialize_config(cfg)) == cfg

    @given(
        c=st.floats(0.5, 3.0),
        eps=st.floats(0.01, 1.0),
        horizon=st.floats(0.1, 100.0),
        seed=st.integers(0, 2**31 - 1),
        report_every=st.integers(1, 50),
    )
    @settings(max_examples=30, deadline=None)
    def test_round_trip_property(self, c, eps, horizon, seed, report_every) -> None:
        text = json.dumps(
            {
                "params": {"c": c, "eps": eps},
                "horizon": horizon,
                "seed": seed,
                "report_every": report_every,
            }
        )
        cfg = parse_config(text)
        assert parse_config(serialize_config(cfg)) == cfg

    def test_invalid_json_rejected(self) -> None:
        with pytest.raises(ConfigError, match="invalid JSON"):
            parse_config("{not json")

    def test_unknown_top_level_key(self) -> None:
        with pytest.raises(ConfigError, match="colour"):
            parse_config('{"colour": 3}')

    def test_unknown_nested_key_has_dotted_path(self) -> None:
        with pytest.raises(ConfigError, match=r"params\.mass"):
            parse_config('{"params": {"mass": 1.0}}')
        with pytest.raises(ConfigError, match=r"sweep\.epss"):
            parse_config('{"sweep": {"epss": [0.1]}}')

    def test_type_errors_are_config_errors(self) -> None:
        with pytest.raises(ConfigError, match="horizon"):
            parse_config('{"horizon": true}')
        with pytest.raises(ConfigError, match="horizon"):
            parse_config('{"horizon": -1.0}')
        with pytest.raises(ConfigError, match="model"):
            parse_config('{"model": "burgers"}')
        with pytest.raises(ConfigError, match="report_every"):
            parse_config('{"report_every": 0}')

    def test_physical_validation_surfaces_as_config_error(self) -> None:
        with pytest.raises(ConfigError, match="params"):
            parse_config('{"params": {"eps": 2.0}}')

    def test_mode_dimension_checked_against_grid(self) -> None:
        with pytest.raises(ConfigError, match="preset.mode"):
            parse_config('{"grid": {"n": 2, "points": 32}, "preset": {"kind": "sine_mode", "mode": [1]}}')

    def test_center_dimension_checked_against_grid(self) -> None:
        bad = {
            "grid": {"n": 1, "points": 64},
            "preset": {"kind": "gaussian_bump", "center": [0.0, 0.0]},
        }
        with pytest.raises(ConfigError, match="preset.center"):
            parse_config(json.dumps(bad))

    def test_mean_zero_requires_nonzero_first_mode(self) -> None:
        with pytest.raises(ConfigError):
            parse_config('{"preset": {"kind": "mean_zero_periodic", "mode": [0]}}')

    def test_with_overrides(self) -> None:
        cfg = RunConfig()
        out = with_overrides(cfg, out_dir="results/x", horizon=5.0, seed=3, workers=4)
        assert out.out_dir == "results/x"
        assert out.horizon == 5.0
        assert out.seed == 3
        assert out.sweep.workers == 4
        # untouched fields keep their values; the original is unchanged
        assert out.model is cfg.model
        assert cfg.out_dir is None


class TestPresets:
    def test_sine_mode_closed_form(self) -> None:
        grid = Grid.cube(1, 256)
        u0, u1 = materialize_preset(SineMode(mode=(3,), amplitude=0.02), grid)
        assert float(np.max(np.abs(u0.values))) == pytest.approx(0.02, rel=1e-6)
        x = grid.axis_coordinates(0)
        np.testing.assert_allclose(u0.values, 0.02 * np.sin(3 * x), atol=1e-15)
        np.testing.assert_allclose(u1.values, -0.02 * 3 * np.cos(3 * x), atol=1e-14)

    def test_sine_mode_is_unit_speed_traveling_profile(self) -> None:
        """u(x, t) = A sin(k(x - t)) solves the c = 1 wave equation; the preset
        pair is that profile and its time derivative at t = 0."""
        grid = Grid.cube(1, 128)
        a, k = 0.05, 2
        u0, u1 = materialize_preset(SineMode(mode=(k,), amplitude=a), grid)
        x = grid.axis_coordinates(0)
        t = 1e-3
        travel = a * np.sin(k * (x - t))
        np.testing.assert_allclose(
            u0.values + t * u1.values, travel, atol=2 * a * (k * t) ** 2
        )

    def test_gaussian_bump_integral(self) -> None:
        """The box integral matches A (2 pi)^{n/2} w^n on a roomy box."""
        grid = Grid.cube(2, 64, length=16.0, origin_centered=True)
        width, amp = 0.7, 0.03
        u0, u1 = materialize_preset(GaussianBump(width=width, amplitude=amp), grid)
        integral = grid.cell_volume * float(np.sum(u0.values))
        expected = amp * (2 * math.pi) ** 1.0 * width**2
        assert integral == pytest.approx(expected, rel=1e-10)
        np.testing.assert_array_equal(u0.values, u1.values)

    def test_zero_velocity_gaussian(self) -> None:
        grid = Grid.cube(1, 128, length=16.0, origin_centered=True)
        u0, u1 = materialize_preset(ZeroVelocityGaussian(width=0.5, amplitude=0.01), grid)
        assert float(np.max(np.abs(u1.values))) == 0.0
        assert float(np.max(u0.values)) == pytest.approx(0.01, rel=1e-12)

    def test_gaussian_support_rejection(self) -> None:
        grid = Grid.cube(1, 64)  # 2 pi box; monitor limit 0.4 * 2 pi
        with pytest.raises(ConfigError, match="width"):
            materialize_preset(GaussianBump(width=2.0), grid)

    def test_mean_zero_periodic_is_mean_zero(self) -> None:
        grid = Grid.cube(2, 32)
        u0, u1 = materialize_preset(MeanZeroPeriodic(mode=(2, 1), amplitude=0.05), grid)
        assert abs(float(np.mean(u0.values))) < 1e-16
        assert abs(float(np.mean(u1.values))) < 1e-16
        # zero mean along every first-axis line, the Poincare-admissible class
        assert float(np.max(np.abs(u0.values.mean(axis=0)))) < 1e-16

    def test_preset_rejects_wrong_mode_length(self) -> None:
        grid = Grid.cube(2, 32)
        with pytest.raises(ConfigError, match="mode"):
            materialize_preset(SineMode(mode=(1,)), grid)


class TestThresholdRelativeScaling:
    def test_inviscid_scaling_is_exact(self) -> None:
        cfg = parse_config(
            json.dumps(
                {
                    "grid": {"n": 1, "points": 64},
                    "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.5},
                    "relative_to_threshold": True,
                }
            )
        )
        u0, u1 = initial_data(cfg)
        m0 = cfg.grid.n // 2 + 2
        jet = build_jet(SimState(u0, u1), cfg.params, m0 + 1, cfg.model)
        target = 0.5 * thresholds(cfg.params, cfg.envelope).sqrt_e_m0_max
        assert math.sqrt(energy_m(jet, m0)) == pytest.approx(target, rel=1e-10)

    def test_viscous_scaling_uses_half_tower(self) -> None:
        cfg = parse_config(
            json.dumps(
                {
                    "params": {"nu": 1.0},
                    "grid": {"n": 1, "points": 64},
                    "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.25},
                    "relative_to_threshold": True,
                    "decay": {"m": 2},
                }
            )
        )
        u0, u1 = initial_data(cfg)
        jet = build_jet(SimState(u0, u1), cfg.params, 2, cfg.model)
        target = 0.25 * thresholds(cfg.params, cfg.envelope).sqrt_e_half_max
        assert math.sqrt(energy_half_m(jet, 2)) == pytest.approx(target, rel=1e-10)

    def test_absolute_amplitudes_without_flag(self) -> None:
        cfg = parse_config('{"preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.125}}')
        u0, _ = initial_data(cfg)
        assert float(np.max(np.abs(u0.values))) == pytest.approx(0.125, rel=1e-6)


def _write_config(tmp_path, name: str, payload: dict) -> str:
    path = tmp_path / name
    path.write_text(json.dumps(payload) + "\n")
    return str(path)


_FAST_SIM = {
    "grid": {"n": 1, "points": 64},
    "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.01},
    "horizon": 0.5,
    "report_every": 10,
}


class TestCli:
    def test_no_arguments_is_usage_error(self, capsys) -> None:
        assert main([]) == 2
        capsys.readouterr()

    def test_unknown_command_is_usage_error(self, capsys) -> None:
        assert main(["frobnicate", "--config", "x.json"]) == 2
        capsys.readouterr()

    def test_missing_config_file(self, tmp_path, capsys) -> None:
        assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 2
        assert "config error" in capsys.readouterr().err

    def test_invalid_config_content(self, tmp_path, capsys) -> None:
        cfg = _write_config(tmp_path, "bad.json", {"mystery_key": 1})
        assert main(["simulate", "--config", cfg]) == 2
        assert "mystery_key" in capsys.readouterr().err

    def test_simulate_success_and_layout(self, tmp_path, capsys) -> None:
        cfg = _write_config(tmp_path, "sim.json", _FAST_SIM)
        out = tmp_path / "results"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        run_dir = out / "simulate"
        assert (run_dir / "config.json").exists()
        assert (run_dir / "verdict.json").exists()
        reports = read_reports_csv(run_dir / "reports.csv")
        assert reports[0].t == 0.0
        # config.json round-trips through the parser
        reparsed = parse_config((run_dir / "config.json").read_text())
        assert reparsed.horizon == 0.5
        verdict = json.loads((run_dir / "verdict.json").read_text())
        assert verdict["cause"] == "horizon_reached"

    def test_simulate_row_count_contract(self, tmp_path, capsys) -> None:
        payload = dict(_FAST_SIM)
        payload["dt"] = 0.01
        payload["horizon"] = 0.1  # 10 steps
        payload["report_every"] = 2
        cfg = _write_config(tmp_path, "rows.json", payload)
        out = tmp_path / "res"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        reports = read_reports_csv(out / "simulate" / "reports.csv")
        assert len(reports) == 1 + 10 // 2

    def test_guard_violation_exit_code(self, tmp_path, capsys) -> None:
        payload = dict(_FAST_SIM)
        payload["params"] = {"alpha": 1.0, "eps": 0.5}
        payload["preset"] = {"kind": "sine_mode", "mode": [1], "amplitude": 2.0}
        cfg = _write_config(tmp_path, "guard.json", payload)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "g")]) == 3
        assert "guard violation" in capsys.readouterr().err

    def test_unwritable_output_is_runtime_error(self, tmp_path, capsys) -> None:
        cfg = _write_config(tmp_path, "sim.json", _FAST_SIM)
        blocker = tmp_path / "blocker"
        blocker.write_text("file, not a directory\n")
        assert main(["simulate", "--config", cfg, "--out", str(blocker / "sub")]) == 4
        assert "output error" in capsys.readouterr().err

    def test_sweep_single_point_no_fit(self, tmp_path, capsys) -> None:
        payload = {
            "grid": {"n": 1, "points": 64},
            "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.01},
            "horizon": 0.5,
            "sweep": {"eps_list": [0.1]},
        }
        cfg = _write_config(tmp_path, "sweep.json", payload)
        out = tmp_path / "res"
        assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        verdict = json.loads((out / "sweep" / "verdict.json").read_text())
        assert verdict["slope"] is None
        name, columns, rows = read_table_csv(out / "sweep" / "sweep_rows.csv")
        assert name == "sweep_rows"
        assert len(rows) == 1
        assert rows[0][0] == "0.1"

    def test_check_thresholds_prints_constants(self, tmp_path, capsys) -> None:
        payload = {"params": {"nu": 0.5}, "grid": {"n": 1, "points": 64}}
        cfg = _write_config(tmp_path, "thr.json", payload)
        out = tmp_path / "res"
        assert main(["check-thresholds", "--config", cfg, "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "B" in text and "T_0" in text and "r_star" in text
        data = json.loads((out / "thresholds.json").read_text())
        assert data["B"] == pytest.approx(10.0)

    def test_decay_run(self, tmp_path, capsys) -> None:
        payload = {
            "params": {"nu": 1.0, "eps": 0.1},
            "grid": {"n": 1, "points": 64},
            "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.001},
            "scheme": "imex",
            "horizon": 0.5,
            "decay": {"m": 2},
        }
        cfg = _write_config(tmp_path, "decay.json", payload)
        out = tmp_path / "res"
        assert main(["decay", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        verdict = json.loads((out / "decay" / "verdict.json").read_text())
        assert verdict["monotone_ok"] is True
        assert verdict["bound_ok"] is True
        name, _, rows = read_table_csv(out / "decay" / "decay_series.csv")
        assert name == "decay_series"
        assert len(rows) >= 2

    def test_stability_run_identical_under_seed(self, tmp_path, capsys) -> None:
        payload = {
            "grid": {"n": 1, "points": 64},
            "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.05},
            "horizon": 0.5,
            "stability": {"perturbation": "noise", "perturbation_amplitude": 1e-5},
            "seed": 42,
        }
        cfg = _write_config(tmp_path, "stab.json", payload)
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["stability", "--config", cfg, "--out", str(out_a)]) == 0
        assert main(["stability", "--config", cfg, "--out", str(out_b)]) == 0
        capsys.readouterr()
        series_a = (out_a / "stability" / "stability_series.csv").read_bytes()
        series_b = (out_b / "stability" / "stability_series.csv").read_bytes()
        assert series_a == series_b
        verdict = json.loads((out_a / "stability" / "verdict.json").read_text())
        assert verdict["envelope_ok"] is True

    def test_klainerman_run(self, tmp_path, capsys) -> None:
        payload = {
            "grid": {"n": 1, "points": 128, "lengths": [12.566370614359172], "origin_centered": True},
            "preset": {"kind": "zero_velocity_gaussian", "width": 0.4, "amplitude": 0.01},
            "params": {"eps": 0.05},
            "horizon": 1.0,
            "report_every": 16,
        }
        cfg = _write_config(tmp_path, "klai.json", payload)
        out = tmp_path / "res"
        assert main(["klainerman", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        verdict = json.loads((out / "klainerman" / "verdict.json").read_text())
        assert verdict["max_ratio"] > 0
        name, _, rows = read_table_csv(out / "klainerman" / "ratio_series.csv")
        assert name == "ratio_series"
        assert len(rows) >= 2

    def test_linreg_run(self, tmp_path, capsys) -> None:
        payload = {
            "params": {"nu": 0.5, "eps": 0.2},
            "grid": {"n": 1, "points": 64},
            "preset": {"kind": "sine_mode", "mode": [1], "amplitude": 0.01},
            "horizon": 1.0,
            "linreg": {"forcing_amplitude": 0.5, "forcing_mode": [1], "forcing_omega": 1.0},
        }
        cfg = _write_config(tmp_path, "linreg.json", payload)
        out = tmp_path / "res"
        assert main(["linreg", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        verdict = json.loads((out / "linreg" / "verdict.json").read_text())
        assert verdict["worst_margin"] >= -verdict["tol"]
        name, _, rows = read_table_csv(out / "linreg" / "margin_series.csv")
        assert name == "margin_series"

    def test_horizon_override_applies(self, tmp_path, capsys) -> None:
        cfg = _write_config(tmp_path, "sim.json", _FAST_SIM)
        out = tmp_path / "res"
        assert main(["simulate", "--config", cfg, "--out", str(out), "--horizon", "0.25"]) == 0
        capsys.readouterr()
        reparsed = parse_config((out / "simulate" / "config.json").read_text())
        assert reparsed.horizon == 0.25
        reports = read_reports_csv(out / "simulate" / "reports.csv")
        assert reports[-1].t == pytest.approx(0.25, abs=1e-12)
