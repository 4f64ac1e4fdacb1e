"""Tests for the experiment drivers: breakdown runs, sweeps, stability pairs,
viscous decay, decay-ratio tracking, and the forced linear check.

The focus is the orchestration contract (guards, verdict invariants, report
cadence, determinism, worker independence); the quantitative theorems are
exercised at scale by the acceptance suite.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from kuzlab import (
    Field,
    GuardViolation,
    ModelKind,
    PhysicalParams,
    Scheme,
    SimState,
    SupportMonitorTripped,
    energy_wave,
    solve_linear_forced,
)
from kuzlab.experiments import (
    BlowupVerdict,
    BreakdownCause,
    SweepResult,
    SweepRow,
    klainerman_experiment,
    lifespan_sweep,
    linear_regularity_experiment,
    run_until_breakdown,
    stability_experiment,
    viscous_decay_experiment,
    _scaled_lifespan,
)
from kuzlab.fields import Grid

from helpers import single_mode


def _smooth_pair(grid: Grid, a: float = 0.1) -> tuple[Field, Field]:
    return single_mode(grid, (1,) * grid.n, a), single_mode(grid, (2,) + (1,) * (grid.n - 1), a / 2)


class TestBlowupVerdict:
    def test_invariant_holds(self) -> None:
        BlowupVerdict(None, BreakdownCause.HORIZON, 0.0)
        BlowupVerdict(1.5, BreakdownCause.HYPERBOLICITY, 2.0)

    def test_invariant_violations_raise(self) -> None:
        with pytest.raises(ValueError):
            BlowupVerdict(None, BreakdownCause.SPECTRAL, 0.0)
        with pytest.raises(ValueError):
            BlowupVerdict(3.0, BreakdownCause.HORIZON, 0.0)


class TestSweepRows:
    def test_tainted_and_clean_partition(self) -> None:
        rows = (
            SweepRow(0.1, 4.0, BreakdownCause.SPECTRAL, 0.4),
            SweepRow(0.2, None, BreakdownCause.HORIZON, None),
            SweepRow(0.4, 1.0, BreakdownCause.HYPERBOLICITY, 0.4),
        )
        result = SweepResult(1, rows, None, None)
        assert result.tainted == (0.2,)
        assert tuple(r.eps for r in result.clean_rows) == (0.1, 0.4)

    def test_scaled_lifespan_forms(self) -> None:
        assert _scaled_lifespan(1, 0.1, 5.0) == pytest.approx(0.5)
        assert _scaled_lifespan(2, 0.1, 5.0) == pytest.approx(0.05)
        assert _scaled_lifespan(3, 0.1, math.e) == pytest.approx(0.1)
        assert _scaled_lifespan(1, 0.1, None) is None
        assert _scaled_lifespan(3, 0.1, 0.0) is None


class TestRunUntilBreakdown:
    def test_wave_run_reaches_horizon(self) -> None:
        grid = Grid.cube(1, 64)
        p = PhysicalParams()
        reports, verdict = run_until_breakdown(
            _smooth_pair(grid), p, 1.0, report_every=5, kind=ModelKind.WAVE
        )
        assert verdict.cause is BreakdownCause.HORIZON
        assert verdict.t_star is None
        assert reports[0].t == 0.0
        assert reports[-1].t == pytest.approx(1.0, abs=1e-12)
        times = [r.t for r in reports]
        assert times == sorted(times)

    def test_report_cadence(self) -> None:
        grid = Grid.cube(1, 32)
        p = PhysicalParams()
        # dt = 0.01 sits below the RK4 CFL clamp of 0.4 * (2 pi / 32).
        reports, _ = run_until_breakdown(
            _smooth_pair(grid),
            p,
            1.0,
            report_every=20,
            kind=ModelKind.WAVE,
            dt=0.01,
        )
        # 100 steps at cadence 20: t = 0 plus steps 20, 40, 60, 80, 100.
        assert len(reports) == 6
        assert [round(r.t, 10) for r in reports] == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]

    def test_guard_violation_before_stepping(self) -> None:
        grid = Grid.cube(1, 32)
        p = PhysicalParams(alpha=1.0, eps=0.5)  # guard: ||u1||_inf < 1
        u0 = Field.zeros(grid)
        u1 = single_mode(grid, (1,), 1.1)
        with pytest.raises(GuardViolation):
            run_until_breakdown((u0, u1), p, 1.0)

    def test_sup_norm_guards_m1_m2(self) -> None:
        grid = Grid.cube(1, 32)
        p = PhysicalParams()
        u0, u1 = _smooth_pair(grid, 0.5)
        with pytest.raises(GuardViolation):
            run_until_breakdown((u0, u1), p, 1.0, m1=0.1)
        with pytest.raises(GuardViolation):
            run_until_breakdown((u0, u1), p, 1.0, m2=0.1)

    def test_immediate_divergence_trip_keeps_single_report(self) -> None:
        grid = Grid.cube(1, 32)
        p = PhysicalParams()
        reports, verdict = run_until_breakdown(
            _smooth_pair(grid), p, 1.0, kind=ModelKind.WAVE, div_threshold=0.0
        )
        assert verdict.cause is BreakdownCause.DIVERGENCE
        assert verdict.t_star == 0.0
        assert len(reports) == 1

    def test_under_resolved_data_trips_spectral_monitor(self) -> None:
        grid = Grid.cube(1, 128)
        p = PhysicalParams()
        u0 = single_mode(grid, (40,), 0.01)  # far outside the resolved band
        reports, verdict = run_until_breakdown(
            (u0, Field.zeros(grid)), p, 1.0, kind=ModelKind.WAVE
        )
        assert verdict.cause is BreakdownCause.SPECTRAL
        assert verdict.t_star == 0.0
        assert len(reports) == 1

    def test_hyperbolicity_trip_mid_run(self) -> None:
        grid = Grid.cube(1, 64)
        p = PhysicalParams(alpha=1.0, beta=3.0, eps=0.5, hyp_floor=0.45)
        u0 = single_mode(grid, (1,), 0.5)
        u1 = single_mode(grid, (1,), 0.9)  # min factor 0.55 at t = 0
        reports, verdict = run_until_breakdown(
            (u0, u1), p, 50.0, kind=ModelKind.KUZNETSOV, tail_threshold=2.0
        )
        assert verdict.cause is BreakdownCause.HYPERBOLICITY
        assert verdict.t_star is not None and 0.0 < verdict.t_star < 50.0
        assert reports[-1].t == pytest.approx(verdict.t_star)

    def test_requested_energies_present(self) -> None:
        grid = Grid.cube(1, 32)
        p = PhysicalParams(eps=0.05)
        reports, _ = run_until_breakdown(
            _smooth_pair(grid, 0.05), p, 0.2, e_m_orders=(0,), half_m=2
        )
        for r in reports:
            assert r.e_m_value(0) > 0
            assert r.e_half_m > 0

    def test_determinism(self) -> None:
        grid = Grid.cube(1, 64)
        p = PhysicalParams(eps=0.2)
        first, v1 = run_until_breakdown(_smooth_pair(grid), p, 0.5, report_every=3)
        second, v2 = run_until_breakdown(_smooth_pair(grid), p, 0.5, report_every=3)
        assert v1 == v2
        assert [r.e_wave for r in first] == [r.e_wave for r in second]
        assert [r.f_nu for r in first] == [r.f_nu for r in second]

    def test_report_every_validation(self) -> None:
        grid = Grid.cube(1, 32)
        with pytest.raises(ValueError):
            run_until_breakdown(_smooth_pair(grid), PhysicalParams(), 1.0, report_every=0)


class TestLifespanSweep:
    def test_input_validation(self) -> None:
        p = PhysicalParams()
        shape = _smooth_pair
        with pytest.raises(ValueError, match="duplicates"):
            lifespan_sweep(shape, [0.1, 0.1], p, 1)
        with pytest.raises(ValueError, match="empty"):
            lifespan_sweep(shape, [], p, 1)
        with pytest.raises(ValueError, match="dimension"):
            lifespan_sweep(shape, [0.1], p, 4)
        with pytest.raises(ValueError, match="does not match"):
            lifespan_sweep(shape, [0.1], p, 2, grid=Grid.cube(1, 32))

    def test_horizon_rows_are_tainted_and_skip_fit(self) -> None:
        grid = Grid.cube(1, 32)
        result = lifespan_sweep(
            _smooth_pair, [0.05, 0.1], PhysicalParams(), 1, grid=grid, horizon=0.5
        )
        assert all(r.cause is BreakdownCause.HORIZON for r in result.rows)
        assert result.slope is None and result.intercept is None
        assert result.tainted == (0.05, 0.1)

    def test_single_point_has_no_fit(self) -> None:
        grid = Grid.cube(1, 64)
        result = lifespan_sweep(
            lambda g: (single_mode(g, (1,), 0.5), single_mode(g, (1,), 0.5)),
            [0.5],
            PhysicalParams(alpha=1.0, beta=3.0),
            1,
            grid=grid,
            horizon=100.0,
        )
        assert len(result.rows) == 1
        assert result.rows[0].cause is not BreakdownCause.HORIZON
        assert result.slope is None

    def test_rows_sorted_and_workers_agree(self) -> None:
        grid = Grid.cube(1, 64)
        shape = lambda g: (single_mode(g, (1,), 0.5), single_mode(g, (1,), 0.5))
        p = PhysicalParams(alpha=1.0, beta=3.0)
        eps = [0.5, 0.3]  # deliberately unsorted
        serial = lifespan_sweep(shape, eps, p, 1, grid=grid, horizon=100.0)
        threaded = lifespan_sweep(shape, eps, p, 1, grid=grid, horizon=100.0, workers=2)
        assert [r.eps for r in serial.rows] == [0.3, 0.5]
        assert serial == threaded
        for row in serial.rows:
            assert row.cause is not BreakdownCause.HORIZON
            assert row.scaled == pytest.approx(row.eps * row.t_star)
        assert serial.slope is not None


class TestStability:
    def test_identical_data_stay_identical(self) -> None:
        grid = Grid.cube(1, 64)
        data = _smooth_pair(grid)
        p = PhysicalParams(eps=0.1)
        result = stability_experiment(data, data, p, 1.0, report_every=4)
        assert result.c1 == pytest.approx(5.0)  # 3 + 2c^2 at c = 1
        assert result.c2 == 0.0
        assert not result.uniqueness_flag
        assert result.resolved
        assert result.envelope_ok()
        assert max(result.d) == 0.0
        assert result.times[0] == 0.0
        assert result.times[-1] == pytest.approx(1.0, abs=1e-12)
        assert len(result.reports) == len(result.times)

    def test_fitted_exponent_bounds_distance(self) -> None:
        grid = Grid.cube(1, 64)
        u = _smooth_pair(grid, 0.2)
        v = (
            Field(grid, u[0].values + single_mode(grid, (2,), 1e-4).values),
            u[1],
        )
        p = PhysicalParams(eps=0.2)
        result = stability_experiment(u, v, p, 2.0, report_every=5)
        assert result.c2 is not None and result.c2 >= 0.0
        d0 = result.d[0]
        assert d0 > 0
        for d_t, a_t in zip(result.d, result.a):
            envelope = result.c1 * math.exp(result.c2 * p.eps * a_t) * d0
            assert d_t <= envelope * (1 + 1e-9)

    def test_a_series_is_nondecreasing(self) -> None:
        grid = Grid.cube(1, 64)
        u = _smooth_pair(grid, 0.2)
        result = stability_experiment(u, u, PhysicalParams(eps=0.2), 1.0)
        assert all(b >= a for a, b in zip(result.a, result.a[1:]))
        assert result.a[0] == 0.0

    def test_grid_mismatch_raises(self) -> None:
        p = PhysicalParams()
        with pytest.raises(ValueError, match="grid"):
            stability_experiment(
                _smooth_pair(Grid.cube(1, 32)), _smooth_pair(Grid.cube(1, 64)), p, 1.0
            )

    def test_c1_validation(self) -> None:
        grid = Grid.cube(1, 32)
        data = _smooth_pair(grid)
        with pytest.raises(ValueError, match="c1"):
            stability_experiment(data, data, PhysicalParams(), 1.0, c1=0.5)

    def test_envelope_ok_respects_cap(self) -> None:
        grid = Grid.cube(1, 32)
        data = _smooth_pair(grid)
        result = stability_experiment(data, data, PhysicalParams(), 0.5)
        assert result.envelope_ok(cap=100.0)
        assert result.envelope_ok(cap=0.0)  # c2 = 0 sits on the cap


class TestViscousDecay:
    def test_m_validation(self) -> None:
        grid = Grid.cube(1, 32)
        u0, u1 = _smooth_pair(grid, 1e-3)
        p = PhysicalParams(nu=1.0)
        for bad_m in (0, 1, 3):
            with pytest.raises(ValueError):
                viscous_decay_experiment(u0, u1, p, bad_m, 0.1)

    def test_oversized_data_rejected(self) -> None:
        grid = Grid.cube(1, 64)
        u0, u1 = _smooth_pair(grid, 0.5)
        p = PhysicalParams(nu=0.1, eps=0.1)
        with pytest.raises(GuardViolation, match="threshold"):
            viscous_decay_experiment(u0, u1, p, 2, 0.1)

    def test_small_data_viscous_run(self) -> None:
        grid = Grid.cube(1, 64)
        u0, u1 = _smooth_pair(grid, 1e-3)
        p = PhysicalParams(nu=1.0, eps=0.1)
        result = viscous_decay_experiment(u0, u1, p, 2, 2.0, report_every=10)
        assert result.m == 2
        assert result.monotone_ok is True
        assert result.bound_ok is True
        assert math.isfinite(result.threshold_value)
        assert result.sqrt_e_half_initial <= result.threshold_value
        assert result.e_theorem[-1] < result.e_theorem[0]
        assert len(result.times) == len(result.e_theorem) == len(result.e_half)
        assert len(result.s_half) == len(result.reports) == len(result.times)
        assert result.e_half_bound == pytest.approx(5.0 * result.e_half[0])

    def test_inviscid_control_withdraws_claims(self) -> None:
        grid = Grid.cube(1, 64)
        u0, u1 = _smooth_pair(grid, 1e-3)
        p = PhysicalParams(nu=0.0, eps=0.1)
        result = viscous_decay_experiment(u0, u1, p, 2, 0.5, scheme=Scheme.EXPLICIT_RK4)
        assert result.monotone_ok is None
        assert result.threshold_value == math.inf


class TestKlainerman:
    def _bump_data(self, grid: Grid, sigma: float = 0.4) -> tuple[Field, Field]:
        """Bump whose 1e-8-relative support stays well inside the monitor limit."""
        r2 = sum(grid.coordinate_mesh(a) ** 2 for a in range(grid.n))
        return Field(grid, 0.01 * np.exp(-r2 / (2 * sigma**2))), Field.zeros(grid)

    _BOX = 4.0 * math.pi  # roomy box: the support monitor limit is 0.4 * L

    def test_requires_inviscid_and_centered(self) -> None:
        grid = Grid.cube(1, 128, length=self._BOX, origin_centered=True)
        u0, u1 = self._bump_data(grid)
        with pytest.raises(GuardViolation, match="inviscid"):
            klainerman_experiment(u0, u1, PhysicalParams(nu=0.5), 1.0)
        off_grid = Grid.cube(1, 128, length=self._BOX)
        u0_off, u1_off = self._bump_data(off_grid)  # coordinates are [0, L)
        with pytest.raises(GuardViolation, match="origin-centered"):
            klainerman_experiment(u0_off, u1_off, PhysicalParams(), 1.0)

    def test_short_run_series(self) -> None:
        grid = Grid.cube(1, 128, length=self._BOX, origin_centered=True)
        u0, u1 = self._bump_data(grid)
        p = PhysicalParams(eps=0.05)
        result = klainerman_experiment(u0, u1, p, 1.0, m=0, report_every=8)
        assert result.m == 0
        assert result.times[0] == 0.0
        assert result.times[-1] == pytest.approx(1.0, abs=1e-12)
        assert all(r > 0 for r in result.ratios)
        assert all(np.isfinite(result.support_radii))
        assert result.max_ratio == max(result.ratios)
        assert result.boundedness_quotient(1.0) == pytest.approx(
            result.max_ratio / result.ratio_at(1.0)
        )
        assert len(result.reports) == len(result.times)
        assert not math.isnan(result.reports[0].e_1m)

    def test_ratio_at_out_of_range(self) -> None:
        grid = Grid.cube(1, 128, length=self._BOX, origin_centered=True)
        u0, u1 = self._bump_data(grid)
        result = klainerman_experiment(u0, u1, PhysicalParams(eps=0.05), 0.25, m=0)
        with pytest.raises(ValueError):
            result.ratio_at(5.0)

    def test_support_monitor_trips(self) -> None:
        grid = Grid.cube(1, 128, length=self._BOX, origin_centered=True)
        u0, u1 = self._bump_data(grid)
        with pytest.raises(SupportMonitorTripped):
            klainerman_experiment(
                u0, u1, PhysicalParams(eps=0.05), 1.0, support_fraction=0.01
            )


class TestLinearRegularity:
    def test_wrapper_matches_direct_solver(self) -> None:
        grid = Grid.cube(1, 64)
        u0, u1 = _smooth_pair(grid, 0.1)
        p = PhysicalParams(nu=0.5, eps=0.2)

        def forcing(t: float) -> Field:
            return single_mode(grid, (1,), 0.3 * math.cos(t))

        via_experiment = linear_regularity_experiment(
            u0, u1, forcing, p, 1.0, dt=0.05, report_every=4
        )
        direct = solve_linear_forced(
            u0, u1, forcing, 1.0, p, dt=0.05, report_every=4
        )
        assert via_experiment.times == direct.times
        assert via_experiment.lhs == direct.lhs
        assert via_experiment.rhs == direct.rhs
        assert via_experiment.worst_margin == direct.worst_margin
