"""Command-line entry points composing the experiment drivers.

Every subcommand reads one JSON config (--config), applies the documented
overrides, runs the matching driver and persists the stable results layout
(config.json, reports.csv, reports.jsonl, verdict.json, extra tables) under
the output directory. Exit codes: 0 success, 2 configuration or usage error,
3 initial-data guard violation, 4 runtime failure mid-run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .config import (
    ExperimentKind,
    RunConfig,
    initial_data,
    parse_config,
    serialize_config,
    with_overrides,
)
from .dynamics import SimState
from .energies import energy_m, lifespan_T0, thresholds
from .errors import ConfigError, GuardViolation, KuzlabError
from .experiments import (
    klainerman_experiment,
    lifespan_sweep,
    linear_regularity_experiment,
    run_until_breakdown,
    stability_experiment,
    viscous_decay_experiment,
)
from .fields import Field, dealias_values, linf_norm
from .io import jsonable, write_experiment_dir
from .jets import build_jet

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_GUARD = 3
_EXIT_RUNTIME = 4


def _load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(path, f"cannot read config: {exc}") from exc
    return parse_config(text)


def _out_root(cfg: RunConfig) -> Path:
    return Path(cfg.out_dir) if cfg.out_dir is not None else Path("results")


def _verdict_without_reports(result: Any, extra: dict[str, Any] | None = None) -> dict[str, Any]:
    data = jsonable(result)
    data.pop("reports", None)
    if extra:
        data.update(extra)
    return data


def _cmd_simulate(cfg: RunConfig) -> int:
    u0, u1 = initial_data(cfg)
    reports, verdict = run_until_breakdown(
        (u0, u1),
        cfg.params,
        cfg.horizon,
        cfg.report_every,
        kind=cfg.model,
        scheme=cfg.scheme,
        dt=cfg.dt,
        cfl=cfg.cfl,
        tail_threshold=cfg.sweep.tail_threshold,
        e_m_orders=cfg.energies.e_m_orders,
        half_m=cfg.energies.half_m,
    )
    directory = write_experiment_dir(
        _out_root(cfg), "simulate", serialize_config(cfg), reports, verdict
    )
    print(f"simulate: {len(reports)} reports, cause = {verdict.cause.value} -> {directory}")
    return _EXIT_OK


def _cmd_sweep(cfg: RunConfig) -> int:
    grid = cfg.grid
    data = initial_data(cfg)

    def data_shape(g):
        if g != grid:
            raise ValueError("sweep grid changed under a fixed-data sweep")
        return data

    result = lifespan_sweep(
        data_shape,
        cfg.sweep.eps_list,
        cfg.params,
        grid.n,
        grid=grid,
        kind=cfg.model,
        scheme=cfg.scheme,
        horizon=cfg.horizon,
        dt=cfg.dt,
        cfl=cfg.cfl,
        tail_threshold=cfg.sweep.tail_threshold,
        workers=cfg.sweep.workers,
    )
    rows = [(r.eps, r.t_star, r.cause.value, r.scaled) for r in result.rows]
    directory = write_experiment_dir(
        _out_root(cfg),
        "sweep",
        serialize_config(cfg),
        (),
        result,
        tables={"sweep_rows": (("eps", "t_star", "cause", "scaled"), rows)},
    )
    slope = "none" if result.slope is None else f"{result.slope:.4f}"
    print(f"sweep: {len(result.rows)} points, slope = {slope} -> {directory}")
    return _EXIT_OK


def _perturbed_data(cfg: RunConfig, u0: Field, u1: Field) -> tuple[Field, Field]:
    """Second initial pair for the stability run, per the stability options."""
    opts = cfg.stability
    grid = cfg.grid
    if opts.perturbation_amplitude == 0.0:
        return u0, u1
    if opts.perturbation == "sine":
        mode = opts.perturbation_mode
        if len(mode) != grid.n:
            raise ConfigError("stability.perturbation_mode", f"{len(mode)} components for a {grid.n}d grid")
        phase = np.zeros(grid.shape)
        for axis in range(grid.n):
            phase = phase + (2.0 * math.pi * mode[axis] / grid.lengths[axis]) * grid.coordinate_mesh(axis)
        delta = opts.perturbation_amplitude * np.sin(phase)
    else:
        rng = np.random.default_rng(cfg.seed)
        noise = dealias_values(grid, rng.standard_normal(grid.shape))
        peak = float(np.max(np.abs(noise)))
        delta = (opts.perturbation_amplitude / peak) * noise if peak > 0.0 else noise
    return Field(grid, u0.values + delta), u1


def _cmd_stability(cfg: RunConfig) -> int:
    u_data = initial_data(cfg)
    v_data = _perturbed_data(cfg, *u_data)
    result = stability_experiment(
        u_data,
        v_data,
        cfg.params,
        cfg.horizon,
        kind=cfg.model,
        scheme=cfg.scheme,
        dt=cfg.dt,
        cfl=cfg.cfl,
        report_every=cfg.report_every,
    )
    rows = list(zip(result.times, result.d, result.a))
    extra = {"envelope_ok": result.envelope_ok(cfg.stability.c2_cap), "c2_cap": cfg.stability.c2_cap}
    directory = write_experiment_dir(
        _out_root(cfg),
        "stability",
        serialize_config(cfg),
        result.reports,
        _verdict_without_reports(result, extra),
        tables={"stability_series": (("t", "d", "a"), rows)},
    )
    c2 = "none" if result.c2 is None else f"{result.c2:.4f}"
    print(f"stability: c2 = {c2}, envelope_ok = {extra['envelope_ok']} -> {directory}")
    return _EXIT_OK


def _cmd_decay(cfg: RunConfig) -> int:
    u0, u1 = initial_data(cfg)
    result = viscous_decay_experiment(
        u0,
        u1,
        cfg.params,
        cfg.decay.m,
        cfg.horizon,
        kind=cfg.model,
        scheme=cfg.scheme,
        dt=cfg.dt,
        cfl=cfg.cfl,
        report_every=cfg.report_every,
        env=cfg.envelope,
        slack_rel=cfg.decay.slack_rel,
    )
    rows = list(zip(result.times, result.e_theorem, result.e_half, result.s_half))
    directory = write_experiment_dir(
        _out_root(cfg),
        "decay",
        serialize_config(cfg),
        result.reports,
        _verdict_without_reports(result),
        tables={"decay_series": (("t", "e_theorem", "e_half", "s_half"), rows)},
    )
    print(
        f"decay: monotone_ok = {result.monotone_ok}, bound_ok = {result.bound_ok} -> {directory}"
    )
    return _EXIT_OK


def _cmd_klainerman(cfg: RunConfig) -> int:
    u0, u1 = initial_data(cfg)
    result = klainerman_experiment(
        u0,
        u1,
        cfg.params,
        cfg.horizon,
        m=cfg.klainerman.m,
        kind=cfg.model,
        scheme=cfg.scheme,
        dt=cfg.dt,
        cfl=cfg.cfl,
        report_every=cfg.report_every,
        support_fraction=cfg.klainerman.support_fraction,
    )
    extra: dict[str, Any] = {"max_ratio": result.max_ratio}
    if result.times and result.times[-1] >= 1.0:
        extra["boundedness_quotient_t1"] = result.boundedness_quotient(1.0)
    rows = list(zip(result.times, result.ratios, result.support_radii))
    directory = write_experiment_dir(
        _out_root(cfg),
        "klainerman",
        serialize_config(cfg),
        result.reports,
        _verdict_without_reports(result, extra),
        tables={"ratio_series": (("t", "ratio", "support_radius"), rows)},
    )
    print(f"klainerman: max ratio = {result.max_ratio:.6g} -> {directory}")
    return _EXIT_OK


def _forcing_factory(cfg: RunConfig) -> Callable[[float], Field]:
    opts = cfg.linreg
    grid = cfg.grid
    if len(opts.forcing_mode) != grid.n:
        raise ConfigError("linreg.forcing_mode", f"{len(opts.forcing_mode)} components for a {grid.n}d grid")
    phase = np.zeros(grid.shape)
    for axis in range(grid.n):
        phase = phase + (2.0 * math.pi * opts.forcing_mode[axis] / grid.lengths[axis]) * grid.coordinate_mesh(axis)
    profile = np.sin(phase)

    def f(t: float) -> Field:
        return Field(grid, opts.forcing_amplitude * math.cos(opts.forcing_omega * t) * profile)

    return f


def _cmd_linreg(cfg: RunConfig) -> int:
    u0, u1 = initial_data(cfg)
    result = linear_regularity_experiment(
        u0,
        u1,
        _forcing_factory(cfg),
        cfg.params,
        cfg.horizon,
        dt=cfg.dt,
        report_every=cfg.report_every,
        tol=cfg.linreg.tol,
    )
    margins = result.margins
    verdict = {
        "times": list(result.times),
        "lhs": list(result.lhs),
        "rhs": list(result.rhs),
        "margins": list(margins),
        "worst_margin": result.worst_margin,
        "tol": cfg.linreg.tol,
    }
    rows = list(zip(result.times, result.lhs, result.rhs, margins))
    directory = write_experiment_dir(
        _out_root(cfg),
        "linreg",
        serialize_config(cfg),
        (),
        verdict,
        tables={"margin_series": (("t", "lhs", "rhs", "margin"), rows)},
    )
    print(f"linreg: worst margin = {result.worst_margin:.6g} -> {directory}")
    return _EXIT_OK


def _cmd_check_thresholds(cfg: RunConfig) -> int:
    p = cfg.params
    record = thresholds(p, cfg.envelope)
    u0, u1 = initial_data(cfg)
    m0 = cfg.grid.n // 2 + 2
    jet = build_jet(SimState(u0, u1), p, m0 + 1, cfg.model)
    e_m0_initial = energy_m(jet, m0)
    t0 = lifespan_T0(e_m0_initial, p, cfg.envelope)
    lines = {
        "B": record.b,
        "sqrt_E_m0_max (inviscid smallness)": record.sqrt_e_m0_max,
        "E_m0(0) of configured data": e_m0_initial,
        "T_0 (lifespan floor)": t0,
        "sqrt_E_half_max (viscous smallness)": record.sqrt_e_half_max,
        "E_theorem_max": record.e_theorem_max,
        "r_star (fixed-point radius)": record.r_star,
        "w(r_star)": record.w(record.r_star),
        "sup-norm guard 1/(2 alpha eps)": (
            1.0 / (2.0 * p.alpha * p.eps) if p.alpha > 0.0 else math.inf
        ),
        "||u1||_inf of configured data": linf_norm(u1),
    }
    for name, value in lines.items():
        print(f"{name}: {value:.8g}")
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        payload = {k: v for k, v in lines.items()}
        (out / "thresholds.json").write_text(json.dumps(jsonable(payload), indent=2) + "\n")
        print(f"written -> {out / 'thresholds.json'}")
    return _EXIT_OK


_COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "stability": _cmd_stability,
    "decay": _cmd_decay,
    "klainerman": _cmd_klainerman,
    "linreg": _cmd_linreg,
    "check-thresholds": _cmd_check_thresholds,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kuzlab",
        description="Spectral laboratory for damped nonlinear acoustic waves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} driver")
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--out", default=None, help="output directory (overrides config)")
        cmd.add_argument("--workers", type=int, default=None, help="sweep worker pool size")
        cmd.add_argument("--horizon", type=float, default=None, help="override the run horizon")
        cmd.add_argument("--seed", type=int, default=None, help="override the random seed")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code instead of raising."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else _EXIT_CONFIG
    try:
        cfg = _load_config(args.config)
        cfg = with_overrides(
            cfg,
            out_dir=args.out,
            horizon=args.horizon,
            seed=args.seed,
            workers=args.workers,
        )
        if args.command != "check-thresholds":
            cfg = replace(cfg, experiment=ExperimentKind(args.command))
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return _EXIT_GUARD
    except KuzlabError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
