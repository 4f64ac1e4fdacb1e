"""Stable on-disk formats: field snapshots, checkpoints, report tables.

Formats (all versioned, all readable back by this module):

* Field snapshot: NumPy ``.npz`` archive with keys ``format`` (string
  ``kuzlab-field``), ``version``, ``lengths``, ``points``,
  ``origin_centered`` and ``values`` (row-major float64 samples).
* Checkpoint: ``.npz`` archive with keys ``format`` (``kuzlab-checkpoint``),
  ``version``, the two field arrays ``u`` and ``v``, the grid metadata as in
  a snapshot, scalars ``t``, ``fnu_accum``, ``div_accum``, the physical
  parameters and the model kind. Loading reproduces the exact float64 bits,
  so a resumed run emits identical reports.
* Energy report CSV: first line the comment ``# kuzlab-energy-report v1``,
  then a standard CSV header and rows. The tower columns ``e_m_<order>``
  vary with the run configuration; all other columns are fixed. A JSON-lines
  twin carries the same rows with a leading metadata object.
* Generic table CSV (sweep rows, stability series, inequality margins):
  first line ``# kuzlab-table v1 <name>``, then a CSV header and rows.

Experiment results live one directory per experiment containing
``config.json``, ``reports.csv`` (plus ``reports.jsonl``) and
``verdict.json``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .dynamics import ModelKind, PhysicalParams, SimState
from .energies import EnergyReport
from .fields import Field, Grid

FIELD_FORMAT = "kuzlab-field"
CHECKPOINT_FORMAT = "kuzlab-checkpoint"
REPORT_FORMAT = "kuzlab-energy-report"
TABLE_FORMAT = "kuzlab-table"
FORMAT_VERSION = 1

_REPORT_BASE_COLUMNS = (
    "t",
    "e_wave",
    "e_nonl",
    "f_nu",
    "e_half_m",
    "s_half_m",
    "e_1m",
    "e_inf_m",
    "min_hyp",
    "div_accum",
    "support_radius",
)


def _grid_payload(grid: Grid) -> dict[str, Any]:
    return {
        "lengths": np.asarray(grid.lengths, dtype=np.float64),
        "points": np.asarray(grid.points, dtype=np.int64),
        "origin_centered": np.asarray(grid.origin_centered),
    }


def _grid_from_payload(data: Mapping[str, Any]) -> Grid:
    return Grid(
        lengths=tuple(float(x) for x in np.asarray(data["lengths"])),
        points=tuple(int(x) for x in np.asarray(data["points"])),
        origin_centered=bool(np.asarray(data["origin_centered"])),
    )


def _check_format(data: Mapping[str, Any], expected: str, path: Path) -> None:
    found = str(np.asarray(data.get("format", "")))
    if found != expected:
        raise ValueError(f"{path}: expected format {expected!r}, found {found!r}")
    version = int(np.asarray(data["version"]))
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported {expected} version {version}")


def save_field(path: str | Path, field: Field) -> Path:
    """Write a self-describing field snapshot; returns the path written."""
    path = Path(path)
    np.savez(
        path,
        format=FIELD_FORMAT,
        version=FORMAT_VERSION,
        values=field.values,
        **_grid_payload(field.grid),
    )
    return path if path.suffix == ".npz" else path.with_suffix(path.suffix + ".npz")


def load_field(path: str | Path) -> Field:
    path = Path(path)
    with np.load(path) as data:
        _check_format(data, FIELD_FORMAT, path)
        return Field(_grid_from_payload(data), np.array(data["values"]))


def save_checkpoint(
    path: str | Path,
    state: SimState,
    p: PhysicalParams,
    kind: ModelKind = ModelKind.KUZNETSOV,
) -> Path:
    """Write a resumable checkpoint: fields, time, accumulators, parameters."""
    path = Path(path)
    np.savez(
        path,
        format=CHECKPOINT_FORMAT,
        version=FORMAT_VERSION,
        u=state.u.values,
        v=state.v.values,
        t=np.float64(state.t),
        fnu_accum=np.float64(state.fnu_accum),
        div_accum=np.float64(state.div_accum),
        c=np.float64(p.c),
        nu=np.float64(p.nu),
        eps=np.float64(p.eps),
        alpha=np.float64(p.alpha),
        beta=np.float64(p.beta),
        hyp_floor=np.float64(p.hyp_floor),
        kind=kind.value,
        **_grid_payload(state.grid),
    )
    return path if path.suffix == ".npz" else path.with_suffix(path.suffix + ".npz")


def load_checkpoint(path: str | Path) -> tuple[SimState, PhysicalParams, ModelKind]:
    path = Path(path)
    with np.load(path) as data:
        _check_format(data, CHECKPOINT_FORMAT, path)
        grid = _grid_from_payload(data)
        state = SimState(
            u=Field(grid, np.array(data["u"])),
            v=Field(grid, np.array(data["v"])),
            t=float(data["t"]),
            fnu_accum=float(data["fnu_accum"]),
            div_accum=float(data["div_accum"]),
        )
        p = PhysicalParams(
            c=float(data["c"]),
            nu=float(data["nu"]),
            eps=float(data["eps"]),
            alpha=float(data["alpha"]),
            beta=float(data["beta"]),
            hyp_floor=float(data["hyp_floor"]),
        )
        kind = ModelKind(str(np.asarray(data["kind"])))
    return state, p, kind


def report_columns(reports: Sequence[EnergyReport]) -> list[str]:
    """Fixed column order for a report stream: t, energies, towers, monitors."""
    orders = sorted({order for r in reports for order, _ in r.e_m})
    columns = list(_REPORT_BASE_COLUMNS[:4])
    columns.extend(f"e_m_{order}" for order in orders)
    columns.extend(_REPORT_BASE_COLUMNS[4:])
    return columns


def _report_row(report: EnergyReport, columns: Sequence[str]) -> list[float]:
    values = dict(
        zip(_REPORT_BASE_COLUMNS[:4], (report.t, report.e_wave, report.e_nonl, report.f_nu))
    )
    for order, value in report.e_m:
        values[f"e_m_{order}"] = value
    values.update(
        e_half_m=report.e_half_m,
        s_half_m=report.s_half_m,
        e_1m=report.e_1m,
        e_inf_m=report.e_inf_m,
        min_hyp=report.min_hyp,
        div_accum=report.div_accum,
        support_radius=report.support_radius,
    )
    return [values.get(col, math.nan) for col in columns]


def _report_from_row(columns: Sequence[str], row: Sequence[float]) -> EnergyReport:
    values = dict(zip(columns, row))
    e_m = tuple(
        (int(col.removeprefix("e_m_")), values[col])
        for col in columns
        if col.startswith("e_m_")
    )
    return EnergyReport(
        t=values["t"],
        e_wave=values["e_wave"],
        e_nonl=values["e_nonl"],
        f_nu=values["f_nu"],
        e_m=e_m,
        e_half_m=values["e_half_m"],
        s_half_m=values["s_half_m"],
        e_1m=values["e_1m"],
        e_inf_m=values["e_inf_m"],
        min_hyp=values["min_hyp"],
        div_accum=values["div_accum"],
        support_radius=values["support_radius"],
    )


def write_reports_csv(path: str | Path, reports: Sequence[EnergyReport]) -> Path:
    """Write the versioned energy-report CSV with one fixed column set."""
    path = Path(path)
    columns = report_columns(reports)
    with path.open("w", newline="") as fh:
        fh.write(f"# {REPORT_FORMAT} v{FORMAT_VERSION}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for report in reports:
            writer.writerow(f"{v!r}" for v in _report_row(report, columns))
    return path


def read_reports_csv(path: str | Path) -> tuple[EnergyReport, ...]:
    path = Path(path)
    with path.open(newline="") as fh:
        header = fh.readline().strip()
        if not header.startswith(f"# {REPORT_FORMAT} "):
            raise ValueError(f"{path}: missing {REPORT_FORMAT} header comment")
        reader = csv.reader(fh)
        columns = next(reader)
        reports = tuple(
            _report_from_row(columns, [float(cell) for cell in row])
            for row in reader
            if row
        )
    return reports


def write_reports_jsonl(path: str | Path, reports: Sequence[EnergyReport]) -> Path:
    """JSON-lines twin of the CSV: metadata object, then one object per row."""
    path = Path(path)
    columns = report_columns(reports)
    with path.open("w") as fh:
        fh.write(
            json.dumps(
                {"format": REPORT_FORMAT, "version": FORMAT_VERSION, "columns": columns}
            )
            + "\n"
        )
        for report in reports:
            row = dict(zip(columns, _report_row(report, columns)))
            fh.write(json.dumps(row) + "\n")
    return path


def read_reports_jsonl(path: str | Path) -> tuple[EnergyReport, ...]:
    path = Path(path)
    with path.open() as fh:
        meta = json.loads(fh.readline())
        if meta.get("format") != REPORT_FORMAT or meta.get("version") != FORMAT_VERSION:
            raise ValueError(f"{path}: missing {REPORT_FORMAT} metadata line")
        columns = meta["columns"]
        reports = tuple(
            _report_from_row(columns, [float(json.loads(line)[col]) for col in columns])
            for line in fh
            if line.strip()
        )
    return reports


def write_table_csv(
    path: str | Path,
    name: str,
    columns: Sequence[str],
    rows: Iterable[Sequence[Any]],
) -> Path:
    """Write a named generic table (sweep rows, series) in the versioned format."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# {TABLE_FORMAT} v{FORMAT_VERSION} {name}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(["" if v is None else v for v in row])
    return path


def read_table_csv(path: str | Path) -> tuple[str, list[str], list[list[str]]]:
    """Read a generic table; returns (name, columns, string rows)."""
    path = Path(path)
    with path.open(newline="") as fh:
        header = fh.readline().strip()
        prefix = f"# {TABLE_FORMAT} v{FORMAT_VERSION} "
        if not header.startswith(prefix):
            raise ValueError(f"{path}: missing {TABLE_FORMAT} header comment")
        name = header.removeprefix(prefix)
        reader = csv.reader(fh)
        columns = next(reader)
        rows = [row for row in reader if row]
    return name, columns, rows


def jsonable(obj: Any) -> Any:
    """Recursively convert dataclasses, enums and arrays to JSON-ready values."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def write_experiment_dir(
    root: str | Path,
    name: str,
    config_text: str,
    reports: Sequence[EnergyReport],
    verdict: Any,
    tables: Mapping[str, tuple[Sequence[str], Iterable[Sequence[Any]]]] | None = None,
) -> Path:
    """Materialize the stable results layout for one experiment.

    Creates ``<root>/<name>/`` holding ``config.json`` (the full provenance
    config), ``reports.csv`` and ``reports.jsonl``, ``verdict.json``, and one
    ``<table>.csv`` per extra named table.
    """
    directory = Path(root) / name
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "config.json").write_text(config_text)
    write_reports_csv(directory / "reports.csv", reports)
    write_reports_jsonl(directory / "reports.jsonl", reports)
    (directory / "verdict.json").write_text(json.dumps(jsonable(verdict), indent=2) + "\n")
    for table_name, (columns, rows) in (tables or {}).items():
        write_table_csv(directory / f"{table_name}.csv", table_name, columns, rows)
    return directory
