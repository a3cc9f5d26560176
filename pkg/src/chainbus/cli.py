"""
Batch command-line front end.

    chainbus spectrum  [--config run.json] [--output gap.csv] ...
    chainbus propagate ...
    chainbus sweep --kind {gap-distance,gap-coupling,fidelity-coupling,adiabaticity-coupling} ...
    chainbus optimize ...

Settings are resolved as built-in defaults, then the JSON config file, then
command-line flags (later wins).  Unknown config keys are rejected.

Output is CSV (header row, comma separated) or JSON.  Every float is written
as its shortest round-trip decimal representation, so both formats carry
identical numbers and reruns are byte-identical.  CSV summary values follow
the data as ``# key=value`` comment lines.

Exit codes: 0 success, 1 validation error, 2 computation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import NormDriftError, run_transfer
from .model import InadmissibleDistanceError, SystemParams, attach_site_for_distance, hamiltonian_stack
from .spectral import EigensolverError, gap_analysis
from .sweep import (
    UnreachableTargetError,
    adiabaticity_vs_coupling,
    fidelity_vs_coupling,
    gap_vs_coupling,
    gap_vs_distance,
    linear_fit,
    minimum_transfer_time,
)

EXIT_OK, EXIT_VALIDATION, EXIT_COMPUTATION, EXIT_IO = 0, 1, 2, 3

SWEEP_KINDS = ("gap-distance", "gap-coupling", "fidelity-coupling", "adiabaticity-coupling")


class ValidationError(ValueError):
    pass


@dataclass
class RunConfig:
    """Everything a CLI run needs; mirrors SystemParams plus run controls."""

    n: int = 48
    #: None picks the anchor geometry l = 19: D = 11 in bonds, 12 in sites
    distance: int | None = None
    convention: str = "bonds"
    j0: float = 0.9
    mu0: float = 20.0
    tau: float = 480.0
    hop: float = 1.0
    pulse_width_factor: float = 8.0
    steps: int | None = None
    n_store: int = 501
    n_samples: int = 1001
    kind: str = "fidelity-coupling"
    grid: list | None = None
    series: list | None = None
    distances: list | None = None
    f_target: float = 0.995
    tau_cap: float = 1e5
    j0_bracket: list = field(default_factory=lambda: [0.1, 1.5])
    fast: bool = False
    workers: int | None = None
    output: str | None = None
    format: str = "csv"
    emit_plot_script: bool = False

    @property
    def resolved_distance(self) -> int:
        if self.distance is not None:
            return self.distance
        return 11 if self.convention == "bonds" else 12

    def params(self) -> SystemParams:
        try:
            l = attach_site_for_distance(self.n, self.resolved_distance, self.convention)
            return SystemParams(
                n_chain=self.n,
                attach_left=l,
                hop_endpoint=self.j0,
                total_time=self.tau,
                hop_chain=self.hop,
                peak_voltage=self.mu0,
                pulse_width_factor=self.pulse_width_factor,
            )
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc


_INT_FIELDS = {"n", "distance", "steps", "n_store", "n_samples", "workers"}
_FLOAT_FIELDS = {"j0", "mu0", "tau", "hop", "pulse_width_factor", "f_target", "tau_cap"}
_LIST_FIELDS = {"grid", "series", "distances", "j0_bracket"}
_BOOL_FIELDS = {"fast", "emit_plot_script"}
_CHOICES = {"convention": ("sites", "bonds"), "format": ("csv", "json"), "kind": SWEEP_KINDS}


def _check_field(name: str, value):
    if value is None:
        if name in {"distance", "steps", "workers", "grid", "series", "distances", "output"}:
            return None
        raise ValidationError(f"config field {name!r} may not be null")
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ValidationError(f"config field {name!r} must be an integer, got {value!r}")
        return int(value)
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ValidationError(f"config field {name!r} must be a finite number, got {value!r}")
        return float(value)
    if name in _LIST_FIELDS:
        if not isinstance(value, list):
            raise ValidationError(f"config field {name!r} must be a list, got {value!r}")
        for item in value:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ValidationError(f"config field {name!r} must contain numbers, got {item!r}")
        return list(value)
    if name in _BOOL_FIELDS:
        if not isinstance(value, bool):
            raise ValidationError(f"config field {name!r} must be true or false, got {value!r}")
        return value
    if name in _CHOICES:
        if value not in _CHOICES[name]:
            raise ValidationError(f"config field {name!r} must be one of {_CHOICES[name]}, got {value!r}")
        return value
    if name == "output" and not isinstance(value, str):
        raise ValidationError(f"config field 'output' must be a string, got {value!r}")
    return value


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Merge defaults, the JSON file at ``path`` and flag ``overrides``."""
    merged: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise OSError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ValidationError(f"config file {path} must hold a JSON object")
        merged.update(data)
    merged.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ValidationError(f"unknown config key(s): {', '.join(unknown)}")
    return RunConfig(**{k: _check_field(k, v) for k, v in merged.items()})


# -- output -----------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    summary: dict = field(default_factory=dict)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            doc = {"columns": self.columns, "rows": _jsonable(self.rows), "summary": _jsonable(self.summary)}
            return json.dumps(doc, indent=1, allow_nan=False) + "\n"
        lines = [",".join(self.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in self.rows]
        lines += [f"# {k}={_fmt(v)}" for k, v in self.summary.items()]
        return "\n".join(lines) + "\n"


def _write_atomic(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_PLOT_TEMPLATE = '''\
"""Plot {name}; generated alongside the data file."""
import csv
import matplotlib.pyplot as plt

with open({data!r}, newline="") as fh:
    rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
header, body = rows[0], rows[1:]
cols = list(zip(*body))
x = [float(v) for v in cols[0]]
fig, ax = plt.subplots()
for i in range(1, len(header)):
    try:
        y = [float(v) for v in cols[i]]
    except ValueError:
        continue
    ax.plot(x, y, label=header[i])
ax.set_xlabel(header[0])
ax.legend()
fig.savefig({png!r}, dpi=150)
'''


def _emit_plot_script(output: str, command: str):
    stem = Path(output)
    script = stem.with_name(stem.stem + "_plot.py")
    text = _PLOT_TEMPLATE.format(name=command, data=str(stem), png=str(stem.with_suffix(".png")))
    _write_atomic(str(script), text)


# -- commands ----------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig) -> tuple[Table, int]:
    params = cfg.params()
    if cfg.n_samples < 3:
        raise ValidationError("n_samples must be >= 3")
    analysis = gap_analysis(params, cfg.n_samples)
    values = np.linalg.eigvalsh(hamiltonian_stack(params, analysis.times))
    rows = [
        [float(t), float(v[0]), float(v[1]), float(v[1] - v[0])]
        for t, v in zip(analysis.times, values)
    ]
    summary = {
        "attach_left": params.attach_left,
        "min_gap": analysis.min_gap,
        "t_at_min": analysis.t_at_min,
        "gap_at_midpoint": analysis.gap_at_midpoint,
    }
    return Table(["t", "eps_g", "eps_1", "gap"], rows, summary), EXIT_OK


def cmd_propagate(cfg: RunConfig) -> tuple[Table, int]:
    params = cfg.params()
    if cfg.n_store < 2:
        raise ValidationError("n_store must be >= 2")
    steps = cfg.steps
    if steps is not None and steps < cfg.n_store:
        raise ValidationError(f"steps ({steps}) must be >= n_store ({cfg.n_store})")
    traj = run_transfer(params, n_steps=steps, n_store=cfg.n_store)
    pops = traj.populations
    rows = [[float(t), *map(float, p)] for t, p in zip(traj.times, pops)]
    summary = {
        "attach_left": params.attach_left,
        "n_steps": traj.n_steps,
        "norm_drift": traj.norm_drift,
        "fidelity": traj.fidelity,
    }
    return Table(["t", "P_A", "P_M", "P_B"], rows, summary), EXIT_OK


def _default_distances(cfg: RunConfig) -> list[int]:
    start = 8 if cfg.convention == "sites" else 7
    return list(range(start, 25 if cfg.convention == "sites" else 24, 2))


def cmd_sweep(cfg: RunConfig, kind: str | None = None) -> tuple[Table, int]:
    kind = kind or cfg.kind
    if kind not in SWEEP_KINDS:
        raise ValidationError(f"unknown sweep kind {kind!r}")
    if kind == "gap-distance":
        grid = cfg.grid if cfg.grid is not None else _default_distances(cfg)
        series = cfg.series if cfg.series is not None else [cfg.j0]
    else:
        grid = cfg.grid if cfg.grid is not None else [round(0.1 * k, 10) for k in range(1, 16)]
        series = cfg.series if cfg.series is not None else [cfg.resolved_distance]
    if not grid:
        raise ValidationError("sweep grid is empty")
    if not series:
        raise ValidationError("sweep series is empty")
    template = cfg.params()
    # validate all distances before computing anything
    distances = grid if kind == "gap-distance" else series
    for d in distances:
        try:
            attach_site_for_distance(cfg.n, d, cfg.convention)
        except InadmissibleDistanceError as exc:
            raise ValidationError(str(exc)) from exc
    if kind != "gap-distance" and any(j <= 0 for j in grid):
        raise ValidationError("coupling grid values must be positive")

    rows = []
    if kind == "gap-distance":
        columns = ["j0", "distance", "attach_left", "min_gap"]
        for j0 in series:
            recs = gap_vs_distance(template.replace(hop_endpoint=j0), [int(d) for d in grid],
                                   cfg.convention, cfg.n_samples, cfg.workers)
            rows += [[float(j0), r.inputs["distance"], r.inputs["attach_left"], r.value] for r in recs]
    elif kind == "gap-coupling":
        columns = ["distance", "attach_left", "j0", "min_gap"]
        for d in series:
            recs = gap_vs_coupling(template, grid, int(d), cfg.convention, cfg.n_samples, cfg.workers)
            rows += [[int(d), r.inputs["attach_left"], r.inputs["j0"], r.value] for r in recs]
    elif kind == "adiabaticity-coupling":
        columns = ["distance", "attach_left", "j0", "max_adiabaticity_tau"]
        for d in series:
            recs = adiabaticity_vs_coupling(template, grid, int(d), cfg.convention, cfg.n_samples, cfg.workers)
            rows += [[int(d), r.inputs["attach_left"], r.inputs["j0"], r.value] for r in recs]
    else:
        columns = ["distance", "attach_left", "tau", "j0", "fidelity"]
        for d in series:
            recs = fidelity_vs_coupling(template, grid, int(d), cfg.tau, cfg.convention,
                                        cfg.steps, cfg.fast, cfg.workers)
            rows += [[int(d), r.inputs["attach_left"], r.inputs["tau"], r.inputs["j0"], r.value]
                     for r in recs]
    summary = {"kind": kind, "convention": cfg.convention, "n": cfg.n}
    return Table(columns, rows, summary), EXIT_OK


def cmd_optimize(cfg: RunConfig) -> tuple[Table, int]:
    distances = cfg.distances if cfg.distances is not None else _default_distances(cfg)
    if not distances:
        raise ValidationError("distance list is empty")
    if not 0.0 < cfg.f_target < 1.0:
        raise ValidationError(f"f_target must lie in (0, 1), got {cfg.f_target}")
    if not cfg.tau_cap > 0:
        raise ValidationError(f"tau_cap must be positive, got {cfg.tau_cap}")
    if len(cfg.j0_bracket) != 2 or not 0 < cfg.j0_bracket[0] < cfg.j0_bracket[1]:
        raise ValidationError(f"j0_bracket must be [lo, hi] with 0 < lo < hi, got {cfg.j0_bracket}")
    template = cfg.params()
    for d in distances:
        try:
            attach_site_for_distance(cfg.n, d, cfg.convention)
        except InadmissibleDistanceError as exc:
            raise ValidationError(str(exc)) from exc

    rows, ok_points, status = [], [], EXIT_OK
    for d in distances:
        l = attach_site_for_distance(cfg.n, d, cfg.convention)
        try:
            res = minimum_transfer_time(
                template, int(d), cfg.f_target, cfg.convention, tau_cap=cfg.tau_cap,
                bracket=tuple(cfg.j0_bracket), fast=cfg.fast,
            )
        except UnreachableTargetError:
            rows.append([int(d), l, None, None, None, "unreachable"])
            status = EXIT_COMPUTATION
            continue
        rows.append([int(d), l, res.j0, res.tau_min, res.fidelity, "ok"])
        ok_points.append((float(d), res.tau_min))

    summary: dict = {"f_target": cfg.f_target, "convention": cfg.convention, "n": cfg.n}
    if len(ok_points) >= 3:
        fit = linear_fit(ok_points)
        summary.update(fit_slope=fit.slope, fit_intercept=fit.intercept, fit_r_squared=fit.r_squared)
    table = Table(["distance", "attach_left", "j0_opt", "tau_min", "fidelity", "status"], rows, summary)
    return table, status


COMMANDS = {
    "spectrum": cmd_spectrum,
    "propagate": cmd_propagate,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--n", type=int, help="number of chain sites N")
    common.add_argument("--distance", type=int, help="transfer distance D")
    common.add_argument("--convention", choices=["sites", "bonds"],
                        help="D counts chain sites l..l' (sites) or bonds l'-l (bonds)")
    common.add_argument("--j0", type=float, help="endpoint coupling J0")
    common.add_argument("--mu0", type=float, help="peak gate voltage")
    common.add_argument("--tau", type=float, help="protocol time")
    common.add_argument("--steps", type=int, help="time steps (default: 40 per fastest period)")
    common.add_argument("--f-target", dest="f_target", type=float, help="target fidelity")
    common.add_argument("--emit-plot-script", dest="emit_plot_script", action="store_const",
                        const=True, help="write a matplotlib script next to the output")

    parser = argparse.ArgumentParser(prog="chainbus", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="instantaneous eps_g, eps_1 and gap over [0, tau]")
    sub.add_parser("propagate", parents=[common], help="population traces and final fidelity")
    sp = sub.add_parser("sweep", parents=[common], help="gap / fidelity / adiabaticity sweeps")
    sp.add_argument("--kind", choices=SWEEP_KINDS)
    sub.add_parser("optimize", parents=[common], help="optimal J0 and minimum tau per distance")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        cfg = load_config(args.config, overrides)
        table, status = COMMANDS[args.command](cfg)
    except OSError as exc:
        print(f"chainbus: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"chainbus: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EigensolverError, NormDriftError, UnreachableTargetError, ArithmeticError) as exc:
        print(f"chainbus: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTATION

    text = table.render(cfg.format)
    if cfg.output is None:
        sys.stdout.write(text)
        return status
    try:
        _write_atomic(cfg.output, text)
        if cfg.emit_plot_script:
            _emit_plot_script(cfg.output, args.command)
    except OSError as exc:
        print(f"chainbus: cannot write {cfg.output}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
