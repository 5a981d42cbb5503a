"""Command-line experiment runner.

Subcommands::

    dnls3d run            single simulation, one diagnostics row per sample
    dnls3d converge-time  error/rate table over a list of time steps
    dnls3d converge-space error table over a list of grid sizes
    dnls3d conservation   long-run mass/energy residual series

Every option can also come from a flat ``key=value`` file given with
``--config``; command-line flags override it.  Exit codes: 0 success,
2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from .diagnostics import DiagnosticsRow, RateTable
from .grid import Grid3, TimeGrid
from .model import ExactSolution, PdeParams
from .schemes import InstabilityError, Scheme, SolverConfig, SolverError, run_to_time
from .snapshot import write_snapshot

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
CSV_HEADER = ("n", "t", "mass", "energy", "rm", "re", "err_l2", "err_inf")
TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scheme: str = "licfp"
    n: tuple[int, ...] = (16, 16, 16)
    lengths: tuple[float, ...] = (TWO_PI, TWO_PI, TWO_PI)
    tau: float = 0.1
    t_final: float = 1.0
    beta: float = 2.0
    gamma: float = 1.0
    amplitude: complex = 1 + 0j
    wave_k: tuple[int, ...] = (1, 1, 1)
    exact: bool = True
    tol: float = 1e-14
    max_iters: int = 500
    solver: str = "fourier"
    sample_every: int = 1
    taus: tuple[float, ...] = ()
    ns: tuple[int, ...] = ()
    out: str = ""
    format: str = "csv"
    snapshot_dir: str = ""

    # -- flat text round trip -------------------------------------------------

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                text = ",".join(repr(v) for v in value)
            elif isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, (float, complex)):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{f.name}={text}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
            key, raw = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = raw
        return cls().updated(values)

    def updated(self, raw: dict) -> "ExperimentConfig":
        """Copy with string-valued overrides parsed per field type."""
        known = {f.name: f for f in fields(self)}
        parsed = {}
        for key, text in raw.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            default = getattr(ExperimentConfig(), key)
            try:
                parsed[key] = _parse_like(default, text, key)
            except ValueError as err:
                raise ConfigError(f"bad value for {key}: {text!r} ({err})") from None
        return dataclasses.replace(self, **parsed)

    # -- validation -----------------------------------------------------------

    def schemes(self) -> list[Scheme]:
        try:
            return [Scheme(s.strip()) for s in self.scheme.split(",") if s.strip()]
        except ValueError:
            raise ConfigError(f"unknown scheme in {self.scheme!r}; choose from licfp, ifd, rk3") from None

    def grid(self, n: int | Sequence[int] | None = None) -> Grid3:
        counts = self.n if n is None else n
        if isinstance(counts, int):
            counts = (counts,) * 3
        if len(counts) == 1:
            counts = tuple(counts) * 3
        lengths = tuple(self.lengths) * 3 if len(self.lengths) == 1 else tuple(self.lengths)
        try:
            return Grid3(tuple(counts), lengths)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def params(self) -> PdeParams:
        try:
            return PdeParams(self.beta, self.gamma)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def solution(self) -> ExactSolution:
        try:
            return ExactSolution(self.params(), self.amplitude, tuple(self.wave_k))
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def solver_config(self) -> SolverConfig:
        try:
            return SolverConfig(self.tol, self.max_iters, self.solver)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def time_grid(self, tau: float | None = None) -> TimeGrid:
        try:
            return TimeGrid.from_final_time(self.tau if tau is None else tau, self.t_final)
        except ValueError as err:
            raise ConfigError(str(err)) from None

    def validate(self, single_scheme: bool = True) -> None:
        schemes = self.schemes()
        if not schemes:
            raise ConfigError("no scheme given")
        if single_scheme and len(schemes) != 1:
            raise ConfigError("this command takes exactly one scheme")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}")
        if self.sample_every < 1:
            raise ConfigError("sample_every must be >= 1")
        if len(self.wave_k) != 3:
            raise ConfigError("wave_k needs three integers")
        grid = self.grid()
        try:
            self.solution().check_grid(grid)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        self.solver_config()
        self.time_grid()


def _parse_like(default, text: str, key: str):
    if isinstance(default, bool):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")
    if isinstance(default, tuple):
        items = [s for s in text.replace(" ", "").split(",") if s]
        kind = int if key in ("n", "wave_k", "ns") else float
        return tuple(_parse_scalar(kind, s) for s in items)
    if isinstance(default, int):
        return _parse_scalar(int, text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, complex):
        return complex(text.replace(" ", ""))
    return text


def _parse_scalar(kind, s: str):
    if kind is int:
        value = float(s)
        if value != int(value):
            raise ValueError(f"{s} is not an integer")
        return int(value)
    return float(s)


# -- helpers --------------------------------------------------------------------


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DNLS_THREADS", "1")))
    except ValueError:
        return 1


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(x, ".17g")


def write_rows(rows: list[DiagnosticsRow], fmt: str, fh) -> None:
    if fmt == "json":
        json.dump([r.as_dict() for r in rows], fh, indent=1)
        fh.write("\n")
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(v) for v in r.as_dict().values()])


def _emit(text_writer, path: str, fmt: str, payload) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            text_writer(payload, fmt, fh)
    else:
        text_writer(payload, fmt, sys.stdout)


def simulate(cfg: ExperimentConfig, scheme: Scheme | None = None, grid: Grid3 | None = None, tau: float | None = None):
    """Run one configured simulation and return its diagnostics rows."""
    grid = grid or cfg.grid()
    scheme = scheme or cfg.schemes()[0]
    sol = cfg.solution()
    sol.check_grid(grid)
    snapdir = Path(cfg.snapshot_dir) if cfg.snapshot_dir else None
    if snapdir:
        snapdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for row, U in run_to_time(
        sol.u(0.0, grid),
        scheme,
        grid,
        cfg.params(),
        cfg.time_grid(tau),
        cfg.solver_config(),
        cfg.sample_every,
        sol if cfg.exact else None,
    ):
        rows.append(row)
        if snapdir:
            write_snapshot(snapdir / f"{scheme.value}_step{row.n:08d}.bin", grid, U, row.t)
    return rows


# -- commands -------------------------------------------------------------------


def cmd_run(cfg: ExperimentConfig) -> int:
    cfg.validate()
    rows = simulate(cfg)
    _emit(write_rows, cfg.out, cfg.format, rows)
    return EXIT_OK


def _sweep(cfg: ExperimentConfig, jobs: list[dict]) -> list[DiagnosticsRow | Exception]:
    def one(job):
        try:
            return simulate(cfg, **job)[-1]
        except (SolverError, InstabilityError) as err:
            return err

    workers = min(_threads(), len(jobs))
    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(workers) as pool:
            return list(pool.map(one, jobs))
    return [one(job) for job in jobs]


def _write_table(table: RateTable, statuses: list[str], fmt: str, fh) -> None:
    records = [
        {table.label: s, "err_l2": e2, "rate_l2": r2, "err_inf": ei, "rate_inf": ri, "status": st}
        for (s, e2, ei, r2, ri), st in zip(table.rows(), statuses)
    ]
    if fmt == "json":
        json.dump(records, fh, indent=1)
        fh.write("\n")
        return
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(records[0].keys() if records else [])
    for rec in records:
        w.writerow([_fmt(v) if not isinstance(v, str) else v for v in rec.values()])


def _table_from(label, steps, results) -> tuple[RateTable, list[str]]:
    err_l2, err_inf, status = [], [], []
    for res in results:
        if isinstance(res, Exception):
            err_l2.append(None)
            err_inf.append(None)
            status.append(f"failed: {res}")
        else:
            err_l2.append(res.err_l2)
            err_inf.append(res.err_inf)
            status.append("ok")
    return RateTable(label, list(steps), err_l2, err_inf), status


def cmd_converge_time(cfg: ExperimentConfig) -> int:
    cfg.validate()
    if not cfg.exact:
        raise ConfigError("convergence studies need the exact solution")
    taus = sorted(set(cfg.taus or (cfg.tau,)), reverse=True)
    for tau in taus:
        cfg.time_grid(tau)
    results = _sweep(cfg, [{"tau": tau} for tau in taus])
    table, status = _table_from("tau", taus, results)
    print(table.format())
    if cfg.out:
        _emit(lambda p, f, fh: _write_table(p, status, f, fh), cfg.out, cfg.format, table)
    return EXIT_NUMERIC if any(s != "ok" for s in status) else EXIT_OK


def cmd_converge_space(cfg: ExperimentConfig) -> int:
    cfg.validate()
    if not cfg.exact:
        raise ConfigError("convergence studies need the exact solution")
    ns = list(cfg.ns or cfg.n[:1])
    grids = [cfg.grid(n) for n in ns]
    for g in grids:
        try:
            cfg.solution().check_grid(g)
        except ValueError as err:
            raise ConfigError(str(err)) from None
    results = _sweep(cfg, [{"grid": g} for g in grids])
    table, status = _table_from("N", ns, results)
    # errors are expected to be N-independent once resolved; rates are not meaningful
    table.rate_l2 = [None] * len(ns)
    table.rate_inf = [None] * len(ns)
    print(table.format())
    if cfg.out:
        _emit(lambda p, f, fh: _write_table(p, status, f, fh), cfg.out, cfg.format, table)
    return EXIT_NUMERIC if any(s != "ok" for s in status) else EXIT_OK


def cmd_conservation(cfg: ExperimentConfig) -> int:
    cfg.validate(single_scheme=False)
    schemes = cfg.schemes()
    code = EXIT_OK
    for scheme in schemes:
        try:
            rows = simulate(cfg, scheme=scheme)
        except (SolverError, InstabilityError) as err:
            print(f"{scheme.value}: {err}", file=sys.stderr)
            code = EXIT_NUMERIC
            continue
        print(f"{scheme.value}: max RM = {max(r.rm for r in rows):.3e}, max RE = {max(r.re for r in rows):.3e}")
        if cfg.out:
            path = cfg.out
            if len(schemes) > 1:
                p = Path(cfg.out)
                path = str(p.with_name(f"{p.stem}_{scheme.value}{p.suffix}"))
            _emit(write_rows, path, cfg.format, rows)
    return code


COMMANDS = {
    "run": cmd_run,
    "converge-time": cmd_converge_time,
    "converge-space": cmd_converge_space,
    "conservation": cmd_conservation,
}

# flag -> config key
FLAGS = {
    "--scheme": "scheme",
    "--n": "n",
    "--lengths": "lengths",
    "--tau": "tau",
    "--t-final": "t_final",
    "--beta": "beta",
    "--gamma": "gamma",
    "--wave-k": "wave_k",
    "--amplitude": "amplitude",
    "--tol": "tol",
    "--max-iters": "max_iters",
    "--solver": "solver",
    "--sample-every": "sample_every",
    "--taus": "taus",
    "--ns": "ns",
    "--out": "out",
    "--format": "format",
    "--snapshot-dir": "snapshot_dir",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dnls3d", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key=value file; flags override it")
        for flag, key in FLAGS.items():
            p.add_argument(flag, dest=key, default=None, metavar=key.upper())
        p.add_argument("--no-exact", dest="exact", action="store_const", const="false", default=None,
                       help="skip error columns")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config") and v is not None}
    try:
        cfg = ExperimentConfig()
        if args.config:
            cfg = ExperimentConfig.from_text(Path(args.config).read_text())
        cfg = cfg.updated(overrides)
        return COMMANDS[args.command](cfg)
    except (ConfigError, OSError) as err:
        print(f"dnls3d: configuration error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, InstabilityError) as err:
        print(f"dnls3d: numerical failure at {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
