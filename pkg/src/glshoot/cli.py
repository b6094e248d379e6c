"""Command-line front end: run orchestration and CSV/JSON export.

Exit codes: 0 success, 2 configuration error, 3 solver failure.  Output
files are written atomically (temp file + rename) and numbers are formatted
as shortest round-trip decimals, so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Any, Iterable, Optional, Sequence

from . import observables, shooting
from .config import CONFIG_SCHEMA, ConfigError, RunConfig, convert_override, parse_config_text
from .fixed_points import (
    check_cond_max,
    fixed_point_absences,
    fixed_points,
    minima_conditions,
)
from .integrator import dense_resample

__all__ = ["main"]

TABLE2_HEADER = ["#", "phi0", "chi0", "mu1", "mu2", "M"]
TABLE3_HEADER = ["phi0_bar", "chi0_bar", "mu", "M_bar"]
FIG3_HEADER = ["chi0", "mu1", "mu2", "M"]
FIG6_HEADER = ["mu", "phi0_bar", "chi0_bar", "M_bar"]


def _fmt(value: Any) -> str:
    """Shortest round-trip decimal for floats, plain str otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))  # float() strips numpy scalar wrappers
    if isinstance(value, complex):
        return repr(complex(value))
    return str(value)


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    _atomic_write(path, buf.getvalue())


def _json_ready(value: Any) -> Any:
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(value)
    if isinstance(value, int):
        return int(value)
    return value


def _write_json(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    records = [
        {key: _json_ready(v) for key, v in zip(header, row)} for row in rows
    ]
    _atomic_write(path, json.dumps(records, indent=2) + "\n")


def _export(cfg: RunConfig, name: str, header: Sequence[str],
            rows: Sequence[Sequence[Any]]) -> list[str]:
    written = []
    for fmt in cfg.formats:
        path = os.path.join(cfg.out_dir, f"{name}.{fmt}")
        if fmt == "csv":
            _write_csv(path, header, rows)
        else:
            _write_json(path, header, rows)
        written.append(path)
    return written


# -- subcommands -------------------------------------------------------------


def cmd_fixed_points(cfg: RunConfig) -> int:
    p = cfg.model_params()
    points = fixed_points(p)
    absences = fixed_point_absences(p)
    conds = minima_conditions(p)
    cond_max = check_cond_max(p)

    header = [
        "label", "phi", "chi", "potential", "classification", "spectrum",
        "k1", "k2", "k3", "k4", "eig1", "eig2", "eig3", "eig4",
    ]
    rows = []
    for fp in points:
        rows.append(
            [fp.label, fp.location[0], fp.location[1], fp.potential_value,
             fp.classification, fp.spectrum, *fp.char_roots_paper,
             *fp.jacobian_eigenvalues]
        )
    written = _export(cfg, "fixed_points", header, rows)

    print(f"model: eps=({p.eps1},{p.eps2}) lambda=({_fmt(p.lambda1)},{_fmt(p.lambda2)}) "
          f"mu=({_fmt(p.mu1)},{_fmt(p.mu2)})")
    print(f"minima conditions: local_ok={conds.local_ok} global_ok={conds.global_ok}")
    print(f"max(V_A, V_C) <= V_E: {cond_max}")
    for fp in points:
        loc = f"({fp.location[0]:+.6f}, {fp.location[1]:+.6f})"
        print(f"  {fp.label:<4} {loc:<24} V={fp.potential_value:+.6f}  {fp.classification}"
              + (f"  [{fp.note}]" if fp.note else ""))
    for label, reason in absences.items():
        print(f"  {label:<4} {reason}")
    for path in written:
        print(f"wrote {path}")
    return 0


def _solve_single(cfg: RunConfig, chi0: float) -> shooting.EigenResult:
    spec = cfg.shoot_spec(chi0)
    return shooting.solve_eigenpair(spec)


def cmd_solve(cfg: RunConfig) -> int:
    chi0s = cfg.chi0_values
    if len(chi0s) != 1:
        raise ConfigError(
            f"solve needs exactly one shooting.chi0 value, got {len(chi0s)}; "
            "use the sweep command for several"
        )
    chi0 = chi0s[0]
    phi0 = cfg.get("shooting.phi0")
    result = _solve_single(cfg, chi0)
    p = result.trajectory.params

    n_grid = 1001
    dense = dense_resample(result.trajectory, n_grid)
    grid = list(-dense.x[:0:-1]) + list(dense.x)
    phi = list(dense.phi[:0:-1]) + list(dense.phi)
    chi = list(dense.chi[:0:-1]) + list(dense.chi)
    _export(cfg, "fields", ["x", "phi", "chi"], list(zip(grid, phi, chi)))

    profile = observables.energy_profile(p, result.trajectory, n_grid)
    _export(cfg, "energy", ["x", "epsilon"], list(zip(profile.grid, profile.density)))

    series = observables.phase_series(result.trajectory, n_grid)
    _export(cfg, "phase_phi", ["phi", "dphi"], [tuple(r) for r in series.phi_series])
    _export(cfg, "phase_chi", ["chi", "dchi"], [tuple(r) for r in series.chi_series])

    _export(cfg, "result", ["phi0", "chi0", "mu1", "mu2", "M"],
            [[phi0, chi0, result.mu1, result.mu2, result.total_energy]])

    print(f"{_fmt(phi0)} {_fmt(chi0)} {_fmt(result.mu1)} {_fmt(result.mu2)} "
          f"{_fmt(result.total_energy)}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    rows = shooting.sweep(
        cfg.chi0_values,
        cfg.shoot_spec(cfg.chi0_values[0]),
        warm_start=cfg.get("shooting.warm_start"),
        workers=cfg.get("shooting.workers"),
    )
    phi0 = cfg.get("shooting.phi0")

    table2, table3, fig3, fig6, failures = [], [], [], [], []
    for i, row in enumerate(rows, start=1):
        if row.result is None:
            failures.append({"chi0": row.chi0, "error": row.error})
            continue
        r = row.result
        table2.append([i, phi0, row.chi0, r.mu1, r.mu2, r.total_energy])
        scaled = observables.rescale_result(r, phi0, row.chi0)
        table3.append([scaled.phi0_bar, scaled.chi0_bar, scaled.mu, scaled.M_bar])
        fig3.append([row.chi0, r.mu1, r.mu2, r.total_energy])
        fig6.append([scaled.mu, scaled.phi0_bar, scaled.chi0_bar, scaled.M_bar])

    written = []
    written += _export(cfg, "table2", TABLE2_HEADER, table2)
    written += _export(cfg, "table3", TABLE3_HEADER, table3)
    written += _export(cfg, "fig3", FIG3_HEADER, fig3)
    written += _export(cfg, "fig6", FIG6_HEADER, fig6)

    for row in table2:
        print(" ".join(_fmt(v) for v in row))
    for path in written:
        print(f"wrote {path}")

    if failures:
        manifest = os.path.join(cfg.out_dir, "failures.json")
        _atomic_write(manifest, json.dumps(failures, indent=2) + "\n")
        print(f"wrote {manifest}", file=sys.stderr)
        for f in failures:
            print(f"row chi0={f['chi0']} failed: {f['error']}", file=sys.stderr)
        return 3
    return 0


def _read_table(path: str, expect_header: Sequence[str]) -> list[list[float]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != list(expect_header):
                raise ConfigError(
                    f"{path}: expected header {','.join(expect_header)}, "
                    f"got {','.join(header or [])}"
                )
            return [[float(v) for v in row] for row in reader if row]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"{path}: non-numeric cell ({exc})") from None


def cmd_rescale(cfg: RunConfig, input_path: str, inverse: bool) -> int:
    if not inverse:
        rows = _read_table(input_path, TABLE2_HEADER)
        out = []
        for _idx, _phi0, chi0, mu1, mu2, M in rows:
            out.append([_phi0 / mu1, chi0 / mu1, mu2 / mu1, M / mu1 ** 3])
        written = _export(cfg, "table3", TABLE3_HEADER, out)
    else:
        rows = _read_table(input_path, TABLE3_HEADER)
        out = []
        for i, (phi0_bar, chi0_bar, mu, M_bar) in enumerate(rows, start=1):
            phi0, chi0, mu1, mu2, M = observables.inverse_rescale(
                phi0_bar, chi0_bar, mu, M_bar
            )
            out.append([i, phi0, chi0, mu1, mu2, M])
        written = _export(cfg, "table2", TABLE2_HEADER, out)
    for path in written:
        print(f"wrote {path}")
    return 0


# -- argument parsing ---------------------------------------------------------


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", metavar="PATH", help="config file to load")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--format", choices=["csv", "json"], help="output format")
    common.add_argument(
        "--paper-defaults",
        action="store_true",
        help="load the reference setup: eps=+1/+1, lambda=(0.1, 1.0), the 8 chi0 values",
    )
    common.add_argument("--workers", type=int, metavar="N", help="concurrent sweep rows")
    for key, (_conv, help_text) in CONFIG_SCHEMA.items():
        common.add_argument(f"--{key}", metavar="V", dest=key, help=help_text)
    return common


def _build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="glshoot",
        description="Coupled Ginzburg-Landau fixed points, shooting and exports",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fixed-points", parents=[common],
                   help="classify the fixed points of the model")
    sub.add_parser("solve", parents=[common],
                   help="solve one eigen-problem and export profiles")
    sub.add_parser("sweep", parents=[common],
                   help="solve a chi0 sweep and export the summary tables")
    rescale = sub.add_parser("rescale", parents=[common],
                             help="apply the rescaling map to a table2-schema CSV")
    rescale.add_argument("input", metavar="CSV", help="input table path")
    rescale.add_argument("--inverse", action="store_true", default=argparse.SUPPRESS,
                         help="map a table3-schema CSV back")
    return parser


def _config_from_args(ns: argparse.Namespace) -> RunConfig:
    file_values = None
    if getattr(ns, "config", None):
        try:
            with open(ns.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        file_values = parse_config_text(text, source=ns.config)

    overrides: dict[str, Any] = {}
    for key in CONFIG_SCHEMA:
        raw = getattr(ns, key, None)
        if raw is not None:
            overrides[key] = convert_override(key, raw)
    if getattr(ns, "out", None):
        overrides["output.directory"] = ns.out
    if getattr(ns, "format", None):
        overrides["output.formats"] = (ns.format,)
    if getattr(ns, "workers", None) is not None:
        overrides["shooting.workers"] = ns.workers

    return RunConfig.build(
        file_values=file_values,
        overrides=overrides,
        paper_defaults=getattr(ns, "paper_defaults", False),
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = _config_from_args(ns)
        if ns.command == "fixed-points":
            return cmd_fixed_points(cfg)
        if ns.command == "solve":
            return cmd_solve(cfg)
        if ns.command == "sweep":
            return cmd_sweep(cfg)
        if ns.command == "rescale":
            return cmd_rescale(cfg, ns.input, getattr(ns, "inverse", False))
        raise ConfigError(f"unknown command {ns.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except shooting.ShootingError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
