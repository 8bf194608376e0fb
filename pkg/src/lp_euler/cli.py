"""
Command line interface ``lp-euler``.

Subcommands: ``decompose``, ``norm``, ``project``, ``bony``, ``verify``,
``simulate`` and ``report``. Data goes to the declared output files (or to
standard output where no file is declared); diagnostics go to standard
error. Exit codes: 0 on success, 2 on invalid input, 3 when a simulation
was stopped by the blow-up guard and 1 on internal errors.
"""

import argparse
from dataclasses import dataclass, field
import hashlib
import json
import logging
import os
import sys
import time

import numpy as np
import scipy.fft

from .core import (
    Grid,
    read_field,
    read_vector_field,
    write_field,
    write_vector_field,
)
from .errors import BlowUpError
from .euler2d import PRESETS, SimConfig, simulate
from .lp import decompose
from .norms import besov_norm, lp_norm, tl_norm, w1inf_norm
from .ops import leray
from .para import bony
from .verify import (
    FieldGenSpec,
    inequality_ids,
    run_inequality,
    stability_sweep,
)
from .version import field_format_version, version


__all__ = [
    "RunManifest",
    "ReportError",
    "build_parser",
    "consolidate",
    "dispatch",
    "main",
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_BLOWUP = 3

# Largest tolerated growth of max_ratio between resolutions in ``report``.
STABILITY_FACTOR = 2.0


class ReportError(ValueError):
    """An input of ``report`` does not match a known schema."""


def _dumps(data):
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as file:
        for chunk in iter(lambda: file.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_text(path, text, outputs):
    with open(path, "w", newline="") as file:
        file.write(text)
    outputs.append(path)


@dataclass(frozen=True)
class RunManifest:
    """
    Provenance of one artifact-producing run.

    Attributes
    ----------
    command: str
    argv: tuple of str
    seeds: tuple of int
    version: str
    grid: dict or None
    wall_time: float
        Seconds.
    outputs: dict
        Output path to its SHA-256 digest.
    """

    command: str
    argv: tuple
    seeds: tuple = ()
    version: str = version
    grid: dict = None
    wall_time: float = 0.0
    outputs: dict = field(default_factory=dict)

    @classmethod
    def collect(cls, command, argv, paths, wall_time, seeds=(), grid=None):
        outputs = {os.fspath(p): _sha256(p) for p in paths}
        return cls(
            command=command,
            argv=tuple(argv),
            seeds=tuple(int(s) for s in seeds),
            grid=None if grid is None else grid.to_dict(),
            wall_time=float(wall_time),
            outputs=outputs,
        )

    def to_dict(self):
        return {
            "command": self.command,
            "argv": list(self.argv),
            "seeds": list(self.seeds),
            "version": self.version,
            "field_format_version": field_format_version,
            "grid": self.grid,
            "wall_time": self.wall_time,
            "outputs": dict(self.outputs),
        }

    def write(self, path):
        with open(path, "w") as file:
            file.write(_dumps(self.to_dict()))


def _manifest_path(output, directory=False):
    if directory:
        return os.path.join(output, "run_manifest.json")
    return os.fspath(output) + ".manifest.json"


def _read_any(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"No such file or directory: {path}")
    if os.path.isdir(path):
        return read_vector_field(path)
    return read_field(path)


# --- subcommands ------------------------------------------------------------


def _cmd_decompose(args):
    f = read_field(args.input)
    decomposition = decompose(f, homogeneous=args.homogeneous)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = []
    names = {}
    for j in decomposition.indices:
        name = f"band_{j}.fld"
        path = os.path.join(args.out_dir, name)
        write_field(decomposition[j], path)
        outputs.append(path)
        names[str(j)] = name
    summary = {
        "j_min": decomposition.j_min,
        "j_max": decomposition.j_max,
        "homogeneous": decomposition.homogeneous,
        "reconstruction_error": decomposition.reconstruction_error,
        "bands": names,
    }
    _write_text(
        os.path.join(args.out_dir, "manifest.json"), _dumps(summary), outputs
    )
    return outputs, _manifest_path(args.out_dir, True), f.grid, ()


def _cmd_norm(args):
    f = _read_any(args.input)
    p = np.inf if args.p == "inf" else float(args.p)
    q = np.inf if args.q == "inf" else float(args.q)
    if args.space == "tl":
        value = tl_norm(f, args.s, homogeneous=args.homogeneous)
    elif args.space == "besov":
        value = besov_norm(f, args.s, p, q, homogeneous=args.homogeneous)
    elif args.space == "lp":
        value = lp_norm(f, p)
    elif args.space == "linf":
        value = lp_norm(f, np.inf)
    else:
        value = w1inf_norm(f)
    text = _dumps(value.to_dict())
    if args.json is None:
        sys.stdout.write(text)
        return [], None, f.grid, ()
    outputs = []
    _write_text(args.json, text, outputs)
    return outputs, _manifest_path(args.json), f.grid, ()


def _cmd_project(args):
    u = read_vector_field(args.input)
    outputs = write_vector_field(leray(u), args.out)
    return outputs, _manifest_path(args.out, True), u.grid, ()


def _cmd_bony(args):
    f = read_field(args.f)
    g = read_field(args.g)
    parts = bony(f, g, homogeneous=args.homogeneous)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = []
    for name, part in (
        ("para_fg", parts.para_fg),
        ("para_gf", parts.para_gf),
        ("remainder", parts.remainder),
    ):
        path = os.path.join(args.out_dir, f"{name}.fld")
        write_field(part, path)
        outputs.append(path)
    report = {"homogeneous": args.homogeneous, "residual": parts.residual}
    _write_text(
        os.path.join(args.out_dir, "residual.json"), _dumps(report), outputs
    )
    return outputs, _manifest_path(args.out_dir, True), f.grid, ()


def _cmd_verify(args):
    grid = Grid(d=args.d, n=args.n, L=args.L)
    ensemble = FieldGenSpec.default(grid, s=args.s, seed=args.seed)
    if args.resolutions:
        sweep = stability_sweep(
            args.id,
            ensemble,
            args.resolutions,
            n_trials=args.trials,
            d=args.d,
            L=args.L,
            s=args.s,
            workers=args.threads,
        )
        data = sweep.to_dict()
        data["reports"] = [r.to_dict() for r in sweep.reports]
        text = _dumps(data)
    else:
        report = run_inequality(
            args.id, ensemble, args.trials, grid, s=args.s,
            workers=args.threads,
        )
        text = report.to_json()
    if args.json is None:
        sys.stdout.write(text)
        return [], None, grid, (args.seed,)
    outputs = []
    _write_text(args.json, text, outputs)
    return outputs, _manifest_path(args.json), grid, (args.seed,)


def _cmd_simulate(args):
    grid = Grid(d=2, n=args.n, L=args.L)
    if args.input is not None:
        initial = read_field(args.input)
        grid = initial.grid
    else:
        initial = args.preset
    config = SimConfig(
        grid,
        dt=args.dt,
        t_end=args.t_end,
        s=args.s,
        C0=args.C0,
        initial_condition=initial,
        dealias=not args.no_dealias,
        monitor_period=args.monitor_period,
        seed=args.seed,
        slope=args.slope,
    )
    trajectory = simulate(config)
    outputs = []
    if args.csv is not None:
        trajectory.to_csv(args.csv)
        outputs.append(args.csv)
    summary = trajectory.summary()
    if args.json is not None:
        _write_text(args.json, _dumps(summary), outputs)
    else:
        sys.stdout.write(_dumps(summary))
    manifest = _manifest_path(outputs[0]) if outputs else None
    if trajectory.stopped:
        raise _Stopped(outputs, manifest, grid, (args.seed,))
    return outputs, manifest, grid, (args.seed,)


class _Stopped(Exception):
    """A simulation ended at the blow-up guard; outputs were written."""

    def __init__(self, *result):
        super().__init__("simulation stopped by the blow-up guard")
        self.result = result


def _classify(path, data):
    if not isinstance(data, dict):
        raise ReportError(f"{path}: expected a JSON object")
    if {"id", "grid", "max_ratio"} <= set(data):
        grid = data["grid"]
        if not isinstance(grid, dict) or "n" not in grid:
            raise ReportError(f"{path}: inequality report without grid.n")
        return "inequality"
    if {"u0_f_norm", "fitted_C0", "global_check"} <= set(data):
        return "simulation"
    raise ReportError(f"{path}: unknown report schema")


def consolidate(paths):
    """
    Merge inequality reports and simulation summaries.

    Parameters
    ----------
    paths: list of str
        JSON files written by ``verify`` or ``simulate``. They are only
        read.

    Returns
    -------
    summary: dict
        ``inequalities`` (sorted by id and n), ``stability`` (per id with
        at least two resolutions: max ratios, growth factor from the
        smallest to the largest resolution and whether it stays within 2)
        and ``simulations``.

    Raises
    ------
    ReportError
        On an unknown schema or two inequality reports with equal id and
        resolution.
    """
    inequalities = {}
    simulations = []
    for path in paths:
        with open(path, "r") as file:
            try:
                data = json.load(file)
            except json.JSONDecodeError as err:
                raise ReportError(f"{path}: invalid JSON ({err})") from None
        kind = _classify(path, data)
        if kind == "simulation":
            entry = {
                key: data.get(key)
                for key in (
                    "u0_f_norm",
                    "fitted_C0",
                    "T0_estimate",
                    "envelope_samples",
                    "blowup_stop",
                    "global_check",
                )
            }
            entry["file"] = os.fspath(path)
            simulations.append(entry)
            continue
        key = (data["id"], int(data["grid"]["n"]))
        if key in inequalities:
            raise ReportError(
                f"{path}: duplicate report for id {key[0]!r} at n={key[1]}"
            )
        inequalities[key] = {
            "id": data["id"],
            "n": key[1],
            "trials": data.get("trials"),
            "excluded": data.get("excluded"),
            "max_ratio": data["max_ratio"],
            "mean_ratio": data.get("mean_ratio"),
            "file": os.fspath(path),
        }
    rows = [inequalities[key] for key in sorted(inequalities)]
    stability = {}
    for name in sorted({row["id"] for row in rows}):
        series = [row for row in rows if row["id"] == name]
        if len(series) < 2:
            continue
        first, last = series[0]["max_ratio"], series[-1]["max_ratio"]
        growth = None if not first or last is None else last / first
        stability[name] = {
            "resolutions": [row["n"] for row in series],
            "max_ratios": [row["max_ratio"] for row in series],
            "growth": growth,
            "passed": growth is not None and growth <= STABILITY_FACTOR,
        }
    return {
        "inequalities": rows,
        "stability": stability,
        "simulations": simulations,
    }


def _format_table(summary):
    lines = []
    if summary["inequalities"]:
        lines.append(f"{'id':<16}{'n':>6}{'max_ratio':>24}{'growth':>12}")
        for row in summary["inequalities"]:
            growth = summary["stability"].get(row["id"], {}).get("growth")
            growth = "" if growth is None else f"{growth:.4g}"
            lines.append(
                f"{row['id']:<16}{row['n']:>6}"
                f"{row['max_ratio']!r:>24}{growth:>12}"
            )
    for sim in summary["simulations"]:
        lines.append(
            f"simulation {sim['file']}: C0={sim['fitted_C0']!r} "
            f"global_check={sim['global_check']}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def _cmd_report(args):
    summary = consolidate(args.inputs)
    sys.stdout.write(_format_table(summary))
    if args.json is None:
        return [], None, None, ()
    outputs = []
    _write_text(args.json, _dumps(summary), outputs)
    return outputs, _manifest_path(args.json), None, ()


# --- parser -----------------------------------------------------------------


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(
            f"expected a positive integer, got {text}"
        )
    return value


def _exponent(text):
    if text != "inf":
        float(text)
    return text


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="more diagnostics on standard error",
    )
    common.add_argument(
        "--quiet", action="store_true", help="only report errors"
    )
    common.add_argument(
        "--threads", type=_positive_int, default=1,
        help="cap on FFT workers and concurrent trials",
    )

    parser = argparse.ArgumentParser(
        prog="lp-euler",
        description="Littlewood-Paley calculus and 2D Euler diagnostics.",
        parents=[common],
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"lp-euler {version} (field format {field_format_version})",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser(
        "decompose", parents=[common], help="dyadic blocks of a field"
    )
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--homogeneous", action="store_true")
    p.set_defaults(handler=_cmd_decompose)

    p = sub.add_parser("norm", parents=[common], help="norm of a field")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument(
        "--space", choices=("tl", "besov", "lp", "linf", "w1inf"),
        default="tl",
    )
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--p", type=_exponent, default="1")
    p.add_argument("--q", type=_exponent, default="inf")
    p.add_argument("--homogeneous", action="store_true")
    p.add_argument("--json", default=None)
    p.set_defaults(handler=_cmd_norm)

    p = sub.add_parser(
        "project", parents=[common], help="Leray projection of a vector field"
    )
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_project)

    p = sub.add_parser(
        "bony", parents=[common], help="Bony decomposition of a product"
    )
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--homogeneous", action="store_true")
    p.set_defaults(handler=_cmd_bony)

    p = sub.add_parser(
        "verify", parents=[common], help="ensemble check of an estimate"
    )
    p.add_argument("--id", required=True, choices=inequality_ids())
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", type=float, default=None)
    p.add_argument(
        "--resolutions", type=int, nargs="+", default=None,
        help="run a stability sweep over these grid sizes",
    )
    p.add_argument("--json", default=None)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="2D Euler run")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--preset", choices=PRESETS, default="taylor-green")
    source.add_argument("--in", dest="input", default=None)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--s", type=float, default=3.0)
    p.add_argument("--C0", type=float, default=None)
    p.add_argument("--no-dealias", action="store_true")
    p.add_argument("--monitor-period", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slope", type=float, default=None)
    p.add_argument("--csv", default=None)
    p.add_argument("--json", default=None)
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser(
        "report", parents=[common], help="merge JSON reports"
    )
    p.add_argument("inputs", nargs="*")
    p.add_argument("--json", default=None)
    p.set_defaults(handler=_cmd_report)
    return parser


def _configure_logging(args):
    if args.quiet:
        level = logging.ERROR
    elif args.verbose >= 2:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    logging.captureWarnings(True)


def _finish(args, argv, result, started):
    outputs, manifest, grid, seeds = result
    if manifest is None:
        return
    RunManifest.collect(
        args.command,
        argv,
        outputs,
        time.perf_counter() - started,
        seeds=seeds,
        grid=grid,
    ).write(manifest)


def dispatch(argv):
    """
    Parse ``argv`` and run the subcommand.

    Returns
    -------
    code: int
        0 on success, 2 on invalid input, 3 on a blow-up stop, 1 on an
        internal error.
    """
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    _configure_logging(args)
    started = time.perf_counter()
    try:
        with scipy.fft.set_workers(args.threads):
            result = args.handler(args)
    except _Stopped as stop:
        _finish(args, argv, stop.result, started)
        logger.error("%s", stop)
        return EXIT_BLOWUP
    except BlowUpError as err:
        logger.error("%s", err)
        return EXIT_BLOWUP
    except (ValueError, TypeError, OSError) as err:
        print(f"lp-euler {args.command}: error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        logger.exception("Internal error in %s", args.command)
        return EXIT_INTERNAL
    _finish(args, argv, result, started)
    return EXIT_OK


def main(argv=None):
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
