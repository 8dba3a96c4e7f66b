"""Command-line front end.

Subcommands: ``theory``, ``simulate``, ``analyze``, ``bounds``, ``ngon-sweep``.
Tables (``--format table``) are whitespace aligned with a ``#`` header line,
so ``numpy.loadtxt`` reads them directly.  ``--format doc`` emits JSON.

Exit status: 0 ok, 1 usage error, 2 data or I/O error, 3 a ``--expect-*``
check failed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import os
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .ngon import NgonConfig, Order, SequenceMode, check_n, compatibility_angle
from .shotfile import ShotFileError, read_shots, write_shots, ADAPTERS
from .simulator import NoiseModel, RunPlan, run
from .stats import IncompleteDatasetError, WitnessReport, analyze, violation_significance, UndefinedSignificanceError
from .theory import bounds, expected_s_ext, ngon_theory, s5_ext_theory, s5_theory, epsilon_theory

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_EXPECT = 0, 1, 2, 3
OUTPUT_DIR_ENV = "KCBS_OUTPUT_DIR"
TABLE_S2_N = (5, 7, 11, 17, 23, 31, 41, 51, 61, 81, 101, 121)

_ANGLE = re.compile(
    r"^\s*(?:(?P<compat>compat)\s*(?:(?P<sign>[+-])\s*(?P<off>[0-9.eE+-]+)\s*(?P<ounit>deg|rad))?"
    r"|(?P<val>[+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)\s*(?P<unit>deg|rad))\s*$"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_angle(text: str, N: int) -> float:
    """``compat``, ``compat+0.1rad``, ``48deg`` or ``0.84rad``; a unit is required."""
    m = _ANGLE.match(text)
    if not m:
        raise UsageError(f"cannot parse angle {text!r}; use compat, compat+Xrad, Xdeg or Xrad")
    if m["compat"]:
        theta = compatibility_angle(N)
        if m["off"] is not None:
            off = float(m["off"])
            off = math.radians(off) if m["ounit"] == "deg" else off
            theta += off if m["sign"] == "+" else -off
    else:
        v = float(m["val"])
        theta = math.radians(v) if m["unit"] == "deg" else v
    if not 0.0 <= theta <= math.pi / 2 + 1e-12:
        raise UsageError(f"angle {text!r} = {theta:.6g} rad lies outside [0, pi/2]")
    return min(theta, math.pi / 2)


def parse_angle_range(text: str, N: int) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--theta-range expects START:STOP:COUNT, got {text!r}")
    try:
        count = int(parts[2])
    except ValueError:
        raise UsageError(f"COUNT in --theta-range must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise UsageError("COUNT in --theta-range must be >= 1")
    return np.linspace(parse_angle(parts[0], N), parse_angle(parts[1], N), count)


def _estimate(e, unit="dimensionless") -> dict:
    return {"value": e.value, "se": e.se, "unit": unit}


def report_doc(report: WitnessReport) -> dict:
    b = report.bounds
    try:
        sig_bare, sig_ext = violation_significance(report)
    except UndefinedSignificanceError:
        sig_bare = sig_ext = None
    return {
        "N": report.N,
        "order": report.order.value,
        "theta_est": _estimate(report.theta_est, "rad"),
        "S": _estimate(report.S),
        "epsilon_terms": list(report.epsilon_terms),
        "epsilon": _estimate(report.epsilon),
        "epsilon_dominated": report.epsilon_dominated,
        "S_ext": _estimate(report.S_ext),
        "CF": _estimate(report.CF),
        "saturation": _estimate(report.saturation),
        "normalized_signaling": _estimate(report.normalized_signaling),
        "significance_sigma": {"bare": sig_bare, "ext": sig_ext},
        "contextual": report.contextual,
        "bounds": {"nc": b.nc, "qm": b.qm, "ns": b.ns, "bell": b.bell, "ideal_cf": b.ideal_cf},
    }


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return t.replace(microsecond=0).isoformat()


def provenance(path: Path | None = None) -> dict:
    doc = {"tool": "qutrit-kcbs", "version": __version__, "timestamp": _timestamp()}
    if path is not None:
        doc["input"] = {"path": str(path), "sha256": hashlib.sha256(path.read_bytes()).hexdigest()}
    return doc


def format_table(columns: list[str], rows: list[list]) -> str:
    def cell(v):
        if isinstance(v, float):
            return "nan" if math.isnan(v) else f"{v:.6f}"
        return str(v)

    cells = [[cell(v) for v in r] for r in rows]
    header = ["# " + columns[0]] + columns[1:]
    widths = [max(len(h), *(len(r[k]) for r in cells)) if cells else len(h) for k, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _n_list(values) -> list[int]:
    try:
        return [check_n(n) for n in values]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _noise(spec: str) -> NoiseModel:
    if spec in ("ideal", "calibrated"):
        return NoiseModel.preset(spec)
    path = Path(spec)
    if not path.is_file():
        raise UsageError(f"--noise must be ideal, calibrated or a readable JSON file; got {spec!r}")
    try:
        return NoiseModel.from_file(path)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"invalid noise file {spec}: {exc}") from None


def _orders(spec: str) -> tuple:
    return {"normal": (Order.NORMAL,), "reverse": (Order.REVERSE,), "both": (Order.NORMAL, Order.REVERSE)}[spec]


def _plan(args, N: int, theta: float) -> RunPlan:
    if args.reps < 1 or args.workers < 1 or args.slow_noise < 0:
        raise UsageError("--reps and --workers must be >= 1 and --slow-noise >= 0")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    noise = _noise(args.noise)
    if args.slow_noise:
        noise = replace(noise, block_reps=args.slow_noise)
    return RunPlan(
        NgonConfig(N, theta, SequenceMode(args.mode)), _orders(args.order), args.reps, args.seed, noise,
    )


def _single_n(args) -> int:
    if len(args.n_obs) != 1:
        raise UsageError(f"{args.command} takes a single --n-obs value")
    return _n_list(args.n_obs)[0]


def cmd_theory(args) -> int:
    N = _single_n(args)
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    thetas = parse_angle_range(args.theta_range, N) if args.theta_range else [parse_angle(args.theta, N)]
    b = bounds(N)
    cols = ["theta", "S", "epsilon", "S_ext", "E_S_ext", "nc", "qm", "ns", "bell"]
    rows = []
    for th in thetas:
        if N == 5:
            S, eps, S_ext = s5_theory(th), 5 * epsilon_theory(th), s5_ext_theory(th)
        else:
            t = ngon_theory(N, th)
            S, eps, S_ext = t.S, t.epsilon, t.S_ext
        rows.append([float(th), S, eps, S_ext, expected_s_ext(th, args.reps, N), b.nc, b.qm, b.ns, b.bell])
    if args.format == "doc":
        doc = {"N": N, "n": args.reps, "units": {"theta": "rad"}, "rows": [dict(zip(cols, r)) for r in rows],
               "provenance": provenance()}
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        _emit(args, format_table(cols, rows))
    return EXIT_OK


def _default_out(args, N: int) -> Path:
    base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    return base / f"shots_N{N}_seed{args.seed}.csv"


def cmd_simulate(args) -> int:
    N = _single_n(args)
    plan = _plan(args, N, parse_angle(args.theta, N))
    table = run(plan, workers=args.workers)
    out = Path(args.out) if args.out else _default_out(args, N)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_shots(table, out)
    print(f"wrote {len(table)} records ({N} pairs x {len(plan.orders)} order(s) x {plan.n_per_pair} reps) "
          f"to {out} (seed {plan.seed})")
    return EXIT_OK


def _analysis_rows(reports: dict) -> tuple[list[str], list[list]]:
    cols = ["N", "order", "theta_est", "theta_se", "S", "S_se", "epsilon", "epsilon_se",
            "S_ext", "S_ext_se", "CF", "CF_se", "saturation", "norm_signaling", "sigma_bare", "sigma_ext"]
    rows = []
    for o, r in reports.items():
        try:
            sb, se = violation_significance(r)
        except UndefinedSignificanceError:
            sb = se = math.nan
        rows.append([r.N, o.value, r.theta_est.value, r.theta_est.se, r.S.value, r.S.se, r.epsilon.value,
                     r.epsilon.se, r.S_ext.value, r.S_ext.se, r.CF.value, r.CF.se, r.saturation.value,
                     r.normalized_signaling.value, sb, se])
    return cols, rows


def cmd_analyze(args) -> int:
    path = Path(args.path)
    table = read_shots(path, args.adapter)
    reports = analyze(table)
    if args.format == "doc":
        doc = {"reports": [report_doc(r) for r in reports.values()], "provenance": provenance(path)}
        _emit(args, json.dumps(doc, indent=2) + "\n")
    else:
        _emit(args, format_table(*_analysis_rows(reports)))
    if args.expect_contextual and not all(r.contextual for r in reports.values()):
        print("expectation failed: S_ext >= classical bound", file=sys.stderr)
        return EXIT_EXPECT
    return EXIT_OK


def cmd_bounds(args) -> int:
    cols = ["N", "nc", "qm", "ns", "bell", "ideal_cf"]
    rows = []
    for N in _n_list(args.n_obs):
        b = bounds(N)
        rows.append([N, b.nc, b.qm, b.ns, b.bell, b.ideal_cf])
    if args.format == "doc":
        _emit(args, json.dumps({"rows": [dict(zip(cols, r)) for r in rows], "provenance": provenance()}, indent=2) + "\n")
    else:
        _emit(args, format_table(cols, rows))
    return EXIT_OK


def cmd_ngon_sweep(args) -> int:
    cols = ["N", "theta", "S", "S_se", "S_ext", "S_ext_se", "gap", "gap_ext", "CF", "CF_se"]
    rows, docs = [], []
    for N in _n_list(args.n_obs or TABLE_S2_N):
        plan = _plan(args, N, compatibility_angle(N))
        reports = analyze(run(plan, workers=args.workers))
        for r in reports.values():
            nc = r.bounds.nc
            rows.append([N, plan.config.theta, r.S.value, r.S.se, r.S_ext.value, r.S_ext.se,
                         (r.S.value - nc) / abs(nc), (r.S_ext.value - nc) / abs(nc), r.CF.value, r.CF.se])
            docs.append(report_doc(r) | {"plan": plan.describe()})
    if args.format == "doc":
        _emit(args, json.dumps({"reports": docs, "provenance": provenance()}, indent=2) + "\n")
    else:
        _emit(args, format_table(cols, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qutrit-kcbs", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, n_default, many=False):
        sp.add_argument("--n-obs", type=int, nargs="+" if many else 1, default=n_default,
                        help="number of observables N (odd, >= 5)")
        sp.add_argument("--format", choices=("table", "doc"), default="table")
        sp.add_argument("--out", help="output path (default: stdout, or a file for simulate)")

    def plan_flags(sp, mode_default="block"):
        sp.add_argument("--reps", type=int, default=10_000, help="repetitions per pair")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--order", choices=("normal", "reverse", "both"), default="normal")
        sp.add_argument("--noise", default="ideal", help="ideal, calibrated, or a JSON noise file")
        sp.add_argument("--slow-noise", type=int, default=0, metavar="K",
                        help="redraw the noise once per K repetitions")
        sp.add_argument("--mode", choices=("block", "concatenated"), default=mode_default)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("theory", help="closed-form witness curves")
    common(sp, [5])
    sp.add_argument("--theta", default="compat")
    sp.add_argument("--theta-range", help="START:STOP:COUNT, each angle like compat-0.3rad or 40deg")
    sp.add_argument("--reps", type=int, default=10_000, help="n used for the shot-noise expectation")
    sp.set_defaults(func=cmd_theory)

    sp = sub.add_parser("simulate", help="generate a shot-record file")
    common(sp, [5])
    sp.add_argument("--theta", default="compat")
    plan_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analyze", help="witness report from a shot-record file")
    sp.add_argument("path")
    sp.add_argument("--format", choices=("table", "doc"), default="table")
    sp.add_argument("--out")
    sp.add_argument("--adapter", choices=sorted(ADAPTERS), default="native")
    sp.add_argument("--expect-contextual", action="store_true",
                    help="exit 3 unless S_ext lies below the classical bound for every order")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("bounds", help="classical, quantum, no-signalling and Bell bounds")
    common(sp, list(TABLE_S2_N), many=True)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("ngon-sweep", help="simulate and analyze every N at its compatibility angle")
    common(sp, None, many=True)
    plan_flags(sp, mode_default="concatenated")
    sp.set_defaults(func=cmd_ngon_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qutrit-kcbs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ShotFileError, IncompleteDatasetError, OSError, ValueError) as exc:
        print(f"qutrit-kcbs: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
