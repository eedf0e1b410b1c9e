"""Command-line entry point: ``dotlab <subcommand> [options]``.

Reports go to stdout (or ``--output``) as one ``#`` header line carrying the
timestamp, followed by a body that depends only on the arguments.  CSV bodies
hold the row table, a blank line, then ``key,value`` summary rows.  JSON bodies
hold ``{"rows", "summary", "passed"}``.

Exit status: 0 when every check passes, 1 when one fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

import numpy as np

from . import experiments as ex
from .errors import DotLabError


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _common(p, seeded=True):
    if seeded:
        p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--no-header", action="store_true", help="omit the timestamp header line")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dotlab", description="Dot-product set verification experiments.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser(
        "identity-check",
        help="completed-square identity for dot products on a translated paraboloid",
        description="Checks lift(x).lift(y) = (|x|^2 + a_d)|T_a(x) - y|^2 + h(a, x) on random "
        "float inputs and exact rational inputs.",
    )
    p.add_argument("--d", type=_ints, default=[3, 4, 5], help="ambient dimensions (comma list)")
    p.add_argument("--a", type=_floats, help="fixed translation a_1,...,a_d (random per sample if omitted)")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--exact-cases", type=int, default=100)
    p.add_argument("--min-pole", type=float, default=1e-3, help="reject samples with ||x|^2 + a_d| below this")
    p.add_argument("--tol", type=float, default=1e-9)
    _common(p)

    p = sub.add_parser(
        "jacobian-check",
        help="closed-form Jacobian determinant of the transformation map",
        description="Compares the closed-form Jacobian determinant of T_a with central finite "
        "differences, and checks that it vanishes exactly on rational points of the degenerate sphere.",
    )
    p.add_argument("--d", type=_ints, default=[3, 4, 5])
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--sphere-points", type=int, default=100)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--rel", type=float, default=1e-5)
    p.add_argument("--abs", dest="abs_tol", type=float, default=1e-9)
    _common(p)

    p = sub.add_parser(
        "region-report",
        help="singular sphere and degenerate hyperplane of a translated paraboloid",
        description="Reports where the transformation map is singular or has zero Jacobian.",
    )
    p.add_argument("--a", type=_floats, required=True, help="translation a_1,...,a_d")
    p.add_argument("--d", type=int)
    _common(p, seeded=False)

    p = sub.add_parser(
        "rotation-check",
        help="rotation of the degenerate hyperplane to a coordinate level set",
        description="Samples degenerate-region points, checks the hyperplane equation and the "
        "constant last coordinate after the canonical rotation.",
    )
    p.add_argument("--d", type=_ints, default=[3, 4, 5])
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--plane-tol", type=float, default=1e-12)
    p.add_argument("--rot-tol", type=float, default=1e-10)
    _common(p)

    p = sub.add_parser(
        "tube-check",
        help="tube-surface intersection length over shrinking tube radii",
        description="Measures sup over directions of extent/delta for delta = 2^-k; the ratio stays "
        "bounded for surfaces with no tangent tube.",
    )
    p.add_argument("--surface", choices=["sphere", "ellipsoid"], default="ellipsoid")
    p.add_argument("--center", type=_floats, default=[0.3, 0.2, 0.1])
    p.add_argument("--axes", type=_floats, default=[2.0, 1.5, 1.0], help="semi-axes (radius for a sphere)")
    p.add_argument("--side", choices=["near", "far", "both"], default="near")
    p.add_argument("--margin", type=float, default=0.0, help="tangent margin for an outside origin")
    p.add_argument("--kmin", type=int, default=4)
    p.add_argument("--kmax", type=int, default=14)
    p.add_argument("--directions", type=int, default=24)
    p.add_argument("--resolution", type=int, default=4096)
    p.add_argument("--ratio-tol", type=float, default=4.0)
    _common(p)

    p = sub.add_parser(
        "tangent-check",
        help="square-root intersection length for a tangent tube",
        description="Fits the log-log slope of tangent_cap_extent against delta.",
    )
    p.add_argument("--center", type=_floats, default=[3.0, 0.0])
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--kmin", type=int, default=6)
    p.add_argument("--kmax", type=int, default=11)
    p.add_argument("--slope-tol", type=float, default=0.05)
    _common(p, seeded=False)

    p = sub.add_parser(
        "fractal-cover",
        help="interval covers of dot-product sets of lattice-approximation sets",
        description="Sweeps q and reports cover counts and lengths with the fitted log-log slope of "
        "the summed interval length; also samples in-cell pairs to check the cover is sound.",
    )
    p.add_argument("--mode", choices=["euclidean", "paraboloid"], default="euclidean")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--q", type=_ints, default=[3, 10, 31, 100])
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--lattice", choices=["achieved", "admissible"], default="achieved")
    p.add_argument("--soundness-samples", type=int, default=10_000)
    p.add_argument("--check-slope", action="store_true", help="fail unless the slope matches the prediction")
    p.add_argument("--slope-tol", type=float, default=0.1)
    _common(p)

    p = sub.add_parser(
        "boxdim",
        help="box-counting dimension of the nested lattice-approximation set",
        description="Least-squares box-counting estimate compared with s * dim.",
    )
    p.add_argument("--s", type=float, default=1 / 3)
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--growth", type=float, default=4.0)
    p.add_argument("--scales", type=_floats)
    p.add_argument("--full-cube", action="store_true", help="estimate the unit cube itself as a control")
    p.add_argument("--tol", type=float, default=0.1)
    _common(p, seeded=False)

    p = sub.add_parser(
        "parabola-check",
        help="(x, x^2).(y, y^2) = (xy + 1/2)^2 - 1/4",
        description="Checks the one-dimensional parabola identity in floats and exactly.",
    )
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--exact-cases", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-12)
    _common(p)

    p = sub.add_parser(
        "ff-scan",
        help="dot-product sets of random subsets of the paraboloid over F_p (exploratory)",
        description="Rows (p, d, size, trial, pi_size).  Raise the point budget with "
        "DOTLAB_FF_POINT_BUDGET or --budget.",
    )
    p.add_argument("--p", type=_ints, required=True, help="primes (comma list)")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--sizes", type=_ints, required=True)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--budget", type=int)
    _common(p)

    p = sub.add_parser(
        "ff-isotropic",
        help="nonzero self-orthogonal vectors over F_p",
        description="Counts v != 0 with v.v = 0; for d = 2 and p = 3 mod 4 the count must be 0.",
    )
    p.add_argument("--p", type=_ints, default=[3, 7, 11, 19, 23])
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--budget", type=int)
    _common(p, seeded=False)

    p = sub.add_parser(
        "pushforward-check",
        help="Fourier transform of the push-forward of a measure under x -> x.y",
        description="Random atomic measures: FT(push-forward)(t) against FT(mu)(t y).",
    )
    p.add_argument("--measures", type=int, default=1)
    p.add_argument("--atoms", type=int, default=50)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--t-values", type=int, default=100)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--tol", type=float, default=1e-10)
    _common(p)
    return parser


def execute(args) -> ex.Report:
    c = args.command
    if c == "identity-check":
        return ex.identity_check(args.d, args.samples, args.seed, args.a, args.exact_cases, args.min_pole, args.tol)
    if c == "jacobian-check":
        return ex.jacobian_check(args.d, args.samples, args.seed, args.sphere_points, args.step, args.rel, args.abs_tol)
    if c == "region-report":
        return ex.region_report_run(args.a, args.d)
    if c == "rotation-check":
        return ex.rotation_check(args.d, args.cases, args.seed, args.points, args.plane_tol, args.rot_tol)
    if c == "tube-check":
        return ex.tube_check(
            args.surface, args.center, args.axes, args.seed, args.kmin, args.kmax,
            args.directions, args.side, args.margin, args.resolution, args.ratio_tol,
        )
    if c == "tangent-check":
        return ex.tangent_check(args.center, args.radius, args.kmin, args.kmax, slope_tol=args.slope_tol)
    if c == "fractal-cover":
        return ex.fractal_cover(
            args.mode, args.s, args.q, args.dim, args.seed, args.lattice,
            args.soundness_samples, args.check_slope, args.slope_tol,
        )
    if c == "boxdim":
        return ex.boxdim(args.s, args.q, args.dim, args.depth, args.growth, args.scales, args.full_cube, args.tol)
    if c == "parabola-check":
        return ex.parabola_check(args.samples, args.seed, args.exact_cases, args.tol)
    if c == "ff-scan":
        return ex.ff_scan(args.p, args.d, args.sizes, args.trials, args.seed, args.budget)
    if c == "ff-isotropic":
        return ex.ff_isotropic(args.p, args.d, args.budget)
    if c == "pushforward-check":
        return ex.pushforward_check(args.measures, args.atoms, args.dim, args.t_values, args.seed, args.t_max, args.tol)
    raise AssertionError(c)


def _plain(v):
    """numpy scalars to Python scalars so both renderers print them the same way."""
    if isinstance(v, np.generic):
        return v.item()
    return v


def _cell(v):
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_body(report: ex.Report, fmt: str) -> str:
    if fmt == "json":
        payload = dict(
            rows=[{k: _plain(v) for k, v in r.items()} for r in report.rows],
            summary={k: _plain(v) for k, v in report.summary.items()},
            passed=bool(report.passed),
        )
        return json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if report.rows:
        keys = list(report.rows[0])
        w.writerow(keys)
        for row in report.rows:
            w.writerow([_cell(row.get(k, "")) for k in keys])
    w.writerow([])
    w.writerow(["key", "value"])
    for k in sorted(report.summary):
        w.writerow([k, _cell(report.summary[k])])
    w.writerow(["passed", _cell(report.passed)])
    return buf.getvalue()


def render_header(command: str) -> str:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return f"# dotlab {command} generated {stamp}\n"


def split_report(text: str) -> tuple:
    """``(header, body)`` of a rendered report; header is empty when absent."""
    if text.startswith("# "):
        head, _, body = text.partition("\n")
        return head, body
    return "", text


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = execute(args)
    except (DotLabError, ValueError) as exc:
        print(f"dotlab {args.command}: {exc}", file=sys.stderr)
        return 2
    text = ("" if args.no_header else render_header(args.command)) + render_body(report, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def main() -> None:
    sys.exit(run())
