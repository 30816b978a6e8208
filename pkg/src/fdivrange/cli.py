"""Command-line front end.

Verbs::

    eval SPEC P Q              divergence of two distributions
    range F G                  atlas samples as CSV
    hull F G                   hull vertices CSV plus unboundedness JSON
    boundary F G               lower/upper envelope CSV (exact column for chi2/power:3)
    certify F G                lower and upper best-constant certificates (JSON)
    check F G                  achievability oracle; exit 1 on any failure
    plot F G                   SVG of the joint range

Exit codes: 0 success, 1 oracle or certificate violation, 2 usage error,
3 internal contract violation.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import bounds, jointrange
from .divcore import ContractViolation, DivergenceError, Distribution, divergence
from .generators import GENERATOR_NAMES, resolve
from .jointrange import DEFAULT_SEED, GridSpec, _jsonable
from .svg import render_atlas_svg

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CONTRACT = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _pair_of_floats(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}") from None
    return a, b


def _load_json(text: str):
    """Inline JSON, or the contents of a JSON file when ``text`` is a path."""
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"cannot parse JSON: {exc}") from None


def _distribution(value) -> Distribution:
    if not isinstance(value, list):
        raise UsageError("a distribution must be a JSON list of numbers")
    return Distribution(value)


def _pair_from(obj) -> tuple[Distribution, Distribution]:
    if not isinstance(obj, dict):
        raise UsageError('a pair must be a JSON object {"p": [...], "q": [...]}')
    try:
        return _distribution(obj["p"]), _distribution(obj["q"])
    except KeyError:
        raise UsageError('a pair object needs keys "p" and "q"') from None


def _fmt_value(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return format(v, ".12g")


def _grid(args) -> GridSpec:
    kw = {}
    if args.grid is not None:
        kw["resolution"] = args.grid
    if args.clip is not None:
        kw["clip"] = args.clip
    return GridSpec(**kw)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def run_eval(args) -> int:
    f = resolve(args.spec)
    if args.pairs:
        # one JSON object {"p": [...], "q": [...]} per line
        lines = []
        with open(args.pairs, encoding="utf-8") as fh:
            for raw in fh:
                if raw.strip():
                    try:
                        obj = json.loads(raw)
                    except json.JSONDecodeError as exc:
                        raise UsageError(f"cannot parse pair line: {exc}") from None
                    P, Q = _pair_from(obj)
                    lines.append(_fmt_value(divergence(f, P, Q)))
        _emit(args, "\n".join(lines) + "\n")
        return EXIT_OK
    if args.P is None or args.Q is None:
        raise UsageError("eval needs P and Q (inline JSON or file paths), or --pairs FILE")
    P, Q = _distribution(_load_json(args.P)), _distribution(_load_json(args.Q))
    _emit(args, _fmt_value(divergence(f, P, Q)) + "\n")
    return EXIT_OK


def _atlas(args):
    f, g = resolve(args.f), resolve(args.g)
    if args.f.strip().lower() == args.g.strip().lower():
        g = f
    return f, g, jointrange.sample_atlas(f, g, _grid(args))


def run_range(args) -> int:
    _, _, atlas = _atlas(args)
    if args.format == "json":
        rows = [
            {"p": p, "q": q, "df": x, "dg": y, "clipped": bool(c)}
            for p, q, x, y, c in zip(
                atlas.p.tolist(), atlas.q.tolist(), atlas.x.tolist(), atlas.y.tolist(), atlas.clipped.tolist()
            )
        ]
        _emit(args, _dumps(rows))
    else:
        _emit(args, jointrange.atlas_csv(atlas))
    return EXIT_OK


def run_hull(args) -> int:
    _, _, atlas = _atlas(args)
    info = jointrange.unbounded_json(atlas)
    if args.format == "json":
        info = dict(info, hull=atlas.hull.tolist())
        _emit(args, _dumps(info))
        return EXIT_OK
    _emit(args, jointrange.hull_csv(atlas))
    if args.out:
        root, _ = os.path.splitext(args.out)
        with open(root + ".unbounded.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_dumps(info))
    else:
        sys.stderr.write(_dumps(info))
    return EXIT_OK


def _is_d2d3(f, g) -> bool:
    return f.power_index == 2.0 and g.power_index == 3.0


def run_boundary(args) -> int:
    f, g, atlas = _atlas(args)
    exact = _is_d2d3(f, g)
    if args.exact and not exact:
        sys.stderr.write(
            f"warning: no exact boundary for ({f.name}, {g.name}); writing the numeric envelope only\n"
        )
    if args.xrange is not None:
        lo, hi = args.xrange
    else:
        hi = float(atlas.hull[:, 0].max())
        lo = hi * 1e-4
    if not (0 < lo < hi):
        raise UsageError("cannot build an envelope: the hull has no horizontal extent")
    xs, lower, upper = jointrange.envelope_table(atlas, lo, hi, args.per_decade)
    header = "x,lower,upper" + (",exact" if exact else "")
    lines = [header]
    for x, a, b in zip(xs.tolist(), lower.tolist(), upper.tolist()):
        row = f"{x!r},{_csv_num(a)},{_csv_num(b)}"
        if exact:
            row += f",{bounds.d2d3_boundary(x)!r}"
        lines.append(row)
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _csv_num(v: float) -> str:
    if math.isnan(v):
        return "nan"
    return jointrange._fmt(v)


def run_certify(args) -> int:
    f, g, atlas = _atlas(args)
    lower = bounds.certify_lower(f, g, atlas)
    upper = bounds.certify_upper(f, g, atlas)
    _emit(args, _dumps({"lower": lower.to_dict(), "upper": upper.to_dict()}))
    # soundness on the samples themselves
    fin = atlas.finite
    x, y = atlas.x[fin], atlas.y[fin]
    bad = np.any(lower.constant * x > y + 1e-9 * np.maximum(1.0, y))
    if upper.status == "finite":
        bad |= np.any(y > upper.constant * x + 1e-9 * np.maximum(1.0, y))
    return EXIT_VIOLATION if bad else EXIT_OK


def run_check(args) -> int:
    f, g, atlas = _atlas(args)
    report = jointrange.achievability_oracle(
        f, g, atlas, k_max=args.k, trials=args.trials, seed=args.seed, tolerance=args.tol
    )
    _emit(args, report.to_json() + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def run_plot(args) -> int:
    f, g, atlas = _atlas(args)
    exact = bounds.d2d3_boundary if _is_d2d3(f, g) else None
    _emit(args, render_atlas_svg(atlas, exact=exact, title=f"({f.name}, {g.name})"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdivrange",
        description="Joint ranges of f-divergence pairs.",
        epilog="generators: " + " | ".join(GENERATOR_NAMES),
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "svg"), default=None)

    atlas_opts = argparse.ArgumentParser(add_help=False)
    atlas_opts.add_argument("f", help="generator for the x axis")
    atlas_opts.add_argument("g", help="generator for the y axis")
    atlas_opts.add_argument("--grid", type=int, default=None, help="uniform grid resolution (default 512)")
    atlas_opts.add_argument("--clip", type=_pair_of_floats, default=None, help="clip bounds X,Y (default 50,50)")
    atlas_opts.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"oracle seed (default {DEFAULT_SEED})")

    p = sub.add_parser("eval", parents=[common], help="evaluate one divergence")
    p.add_argument("spec")
    p.add_argument("P", nargs="?", help="JSON list or path to a JSON file")
    p.add_argument("Q", nargs="?", help="JSON list or path to a JSON file")
    p.add_argument("--pairs", help='file with one {"p": [...], "q": [...]} object per line')
    p.set_defaults(run=run_eval)

    p = sub.add_parser("range", parents=[common, atlas_opts], help="atlas samples")
    p.set_defaults(run=run_range)

    p = sub.add_parser("hull", parents=[common, atlas_opts], help="hull vertices and unbounded directions")
    p.set_defaults(run=run_hull)

    p = sub.add_parser("boundary", parents=[common, atlas_opts], help="lower and upper envelope")
    p.add_argument("--exact", action="store_true", help="request the exact curve (chi2/power:3 only)")
    p.add_argument("--xrange", type=_pair_of_floats, default=None, help="envelope abscissae LO,HI")
    p.add_argument("--per-decade", type=int, default=200, help="log bins per decade (default 200)")
    p.set_defaults(run=run_boundary)

    p = sub.add_parser("certify", parents=[common, atlas_opts], help="best-constant certificates")
    p.set_defaults(run=run_certify)

    p = sub.add_parser("check", parents=[common, atlas_opts], help="achievability oracle")
    p.add_argument("--k", type=int, default=6, help="largest support size (default 6)")
    p.add_argument("--trials", type=int, default=1000, help="random pairs per support size (default 1000)")
    p.add_argument("--tol", type=float, default=1e-6, help="membership tolerance (default 1e-6)")
    p.set_defaults(run=run_check)

    p = sub.add_parser("plot", parents=[common, atlas_opts], help="SVG of the joint range")
    p.set_defaults(run=run_plot)
    return parser


_FORMATS = {
    "eval": ("csv",),
    "range": ("csv", "json"),
    "hull": ("csv", "json"),
    "boundary": ("csv",),
    "certify": ("json",),
    "check": ("json",),
    "plot": ("svg",),
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    allowed = _FORMATS[args.verb]
    if args.format is None:
        args.format = allowed[0]
    elif args.format not in allowed:
        parser.error(f"{args.verb} supports --format {'|'.join(allowed)}")
    try:
        return args.run(args)
    except ContractViolation as exc:
        sys.stderr.write(f"contract violation: {exc}\n")
        return EXIT_CONTRACT
    except (DivergenceError, UsageError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
