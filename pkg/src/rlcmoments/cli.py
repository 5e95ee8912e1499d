"""Command-line front end: ``rlcmoments <command> [flags]``.

Commands emit CSV (default) or an aligned table, preceded by ``#`` header
lines carrying the version, the full configuration and the seed.  Exit
codes: 0 ok, 1 verification failure, 2 invalid parameters, 3 budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__, maxent
from .enumeration import BudgetExceeded, CodeParams
from .moments import k0, k1, predict_moment, predict_normalized
from .verify import SUITES, gap_upper, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_PARAMS, EXIT_BUDGET = 0, 1, 2, 3


class ParamError(ValueError):
    pass


def fmt(x) -> str:
    """12 significant digits, locale independent."""
    if x is None:
        return ""
    if x is maxent.MINUS_INF:
        return "-inf"
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(float(x), ".12g")
    return str(x)


def rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def int_range(text: str) -> range:
    """``a:b`` inclusive, or a single integer."""
    try:
        if ":" in text:
            a, b = text.split(":")
            return range(int(a), int(b) + 1)
        return range(int(text), int(text) + 1)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a or a:b, got {text!r}") from exc


def grid(text: str) -> list[float]:
    """``lo:hi:count`` evenly spaced, inclusive of both ends."""
    try:
        lo, hi, count = text.split(":")
        return [round(float(v), 12) for v in np.linspace(float(lo), float(hi), int(count))]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from exc


def _config_value(v):
    if isinstance(v, range):
        return f"{v.start}:{v.stop - 1}"
    if isinstance(v, Fraction):
        return str(v)
    return v


def write_output(args, columns: list[str], rows: list[list], stream) -> None:
    config = {k: _config_value(v) for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    stream.write(f"# rlcmoments {__version__}\n")
    stream.write(f"# config: {json.dumps(config, sort_keys=True, default=str)}\n")
    stream.write(f"# seed: {getattr(args, 'seed', None)}\n")
    cells = [[fmt(v) for v in row] for row in rows]
    if args.format == "csv":
        stream.write(",".join(columns) + "\n")
        for row in cells:
            stream.write(",".join(row) + "\n")
        return
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    stream.write("  ".join(c.rjust(w) for c, w in zip(columns, widths)) + "\n")
    for row in cells:
        stream.write("  ".join(v.rjust(w) for v, w in zip(row, widths)) + "\n")


def cmd_f_table(args):
    gm, delta = float(args.gamma), args.delta
    if not 0.0 < gm < 0.5:
        raise ParamError("f-table needs 0 < gamma < 1/2")
    rows = []
    for m in args.k_range:
        if m < 2:
            raise ParamError("f-table needs m >= 2")
        F = maxent.F(m, gm, delta)
        if F is maxent.MINUS_INF:
            gap = maxent.MINUS_INF
        elif delta == 0.0:
            gap = maxent.F_gap(m, gm)
        else:
            gap = F - (m * maxent.h(gm) - 1.0)
        rows.append([m, F, gap, gap_upper(m, gm)])
    return ["m", "F", "gap", "upper_gap"], rows


def cmd_g_curve(args):
    m, gm = args.k, float(args.gamma)
    xs = args.x_grid
    if any(x <= 0.0 for x in xs):
        raise ParamError("x grid must be positive")
    vals = [maxent.g(m, gm, x, args.delta) for x in xs]
    best = int(np.argmin(vals))
    return ["x", "g", "argmin"], [[x, v, i == best] for i, (x, v) in enumerate(zip(xs, vals))]


def cmd_k0_map(args):
    rows = []
    for gm in args.gamma_grid:
        if not 0.0 < gm < 0.5:
            raise ParamError("gamma grid must lie inside (0, 1/2)")
        hg = maxent.h(gm)
        for lam in args.lambda_grid:
            if not 0.0 < lam < 1.0:
                raise ParamError("lambda grid must lie inside (0, 1)")
            if lam >= hg:
                rows.append([gm, lam, "masked"])
            else:
                rows.append([gm, lam, k0(gm, lam)])
    return ["gamma", "lambda", "k0"], rows


def cmd_predict(args):
    p = CodeParams(args.n, args.gamma, args.lam)
    gm, lam = float(p.gamma), float(p.lam)
    kk0, kk1 = k0(gm, lam), k1(gm, lam)
    ks = args.k_range if args.k_range is not None else range(args.k, args.k + 1)
    rows = []
    for k in ks:
        pred = predict_moment(p, k, safety=args.safety)
        norm = predict_normalized(p, k)
        cands = {r.value: v for r, v in pred.candidates.items()}
        rows.append([
            k, pred.regime.value, pred.log2_value, cands.get("EvenDominant"),
            cands.get("PairingDominant", cands.get("OddMixed")), pred.dominant_d,
            kk0, kk1, norm.branch, norm.log2_value, pred.linear_tie,
        ])
    cols = ["k", "regime", "log2_moment", "log2_even", "log2_other", "dominant_d",
            "k0", "k1", "normalized", "log2_normalized", "linear_tie"]
    return cols, rows


def cmd_verify(args, stream) -> int:
    stream.write(f"# rlcmoments {__version__}\n")
    stream.write(f"# config: {json.dumps({'suite': args.suite, 'samples': args.samples}, sort_keys=True)}\n")
    stream.write(f"# seed: {args.seed}\n")
    failed = False
    for rec in run_suite(args.suite, seed=args.seed, samples=args.samples, workers=args.threads):
        failed |= rec.status == "FAIL"
        d = rec.as_dict()
        for key in ("measured", "bound"):
            v = d[key]
            if isinstance(v, float):
                d[key] = float(fmt(v))
            elif isinstance(v, list):
                d[key] = [float(fmt(x)) if isinstance(x, float) else x for x in v]
        stream.write(json.dumps(d) + "\n")
        stream.flush()
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "table"), default="csv")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    parser = argparse.ArgumentParser(prog="rlcmoments", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("f-table", parents=[common], help="F(m, gamma) and its gap to m h(gamma) - 1")
    sp.add_argument("--gamma", type=rational, default=Fraction(1, 5))
    sp.add_argument("--k-range", type=int_range, default=range(2, 41), help="m range a:b")
    sp.add_argument("--delta", type=float, default=0.0)
    sp.set_defaults(func=cmd_f_table)

    sp = sub.add_parser("g-curve", parents=[common], help="g(m, gamma, x) over an x grid")
    sp.add_argument("--k", type=int, default=3, help="m")
    sp.add_argument("--gamma", type=rational, default=Fraction(1, 5))
    sp.add_argument("--delta", type=float, default=0.0)
    sp.add_argument("--x-grid", type=grid, default=grid("0.02:1.0:50"))
    sp.set_defaults(func=cmd_g_curve)

    sp = sub.add_parser("k0-map", parents=[common], help="k0 over a (gamma, lambda) grid")
    sp.add_argument("--gamma-grid", type=grid, default=grid("0.02:0.48:24"))
    sp.add_argument("--lambda-grid", type=grid, default=grid("0.02:0.98:49"))
    sp.set_defaults(func=cmd_k0_map)

    sp = sub.add_parser("predict", parents=[common], help="leading-order moment predictions")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--gamma", type=rational, required=True)
    sp.add_argument("--lambda", dest="lam", type=rational, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--k-range", type=int_range, default=None)
    sp.add_argument("--safety", type=float, default=8.0, help="k range guard: k log2 n <= n/safety")
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("verify", parents=[common], help="run invariant suites, JSON lines out")
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--samples", type=int, default=10**7, help="Monte Carlo samples per point")
    sp.set_defaults(func=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARAMS
    stream = open(args.out, "w", encoding="utf-8", newline="\n") if args.out else sys.stdout
    try:
        if args.command == "verify":
            if args.samples < 1:
                raise ParamError("samples must be positive")
            return cmd_verify(args, stream)
        columns, rows = args.func(args)
        write_output(args, columns, rows, stream)
        return EXIT_OK
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    finally:
        if args.out:
            stream.close()


if __name__ == "__main__":
    sys.exit(main())
