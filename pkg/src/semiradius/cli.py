"""Command-line front end.

    semiradius certify --dims 2,3 --ranks all --trials 100 --seed 0 --json report.json
    semiradius radius  matrices.json --operator T --method theta
    semiradius sharp   matrices.json --operator T
    semiradius probe   MainOffDiag --dims 2 --identity-metric
    semiradius demo

Exit codes: 0 success, 1 a violation (or a non-adjointable operator for
`sharp`), 2 a usage or input error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from .blockspace import assemble, rotate_block_rows, double_metric, rotation_unitary
from .certifier import buzano_sweep, run_suite, tightness_probe
from .checks import check_class
from .errors import NotAdjointable, SemiRadiusError
from .instances import MAX_DIM, gen_instance
from .kernel import adjoint, fro
from .matrix_io import read_matrix_file, require
from .semihilbert import (
    a_numerical_radius, a_seminorm_op, bind, is_a_unitary, new_metric, sharp,
)
from .types import CheckId, RadiusMethod, Settings
from .utils import load_settings, setup_logging

log = logging.getLogger(__name__)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _ranks(text):
    """'all', 'full', '1,2' or per dimension '3:1,2;4:2'."""
    if text in ("all", "full"):
        return text
    if ":" not in text:
        return _int_list(text)
    out = {}
    for part in filter(str.strip, text.split(";")):
        dim, sep, ranks = part.partition(":")
        if not sep or not dim.strip().isdigit():
            raise argparse.ArgumentTypeError(f"expected DIM:R1,R2;..., got {part!r}")
        out[int(dim)] = _int_list(ranks)
    return out


def _fmt(z: complex) -> str:
    # adding 0.0 turns -0.0 into 0.0
    return f"{z.real + 0.0:.8g}{z.imag + 0.0:+.8g}j"


def _print_matrix(M):
    for row in M:
        print("  [" + ", ".join(_fmt(z) for z in row) + "]")


# -----------------------------------------------------------------------------
# COMMANDS
# -----------------------------------------------------------------------------
def summary_table(report) -> pd.DataFrame:
    rows = []
    for key, agg in report.summary.items():
        rows.append({
            "check": key,
            "class": check_class(key).value,
            "count": agg.count,
            "failures": agg.failures,
            "min_slack": agg.min_slack,
            "min_norm_slack": agg.min_normalized_slack,
            "argmin": f"{agg.argmin_seed}/{agg.argmin_dim}/{agg.argmin_rank}",
        })
    return pd.DataFrame(rows)


def cmd_certify(args, settings: Settings) -> int:
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.dims is not None and not all(2 <= d <= MAX_DIM for d in args.dims):
        raise UsageError(f"--dims must lie in 2..{MAX_DIM}")
    if args.tol_scale <= 0:
        raise UsageError("--tol-scale must be positive")
    report = run_suite(
        dims=args.dims, ranks=args.ranks, trials=args.trials, base_seed=args.seed,
        settings=settings, workers=args.workers, tol_scale=args.tol_scale,
        progress=False if args.no_progress else None,
    )
    print(summary_table(report).to_string(index=False, float_format=lambda v: f"{v:.8g}"))
    if args.json:
        Path(args.json).write_text(report.to_json(), encoding="utf-8")
        print(f"📝 Report written to {args.json}")
    failures = sum(a.failures for a in report.summary.values())
    if report.passed:
        print(f"✅ {len(report.results)} checks passed")
        return EXIT_OK
    print(f"❌ {failures} of {len(report.results)} checks violated")
    return EXIT_VIOLATION


def _load_operator(path, name, settings):
    mats = read_matrix_file(path)
    A, T = require(mats, "A", name)
    return bind(new_metric(A, settings=settings), T, settings)


def cmd_radius(args, settings: Settings) -> int:
    op = _load_operator(args.input, args.operator, settings)
    norm = a_seminorm_op(op)
    w = a_numerical_radius(op, method=args.method, count=args.samples, seed=args.seed, settings=settings)
    method = RadiusMethod(args.method or settings.semihilbert.method).value
    print(f"operator      {args.operator}")
    print(f"in B_A^1/2    {op.in_half}")
    print(f"in B_A        {op.in_full}")
    print(f"||T||_A       {norm}")
    print(f"w_A(T)        {w}  ({method})")
    return EXIT_OK


def cmd_sharp(args, settings: Settings) -> int:
    op = _load_operator(args.input, args.operator, settings)
    try:
        Ts = sharp(op)
    except NotAdjointable:
        print(f"❌ {args.operator} is not A-adjointable")
        return EXIT_VIOLATION
    A = op.metric.A
    print(f"{args.operator}^# =")
    _print_matrix(Ts)
    print(f"||A T^# - T* A||_F = {fro(A @ Ts - adjoint(op.T) @ A):.8g}")
    return EXIT_OK


def cmd_probe(args, settings: Settings) -> int:
    result = tightness_probe(args.check, dims=args.dims, iterations=args.iterations, seed=args.seed,
                             identity_metric=args.identity_metric, settings=settings)
    print(f"check         {result.check.value}")
    print(f"instance      seed={result.seed} dim={result.dim} rank={result.rank} mode={result.mode}")
    print(f"min slack     {result.min_slack:.8g} (normalized {result.min_normalized_slack:.8g})")
    print(f"moves kept    {len(result.trace)}")
    if args.json:
        Path(args.json).write_text(result.model_dump_json(indent=2), encoding="utf-8")
        print(f"📝 Probe written to {args.json}")
    if result.falsification:
        print("❌ FALSIFICATION candidate: slack below tolerance")
        return EXIT_VIOLATION
    print("✅ no violation found")
    return EXIT_OK


def cmd_buzano(args, settings: Settings) -> int:
    agg, worst = buzano_sweep(args.count, seed=args.seed, dim=args.dim, rank=args.rank, settings=settings)
    print(f"triples       {agg.count}")
    print(f"violations    {agg.failures}")
    print(f"min slack     {agg.min_slack:.8g}")
    return EXIT_OK if agg.failures == 0 else EXIT_VIOLATION


def cmd_demo(args, settings: Settings) -> int:
    print("1. A = diag(1, 0), T = [[0, 1], [1, 0]]")
    m = new_metric(np.diag([1.0, 0.0]), settings=settings)
    op = bind(m, np.array([[0, 1], [1, 0]]), settings)
    print(f"   T(N(A)) in N(A): {op.in_half}, T admits an A-adjoint: {op.in_full}")
    print(f"   ||T||_A = {a_seminorm_op(op)}")
    print(f"   w_A(T) = {a_numerical_radius(op, settings=settings)}")

    print("2. A = diag(2, 1), T = [[0, 1], [0, 0]]")
    m = new_metric(np.diag([2.0, 1.0]), settings=settings)
    op = bind(m, np.array([[0, 1], [0, 0]]), settings)
    print("   T^# =")
    _print_matrix(sharp(op))
    print(f"   ||T||_A = {a_seminorm_op(op)}, w_A(T) = {a_numerical_radius(op, settings=settings)}")

    print("3. U = (1/sqrt 2) [[I, I], [-I, I]] over diag(A, A), random rank-deficient A (n=3, r=2)")
    inst = gen_instance(2024, 3, 2, settings)
    m2 = double_metric(inst.metric)
    U = rotation_unitary(3)
    unitary = is_a_unitary(bind(m2, U, settings), settings)
    print(f"   U is A-unitary: {unitary}")
    T, S = inst.ops["T"], inst.ops["S"]
    M = assemble(T, S, T, S)
    Us = sharp(bind(m2, U, settings))
    w_before = a_numerical_radius(bind(m2, M, settings), settings=settings).finite()
    w_after = a_numerical_radius(bind(m2, Us @ M @ U, settings), settings=settings).finite()
    invariant = abs(w_before - w_after) <= settings.semihilbert.tol_eq * (1.0 + max(w_before, w_after))
    print(f"   w(M) = {w_before:.8g}, w(U^# M U) = {w_after:.8g}, radius preserved: {invariant}")
    _, residual = rotate_block_rows(inst.metric, T, S, metric2=m2, settings=settings)
    print(f"   ||P (U^# M U - [[0,0],[T-S,T+S]]) P||_F = {residual:.3g}")
    if not unitary:
        print("❌ U failed the A-unitary test")
        return EXIT_VIOLATION
    if not invariant:
        print("❌ w(U^# M U) differs from w(M) beyond tol_eq")
        return EXIT_VIOLATION
    print("✅ demo complete")
    return EXIT_OK


# -----------------------------------------------------------------------------
# PARSER
# -----------------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semiradius", description="A-seminorms, A-numerical radii and block inequalities.")
    ap.add_argument("--config", default=None, help="Path to a config.yaml (defaults to ./config.yaml if present).")
    ap.add_argument("--log-level", default=None, help="Override logging.level from the config.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="Run every check family on seeded instances.")
    p.add_argument("--dims", type=_int_list, default=None, help="Comma-separated dimensions, e.g. 2,3.")
    p.add_argument("--ranks", type=_ranks, default="all", help="'all', 'full', comma-separated ranks, or per dimension e.g. '3:1,2;4:2' (unlisted dims run at full rank).")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", default=None, help="Write the JSON report here.")
    p.add_argument("--tol-scale", type=float, default=1.0, help="Multiply tol_eq and tol_ineq.")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-progress", action="store_true")
    p.set_defaults(func=cmd_certify)

    for name, func, text in (("radius", cmd_radius, "A-seminorm and A-numerical radius of one operator."),
                             ("sharp", cmd_sharp, "A-adjoint T^# = A-dagger T* A of one operator.")):
        p = sub.add_parser(name, help=text)
        p.add_argument("input", help="Matrix file (JSON).")
        p.add_argument("--operator", default="T")
        if name == "radius":
            p.add_argument("--method", choices=[m.value for m in RadiusMethod], default=None)
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)

    p = sub.add_parser("probe", help="Search for the smallest slack of an inequality family.")
    p.add_argument("check", choices=[c.value for c in CheckId if c is not CheckId.Buzano])
    p.add_argument("--dims", type=_int_list, default=None)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--identity-metric", action="store_true", help="Probe over A = I.")
    p.add_argument("--json", default=None)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("buzano", help="Random vector triples against the Buzano inequality.")
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_buzano)

    p = sub.add_parser("demo", help="Worked examples.")
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        settings = load_settings(args.config)
        setup_logging(args.log_level or settings.logging.level)
        return args.func(args, settings)
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SemiRadiusError, OSError, ValueError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
