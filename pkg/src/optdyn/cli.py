"""Command-line front end.

Commands: run | stages | verify | lift-check | sweep.  Every command is
deterministic given its flags: configuration comes from flags only, data
files carry no timestamps, and a config echo rides along as a comment.

Exit codes: 0 success, 1 validation error, 2 check failed (a verify or
lift-check discrepancy beyond tolerance).
"""

from __future__ import annotations

import argparse
import sys
from decimal import Decimal
from pathlib import Path

from .analysis import (
    detect_stages,
    flat_region_scaling,
    lift_equivalence,
    verify_assumptions,
)
from .dynamics import (
    AdaGradStep,
    AlgorithmSpec,
    ConstantStep,
    load_trajectory_csv,
    run_oftrl,
    run_oomd,
    write_trajectory_csv,
)
from .games import duplicate_lift, hard_instance, hard_instance_nash, load_game
from .numerics import canonical, make_context, parse_real
from .plotting import write_trajectory_svg
from .regularizers import parse_regularizer

SWEEP_HEADER = "delta,flat_len,peak_gap,peak_iteration,complete"


def _positive_decimal(raw: str) -> Decimal:
    v = parse_real(raw)
    if v <= 0:
        raise ValueError(f"expected a positive value, got {raw}")
    return v


def _resolve_game(source: str, kind):
    """Parse a game source: hard:<delta> | file:<path> | lift:<delta>:<n>."""
    if source.startswith("hard:"):
        return hard_instance(parse_real(source[5:]))
    if source.startswith("file:"):
        return load_game(source[5:])
    if source.startswith("lift:"):
        parts = source.split(":")
        if len(parts) != 3:
            raise ValueError(f"bad lift source {source!r}; want lift:<delta>:<n>")
        delta, n = parse_real(parts[1]), int(parts[2])
        return duplicate_lift(hard_instance(delta), n, kind.lift_alpha)
    raise ValueError(f"unknown game source {source!r}; want hard: | file: | lift:")


def _schedule(args):
    if (args.eta is None) == (args.adagrad_eps is None):
        raise ValueError("set exactly one of --eta and --adagrad-eps")
    if args.eta is not None:
        return ConstantStep(_positive_decimal(args.eta))
    return AdaGradStep(_positive_decimal(args.adagrad_eps))


def cmd_run(args) -> int:
    ctx = make_context(args.precision)
    kind = parse_regularizer(args.reg)
    spec = AlgorithmSpec(args.algo, kind, _schedule(args))
    with ctx.activate():
        game = _resolve_game(args.game, kind)
    runner = run_oftrl if args.algo == "oftrl" else run_oomd
    traj = runner(game, spec, args.iters, ctx, thin=args.thin)
    write_trajectory_csv(
        traj,
        args.out,
        out_digits=args.out_digits,
        full_precision=args.full_precision,
        extra_echo=f"game={args.game}",
    )
    print(f"wrote {args.out} ({len(traj)} records, {traj.total_clamps} clamps)")
    if args.svg:
        svg_path = str(Path(args.out).with_suffix(".svg"))
        nash = None
        if game.hard_delta is not None and game.rows == 2:
            with ctx.activate():
                xs, ys = hard_instance_nash(game.hard_delta)
                nash = (float(xs[0]), float(ys[0]))
        write_trajectory_svg(
            traj.records,
            svg_path,
            title=f"{args.algo} {args.reg} on {args.game}",
            log_gap=args.log_gap,
            nash=nash,
        )
        print(f"wrote {svg_path}")
    return 0


def cmd_stages(args) -> int:
    ctx = make_context(args.precision)
    kind = parse_regularizer(args.reg)
    records = load_trajectory_csv(args.traj)
    with ctx.activate():
        cons = kind.constants()
        report = detect_stages(
            records, parse_real(args.delta), cons, eta=_positive_decimal(args.eta)
        )
    print(report.to_text())
    return 0


def cmd_verify(args) -> int:
    ctx = make_context(args.precision)
    kind = parse_regularizer(args.reg)
    if args.delta == "auto":
        with ctx.activate():
            delta = kind.constants().delta_prime / 2
    else:
        delta = _positive_decimal(args.delta)
    report = verify_assumptions(kind, delta, ctx)
    print(report.to_text())
    if report.out_of_range:
        return 0
    return 0 if report.passed else 2


def cmd_liftcheck(args) -> int:
    ctx = make_context(args.precision)
    kind = parse_regularizer(args.reg)
    report = lift_equivalence(
        parse_real(args.delta), args.n, kind, _positive_decimal(args.eta), args.iters, ctx
    )
    print(report.to_text())
    return 0 if report.passed else 2


def cmd_sweep(args) -> int:
    ctx = make_context(args.precision)
    kind = parse_regularizer(args.reg)
    spec = AlgorithmSpec("oftrl", kind, ConstantStep(_positive_decimal(args.eta)))
    deltas = []
    if args.deltas.strip():
        for tok in args.deltas.split(","):
            d = parse_real(tok)
            if d in deltas:
                print(f"warning: duplicate delta {tok} dropped", file=sys.stderr)
                continue
            deltas.append(d)
    entries = flat_region_scaling(deltas, spec, args.iters, ctx, thin=args.thin)
    lines = [SWEEP_HEADER]
    for e in entries:
        lines.append(
            ",".join(
                [
                    canonical(e.delta),
                    "" if e.flat_len is None else str(e.flat_len),
                    "" if e.peak_gap is None else canonical(e.peak_gap),
                    "" if e.peak_iteration is None else str(e.peak_iteration),
                    str(e.complete).lower(),
                ]
            )
        )
    with open(args.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out} ({len(entries)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="optdyn",
        description="simulate and diagnose optimistic learning dynamics in matrix games",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_precision(sp, default=64):
        sp.add_argument("--precision", type=int, default=default,
                        help=f"significant decimal digits (default {default})")

    sp = sub.add_parser("run", help="simulate and write a trajectory CSV")
    sp.add_argument("--algo", choices=["oftrl", "oomd"], required=True)
    sp.add_argument("--reg", required=True,
                    help="entropy | euclid | logbar | tsallis:<beta>")
    sp.add_argument("--eta", help="constant stepsize")
    sp.add_argument("--adagrad-eps", help="adaptive stepsize offset epsilon")
    sp.add_argument("--game", required=True,
                    help="hard:<delta> | file:<path> | lift:<delta>:<n>")
    sp.add_argument("--iters", type=int, required=True)
    add_precision(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--thin", type=int, default=1,
                    help="record every k-th iterate (stage crossings always kept)")
    sp.add_argument("--svg", action="store_true", help="also render <out>.svg")
    sp.add_argument("--log-gap", action="store_true", help="log-scale gap axis in the SVG")
    sp.add_argument("--out-digits", type=int, default=30,
                    help="significant digits written to the CSV (default 30)")
    sp.add_argument("--full-precision", action="store_true",
                    help="write full-precision values instead")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("stages", help="stage report for a trajectory CSV")
    sp.add_argument("--traj", required=True, help="CSV written by `run` on a hard instance")
    sp.add_argument("--delta", required=True)
    sp.add_argument("--reg", required=True)
    sp.add_argument("--eta", required=True)
    add_precision(sp)
    sp.set_defaults(fn=cmd_stages)

    sp = sub.add_parser("verify", help="check the regularizer conditions at a delta")
    sp.add_argument("--reg", required=True)
    sp.add_argument("--delta", required=True, help="a decimal, or 'auto' for delta_prime/2")
    add_precision(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("lift-check", help="compare a 2-action run against its 2n-action lift")
    sp.add_argument("--delta", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reg", required=True)
    sp.add_argument("--eta", required=True)
    sp.add_argument("--iters", type=int, required=True)
    add_precision(sp)
    sp.set_defaults(fn=cmd_liftcheck)

    sp = sub.add_parser("sweep", help="flat-region scaling across deltas")
    sp.add_argument("--deltas", required=True, help="comma-separated list")
    sp.add_argument("--reg", required=True)
    sp.add_argument("--eta", required=True)
    sp.add_argument("--iters", type=int, required=True)
    add_precision(sp, default=256)
    sp.add_argument("--thin", type=int, default=1)
    sp.add_argument("--out", required=True)
    sp.set_defaults(fn=cmd_sweep)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
