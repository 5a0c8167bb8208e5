"""Command line front end: run one scenario, sweep a grid, or check oracles.

Exit codes: 0 on success, 1 when an invariant check fails, 2 on bad
usage or an unparseable scenario file.
"""
from __future__ import annotations

import argparse
import sys

from .bench import oracle_check, run_scenario, sweep
from .metrics import write_csv
from .scenario import VARIANTS, ScenarioError, parse_scenario


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncrepair",
        description="Deterministic simulator for non-collective communicator repair.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario file and print its metrics")
    p_run.add_argument("--scenario", required=True, help="path to a scenario file")
    p_run.add_argument("--trace", help="also write the event trace to this file")

    p_sweep = sub.add_parser("sweep", help="run a grid of seeded scenarios, emit CSV")
    p_sweep.add_argument("--sizes", required=True, help="comma list of group sizes")
    p_sweep.add_argument("--fail-fracs", required=True, help="comma list of failure fractions")
    p_sweep.add_argument("--reps", type=int, default=1)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--variants", default="adaptive", help="comma list of variants")
    p_sweep.add_argument("--world-size", type=int, default=None)
    p_sweep.add_argument("--out", help="write CSV here instead of stdout")

    p_oracle = sub.add_parser("oracle", help="verify accuracy/agreement invariants")
    p_oracle.add_argument("--max-size", type=int, default=8)
    p_oracle.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    p_oracle.add_argument("--trials", type=int, default=1000)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--variant", choices=VARIANTS, default="adaptive")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        with open(args.scenario) as fh:
            sc = parse_scenario(fh.read(), scenario_id=args.scenario)
    except OSError as err:
        print(f"error: cannot read scenario: {err}", file=sys.stderr)
        return 2
    except ScenarioError as err:
        print(f"error: {args.scenario}: {err}", file=sys.stderr)
        return 2
    report, row = run_scenario(sc)
    write_csv([row], sys.stdout)
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(report.trace() + "\n")
    return 1 if row.deadlocked or row.agreed is False or row.accurate is False else 0


def _csv_list(text: str, conv):
    return [conv(part) for part in text.split(",") if part.strip()]


def _cmd_sweep(args: argparse.Namespace) -> int:
    try:
        sizes = _csv_list(args.sizes, int)
        fracs = _csv_list(args.fail_fracs, float)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    variants = _csv_list(args.variants, str)
    unknown = [v for v in variants if v not in VARIANTS]
    if unknown:
        print(f"error: unknown variants {unknown}", file=sys.stderr)
        return 2
    try:
        rows = sweep(sizes, fracs, args.reps, args.seed, variants, args.world_size)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    ok, checked, bad = oracle_check(
        max_size=args.max_size,
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        variant=args.variant,
    )
    if ok:
        print(f"ok: {checked} scenarios checked, 0 violations")
        return 0
    print(f"FAIL: {len(bad)} of {checked} scenarios violated invariants", file=sys.stderr)
    for ce in bad[:5]:
        print(ce.render(), file=sys.stderr)
        print("", file=sys.stderr)
    return 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep that contract
        return int(exc.code or 0)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    return _cmd_oracle(args)


if __name__ == "__main__":
    raise SystemExit(main())
