"""Command-line entry point: ``ringmarch run|experiment|sweep|oracle|verify``.

Exit status is 0 on success, 1 on a usage or validation error and 2 when a
property suite reports a failure.
"""
from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import engine, experiments, io, oracle, verify
from .errors import RingMarchError
from .model import ModelParams, SwitchPolicy, make_rng, validate

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _policy(args) -> SwitchPolicy:
    if args.policy == "probabilistic":
        if args.q is None:
            raise UsageError("--policy probabilistic needs --q")
        return SwitchPolicy.probabilistic(args.q)
    if args.q is not None:
        raise UsageError(f"--q only applies to --policy probabilistic, not {args.policy}")
    return SwitchPolicy.never() if args.policy == "never" else SwitchPolicy.eager()


def _params(args) -> ModelParams:
    return ModelParams(r=args.r, p=args.p, policy=_policy(args), guard=not args.no_guard)


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--r", type=float, default=0.0, help="probability of resting in the horizontal phase")
    p.add_argument("--p", type=float, default=0.0, help="probability of an erratic vertical move")
    p.add_argument("--policy", choices=("never", "eager", "probabilistic"), default="eager")
    p.add_argument("--q", type=float, default=None, help="switch probability for --policy probabilistic")
    p.add_argument("--no-guard", action="store_true", help="allow tracks to drop below two locusts")
    p.add_argument("--mode", choices=(engine.LOCAL, engine.GLOBAL), default=engine.LOCAL)
    p.add_argument("--max-steps", type=int, default=10**6)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ringmarch", description="Locust marching on a multi-track ring.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate one trial until stable")
    run.add_argument("--n", type=int, help="cells per track (inferred from --grid)")
    run.add_argument("--k", type=int, help="number of tracks (inferred from --grid)")
    run.add_argument(
        "--init", choices=(experiments.DENSE, experiments.SPARSE, experiments.TWO_SEGMENT, experiments.EXPLICIT),
        default=experiments.SPARSE,
    )
    run.add_argument("--grid", help="explicit start, tracks separated by '/', top track first")
    run.add_argument("--m", type=int, help="locust count for two_segment starts")
    run.add_argument("--density", type=float, help="override the generator's density")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trace", help="write the ASCII grid of every step to this file")
    _add_model_flags(run)

    exp = sub.add_parser("experiment", help="Monte Carlo experiment from a JSON config, written as CSV")
    exp.add_argument("config", help="JSON run-config file")
    exp.add_argument("--out", required=True, help="CSV output path")
    exp.add_argument("--workers", type=int, default=None)

    sweep = sub.add_parser("sweep", help="Figure-4 style sweep written as CSV")
    sweep.add_argument("column", choices=("a", "b", "c"))
    sweep.add_argument("--density", choices=(experiments.DENSE, experiments.SPARSE), default=experiments.SPARSE)
    sweep.add_argument("--policy", choices=("never", "eager"), default="eager")
    sweep.add_argument("--trials", type=int, default=1000)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--max-steps", type=int, default=10**6)
    sweep.add_argument("--p-grid", help="comma-separated p values for column c")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--out", required=True, help="CSV output path")

    orc = sub.add_parser("oracle", help="exact expected stabilization time of a tiny single track")
    orc.add_argument("--n", type=int, required=True)
    orc.add_argument("--m", type=int, required=True)
    orc.add_argument("--grid", required=True, help="one track of glyphs, e.g. '>.<.'")
    orc.add_argument("--cap", type=int, default=oracle.DEFAULT_STATE_CAP, help="largest state space to solve")

    ver = sub.add_parser("verify", help="run property suites")
    ver.add_argument("--suite", action="append", choices=verify.SUITES, help="repeatable; default is every suite")
    ver.add_argument("--runs", type=int, default=1000, help="random runs for the structural suites")
    ver.add_argument("--trials", type=int, default=None, help="trials for the oracle and bound suites")
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--verbose", action="store_true", help="print example violations")
    return parser


def _start(args):
    if args.grid is not None:
        if args.init != experiments.EXPLICIT:
            raise UsageError("--grid needs --init explicit")
        config = io.parse_rows(args.grid)
        if args.n is not None and args.n != config.n:
            raise UsageError(f"--n {args.n} disagrees with the grid width {config.n}")
        if args.k is not None and args.k != config.k:
            raise UsageError(f"--k {args.k} disagrees with the grid height {config.k}")
        return config, experiments.ExperimentSpec(n=config.n, k=config.k, init=experiments.EXPLICIT, explicit=config)
    if args.init == experiments.EXPLICIT:
        raise UsageError("--init explicit needs --grid")
    if args.n is None or args.k is None:
        raise UsageError("--n and --k are required without --grid")
    spec = experiments.ExperimentSpec(n=args.n, k=args.k, init=args.init, m=args.m, density=args.density)
    return None, spec


def cmd_run(args) -> int:
    params = _params(args)
    config, spec = _start(args)
    rng = make_rng(args.seed)
    if config is None:
        config = experiments.initial_configuration(spec, rng)
    validate(config, params)
    result = engine.run_until_stable(config, rng, params, args.mode, args.max_steps, keep_reports=bool(args.trace))
    if args.trace:
        frames = [config]
        cur = config
        for report in result.reports:
            cur = engine.replay(cur, [report])
            frames.append(cur)
        try:
            with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(io.render_trace(frames))
        except OSError as exc:
            raise RingMarchError(f"cannot write {args.trace}: {exc}") from exc
    if result.timed_out:
        print(f"timed_out after {args.max_steps} steps")
    else:
        print(f"t_stable={result.t_stable}")
    print(f"conflicts={result.total_conflicts}")
    return EXIT_OK


def cmd_experiment(args) -> int:
    spec = io.load_config(args.config)
    result = experiments.monte_carlo(spec, args.workers)
    row = experiments.result_row(spec, result)
    io.write_csv([row], args.out)
    print(f"mean_t_stable={row['mean_t_stable']} stderr={row['stderr']} timeouts={row['timeouts']}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    p_grid = experiments.FIG4_P_GRID
    if args.p_grid:
        try:
            p_grid = tuple(float(v) for v in args.p_grid.split(","))
        except ValueError:
            raise UsageError(f"--p-grid {args.p_grid!r} is not a list of numbers") from None
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    rows = experiments.sweep_fig4(
        args.column, args.density, args.policy, args.trials, args.seed, args.max_steps, args.workers, p_grid
    )
    io.write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    config = io.parse_rows(args.grid)
    if config.k != 1:
        raise UsageError("--grid must hold a single track")
    result = oracle.exact_expected_stabilization(args.n, args.m, config, cap=args.cap)
    print(f"expected_t_stable={result.expected_t_stable!r}")
    print(f"states={result.state_count}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = tuple(args.suite) if args.suite else verify.SUITES
    results = verify.run_suites(names, runs=args.runs, seed=args.seed, trials=args.trials)
    for res in results:
        print(res.summary())
        if args.verbose:
            for line in res.examples:
                print(f"  {line}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


_COMMANDS = {
    "run": cmd_run,
    "experiment": cmd_experiment,
    "sweep": cmd_sweep,
    "oracle": cmd_oracle,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RingMarchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
