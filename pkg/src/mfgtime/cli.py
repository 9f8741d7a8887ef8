"""
Command-line entry point: `python -m mfgtime <solve|equilibrium|verify>`.

Exit codes: 0 ok, 1 a required diagnostic failed, 2 configuration error
(including targets the grid cannot resolve or reach),
3 CFL violation, 4 equilibrium or stationary solve not converged,
5 artifact mismatch.
"""

import argparse
from typing import List, Optional

from mfgtime.core.constants import DEFAULT_DAMPING_MODE, DEFAULT_MAX_ITERS, DEFAULT_TOL
from mfgtime.core.errors import (ArtifactMismatchError, CFLViolationError, ConfigError, EmptyTargetError,
                                 StationarySolveError, TracingError)
from mfgtime.equilibrium.damping import DampingFactory
from mfgtime.model.scenario import Scenario
from mfgtime.run import Run
from mfgtime.utils.formatting import chapter, error
from mfgtime.utils.utils import default_workers

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_CFL = 3
EXIT_NOT_CONVERGED = 4
EXIT_ARTIFACT_MISMATCH = 5


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as ConfigError instead of exiting."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mfgtime",
                     description="Minimal-time mean field games: solve, search equilibria, verify.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--scenario", required=True, help="Scenario JSON file")
    common.add_argument("--out", required=True, help="Output directory for artifacts")
    common.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
    common.add_argument("--workers", type=int, default=None,
                        help="Worker threads for per-population work (default: CPU count)")
    common.add_argument("--directions", type=int, default=None, help="Number of sampled directions M")
    common.add_argument("--quiet", action="store_true", help="Only print errors")

    solve = commands.add_parser("solve", parents=[common],
                                help="Value functions and optimal paths against a fixed crowd")
    solve.add_argument("--bundle", default=None, help="Bundle CSV describing the crowd (default: stationary m0)")

    equilibrium = commands.add_parser("equilibrium", parents=[common], help="Damped best-response iteration")
    equilibrium.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    equilibrium.add_argument("--tol", type=float, default=DEFAULT_TOL)
    equilibrium.add_argument("--mode", default=DEFAULT_DAMPING_MODE,
                             choices=DampingFactory.list_supported_modes())

    verify = commands.add_parser("verify", parents=[common], help="Run every diagnostic on stored artifacts")
    verify.add_argument("--artifacts", required=True, help="Directory written by a previous run")
    return parser


def _load_scenario(args) -> Scenario:
    overrides = {}
    if args.directions is not None:
        overrides["directions"] = args.directions
    return Scenario.from_json(args.scenario, seed=args.seed, solver_overrides=overrides)


def run_command(args) -> int:
    verbose = not args.quiet
    workers = default_workers() if args.workers is None else args.workers
    if workers < 1:
        raise ConfigError(f"--workers must be at least 1, got {workers}.")
    scenario = _load_scenario(args)
    run = Run(scenario, args.out, command=args.command, workers=workers, verbose=verbose)
    if verbose:
        print(chapter(f"mfgtime {args.command}"))
        scenario.show()

    if args.command == "solve":
        run.solve(args.bundle)
        code = EXIT_OK
    elif args.command == "equilibrium":
        if args.max_iters < 0:
            raise ConfigError(f"--max-iters must be nonnegative, got {args.max_iters}.")
        if args.tol < 0:
            raise ConfigError(f"--tol must be nonnegative, got {args.tol}.")
        converged = run.equilibrium(args.max_iters, args.tol, args.mode)
        code = EXIT_OK if converged else EXIT_NOT_CONVERGED
    else:
        report = run.verify(args.artifacts)
        code = EXIT_OK if report.passed else EXIT_CHECK_FAILED

    if verbose:
        run.summary.show_report()
    return code


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return run_command(args)
    except CFLViolationError as exc:
        print(error(str(exc)))
        return EXIT_CFL
    except ArtifactMismatchError as exc:
        print(error(str(exc)))
        return EXIT_ARTIFACT_MISMATCH
    except StationarySolveError as exc:
        print(error(str(exc)))
        return EXIT_NOT_CONVERGED
    except (ConfigError, EmptyTargetError, TracingError) as exc:
        print(error(str(exc)))
        return EXIT_CONFIG
