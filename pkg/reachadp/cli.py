"""
Command line entry point ``reachadp``.

Verbs::

    reachadp synthesize --config CONFIG [--out-dir DIR]
    reachadp evaluate --config CONFIG --stack STACK [--out-dir DIR]
    reachadp benchmark {example1,example2} [--scale SCALE] [--out-dir DIR]
    reachadp inspect STACK

Exit status is 0 on success, 2 for invalid input and 3 for numerical
failures of the synthesis.
"""

import argparse
import json
import logging
import os
import sys

from reachadp.adp import synthesize
from reachadp.benchmarks.suites import SCALES, SUITES, run_suite
from reachadp.config import load_config
from reachadp.evaluation import evaluate_stack, initial_conditions
from reachadp.exceptions import (
    DomainError,
    LpUnboundedError,
    NumericalError,
    StageStateError,
    UnsupportedError,
    ValidationError,
)
from reachadp.utils import seeding
from reachadp.utils.csv_output import write_csv
from reachadp.utils.stack_io import read_stack, read_stack_header, write_stack

logger = logging.getLogger("reachadp")

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

STACK_FILE = "value_stack.txt"
REPORT_FILE = "synthesis_report.json"
EVALUATION_FILE = "evaluation.csv"
GRID_FILE = "grid_value.csv"


def _load(args):
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def cmd_synthesize(args):
    config = _load(args)
    stack = synthesize(config.problem, config.synthesis, workers=args.workers)
    os.makedirs(args.out_dir, exist_ok=True)
    write_stack(stack, os.path.join(args.out_dir, STACK_FILE))
    report = {
        "config": config.source,
        "problem_hash": config.problem.hash(),
        "synthesis": config.synthesis.to_dict(),
        "stages": stack.summary(),
    }
    with open(os.path.join(args.out_dir, REPORT_FILE), "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
    logger.info("Value stack written to %s", os.path.join(args.out_dir, STACK_FILE))
    return EXIT_OK


def cmd_evaluate(args):
    config = _load(args)
    stack = read_stack(args.stack, config.problem)
    params = config.evaluation
    rng = seeding.derive_rng(params.seed, seeding.INITIAL_CONDITIONS)
    x0s = initial_conditions(config.problem, params.initial_conditions, rng, blocked=params.blocked)
    result = evaluate_stack(
        stack,
        x0s,
        params.rollouts,
        seed=params.seed,
        baseline=params.baseline,
        grid_resolution=params.grid_resolution,
        control_resolution=params.control_resolution,
        n_starts=params.n_starts,
        workers=args.workers,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    write_csv(os.path.join(args.out_dir, EVALUATION_FILE), result.header, result.rows)
    if result.grid_value is not None:
        header = [f"x_{l + 1}" for l in range(config.problem.state_dim)] + ["V0_grid"]
        write_csv(os.path.join(args.out_dir, GRID_FILE), header, result.grid_value.to_rows(0))
    logger.info("Evaluation written to %s", os.path.join(args.out_dir, EVALUATION_FILE))
    return EXIT_OK


def cmd_benchmark(args):
    seed = 0 if args.seed is None else args.seed
    run_suite(args.suite, args.out_dir, scale=args.scale, seed=seed, workers=args.workers)
    return EXIT_OK


def cmd_inspect(args):
    header, summary = read_stack_header(args.stack)
    for key in ("format_version", "problem_hash", "horizon", "state_dim"):
        print(f"{key}: {header[key]}")
    for row in summary:
        fields = " ".join(f"{key}={row[key]}" for key in sorted(row) if key != "k")
        print(f"stage {row['k']}: {fields}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="reachadp",
        description="Approximate dynamic programming for stochastic reach-avoid problems",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="experiment configuration (JSON)")
        p.add_argument("--seed", type=int, default=None, help="override the configured seeds")
        p.add_argument("--workers", type=int, default=1, help="worker threads")
        p.add_argument("--out-dir", default="reachadp_out", help="output directory")

    p = sub.add_parser("synthesize", help="synthesize a value stack")
    common(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("evaluate", help="evaluate the controller of a value stack")
    common(p)
    p.add_argument("--stack", required=True, help="value stack file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="run a benchmark suite")
    p.add_argument("suite", choices=SUITES)
    common(p, config=False)
    p.add_argument(
        "--scale",
        default="desk",
        help=f"one of {sorted(SCALES)} or a JSON file of settings",
    )
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("inspect", help="print the metadata of a value stack")
    p.add_argument("stack", help="value stack file")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
    logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        if getattr(args, "workers", 1) < 1:
            raise ValidationError("--workers must be positive")
        return args.func(args)
    except (ValidationError, DomainError, UnsupportedError, OSError) as err:
        logger.error("%s", err)
        return EXIT_VALIDATION
    except LpUnboundedError as err:
        logger.error("Stage %s: %s", err.stage, err)
        return EXIT_NUMERICAL
    except (NumericalError, StageStateError) as err:
        logger.error("%s", err)
        return EXIT_NUMERICAL
    finally:
        logger.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
