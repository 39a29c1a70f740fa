"""
tvlab command line.

    tvlab run <config-file> [--seed N] [--trials N] [--out DIR] [--scale p/q]
    tvlab list-experiments
    tvlab verify <report.csv>

Exit codes: 0 acceptance holds (verify: every row matches), 1 acceptance
fails (verify: mismatch), 2 config error, 3 any other lab error.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .core.config import settings
from .core.exceptions import ConfigError, TVLabError
from .core.logging_config import configure_logging
from .schemas.experiment import ExperimentConfig, ExperimentSection
from .services.config_loader import load_config
from .services.experiment_runner import list_experiments, run_experiment
from .services.reports import verify_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_ERROR = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvlab", description="Robust distribution learning lab")
    parser.add_argument("--log-level", default=None, help=f"logging level (default {settings.LOG_LEVEL})")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one experiment config")
    run.add_argument("config", help="path to an experiment config file")
    run.add_argument("--seed", type=int, default=None, help="override [experiment] seed")
    run.add_argument("--trials", type=int, default=None, help="override [experiment] trials")
    run.add_argument("--out", default=None, help="override [experiment] out")
    run.add_argument("--scale", default=None, help="override [experiment] scale, e.g. 1/100")
    run.add_argument("--workers", type=int, default=None, help="override [experiment] workers")

    commands.add_parser("list-experiments", help="list experiment kinds and their acceptance predicates")

    verify = commands.add_parser("verify", help="recompute every error in a report")
    verify.add_argument("report", help="path to a report CSV")
    return parser


def apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    overrides = {
        key: value
        for key, value in (
            ("seed", args.seed), ("trials", args.trials), ("out", args.out),
            ("scale", args.scale), ("workers", args.workers),
        )
        if value is not None
    }
    if not overrides:
        return config
    try:
        section = ExperimentSection.model_validate({**config.experiment.model_dump(), **overrides})
    except ValidationError as e:
        raise ConfigError([f"--{err['loc'][0]}: {err['msg']}" for err in e.errors()]) from e
    return config.model_copy(update={"experiment": section})


def _run(args: argparse.Namespace) -> int:
    config = apply_overrides(load_config(args.config), args)
    result = run_experiment(config)
    summary = result.summary
    print(json.dumps({
        "name": summary.name,
        "kind": summary.kind,
        "acceptance": summary.acceptance.model_dump(),
        "files": result.files,
    }, indent=2))
    return EXIT_OK if result.accepted else EXIT_FAILED


def _list() -> int:
    for info in list_experiments():
        print(f"{info.kind:24} {info.description}")
        print(f"{'':24} accept: {info.acceptance}")
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    result = verify_report(args.report)
    print(json.dumps(result.model_dump(), indent=2))
    return EXIT_OK if result.ok else EXIT_FAILED


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        if args.command == "run":
            return _run(args)
        if args.command == "list-experiments":
            return _list()
        return _verify(args)
    except ConfigError as e:
        print(json.dumps(e.to_record()), file=sys.stderr)
        return EXIT_CONFIG
    except TVLabError as e:
        logger.error("%s: %s", type(e).__name__, e)
        print(json.dumps(e.to_record()), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
