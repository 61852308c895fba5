# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""carbonshop - command-line entry point."""

import argparse
import logging
import sys

from pathlib import Path
from typing import Callable, Optional, Sequence

from .commands import (cmd_eval, cmd_generate, cmd_oracle, cmd_report, cmd_sweep_lambda, cmd_sweep_ratio,
                       cmd_train)
from .config import load_run_config, RunConfig
from .settings import Settings
from .tables import format_table

logger = logging.getLogger(__name__)

VERSION = "0.1.0"

COMMAND_FLAGS = ('oracle_lam', 'oracle_max_nodes')


def _eval(cfg: RunConfig) -> None:
    print(format_table(cmd_eval(cfg)), end="")


def _sweep_ratio(cfg: RunConfig) -> None:
    for ratio, table in cmd_sweep_ratio(cfg).items():
        print(f"ratio 1:{ratio:g}")
        print(format_table(table))


COMMANDS: dict[str, tuple[Callable[[RunConfig], object], str]] = {
    'generate': (cmd_generate, "generate a synthetic dataset with emission sidecars and manifests"),
    'train': (cmd_train, "train policies on the training manifest"),
    'eval': (_eval, "evaluate methods on the test manifest"),
    'sweep-lambda': (cmd_sweep_lambda, "train and evaluate one policy per emission weight"),
    'sweep-ratio': (_sweep_ratio, "evaluate methods under several emission ratios"),
    'oracle': (cmd_oracle, "solve small test instances exactly"),
    'report': (cmd_report, "assemble a Markdown report from eval and sweep outputs"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=Path, help='key=value configuration file')
    common.add_argument('--seed', type=int, help='base seed (overrides the configuration)')
    common.add_argument('--out', help='output directory (overrides the configuration)')
    common.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                        help='override one setting; repeatable')
    common.add_argument('-v', '--verbose', action='store_true', help='report progress')
    common.add_argument('--debug', action='store_true', help='enable debug logging')

    parser = argparse.ArgumentParser(
        prog='carbonshop',
        description='carbonshop - carbon-aware flexible job-shop scheduling benchmarks',
        epilog='Examples:\n'
               '  carbonshop generate --out data --set n_instances=200\n'
               '  carbonshop train --out runs/luca --set runs=1 --set iterations=200\n'
               '  carbonshop eval --out results --set checkpoints=runs/luca/checkpoints.txt\n'
               '  carbonshop report --out report --set eval_dir=results',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument('--version', action='version', version=f'carbonshop {VERSION}')
    sub = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')
    for name, (_, help_text) in COMMANDS.items():
        command = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == 'oracle':
            command.add_argument('--lambda', dest='oracle_lam', type=_unit_interval, metavar='X',
                                 help='emission weight in [0, 1] (overrides oracle_lam)')
            command.add_argument('--max-nodes', dest='oracle_max_nodes', type=_positive_int, metavar='N',
                                 help='node limit of the search (overrides oracle_max_nodes)')
    return parser


def _unit_interval(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must be in [0, 1]: {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def command_flags(args: argparse.Namespace) -> dict[str, str]:
    """Settings given as command-specific flags, as configuration values."""
    return {key: repr(value) for key in COMMAND_FLAGS if (value := getattr(args, key, None)) is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point of the `carbonshop` command.

    Returns:
        Exit code: 0 on success, 1 on any error. Usage errors exit with 2.
    """
    args = build_parser().parse_args(argv)
    Settings(is_verbose=args.verbose, is_debug=args.debug).configure_logging()
    try:
        cfg = load_run_config(args.config, args.overrides, seed=args.seed, out=args.out, flags=command_flags(args))
        command, _ = COMMANDS[args.command]
        command(cfg)
    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=args.debug)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
