"""Command-line entry point.

Exit status: 0 when every assertion passes, 1 when an assertion fails,
2 on bad input or a library error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from noerlund import __version__
from noerlund.commands import ensemble, majorant, means, reproduce
from noerlund.commands.common import EXIT_ERROR
from noerlund.config import configure, load_settings
from noerlund.models import NormKind, OutputFormat

logger = logging.getLogger(__name__)

COMMANDS = (reproduce, ensemble, majorant, means)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noerlund",
        description="Nörlund means of operator powers: majorants, convergence diagnostics, reproductions",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, default=None, help="JSON run file with settings")
    parser.add_argument("--log-level", default=None, help="logging level (default from settings)")
    parser.add_argument("--tol", type=float, default=None, help="numerical rank tolerance")
    parser.add_argument("--norm", choices=[k.value for k in NormKind], default=None)
    parser.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)

    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = configure(
            load_settings(
                args.config,
                rank_tol=args.tol,
                default_norm=args.norm,
                log_level=args.log_level,
            )
        )
        logging.basicConfig(
            level=config.log_level.upper(),
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    logger.debug("running %s", args.command)

    try:
        return args.handler(args, config)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
