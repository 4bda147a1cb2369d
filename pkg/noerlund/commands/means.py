"""``cesaro-means``: Cesàro means of a matrix read from file."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from noerlund.commands.common import (
    CONVERGENCE_NOTE,
    EXIT_FAILED,
    EXIT_OK,
    convergence_schema,
    csv_preamble,
    emit,
    output_format,
    run_header,
)
from noerlund.config import Settings
from noerlund.errors import WeightError
from noerlund.models import NormKind, OutputFormat
from noerlund.services.ergodic_engine import convergence_report, distances_csv
from noerlund.services.exact_operator import classify_one_exact
from noerlund.services.matrix_io import read_matrix
from noerlund.services.seq_calculus import cesaro_numbers

logger = logging.getLogger(__name__)


def cmd_cesaro_means(args: argparse.Namespace, config: Settings) -> int:
    if not args.alpha > 0:
        raise WeightError(0, f"alpha must be > 0, got {args.alpha}")
    matrix = read_matrix(args.matrix, NormKind(args.norm) if args.norm else None)
    weights = cesaro_numbers(args.alpha, args.n, exact=False).values
    report = convergence_report(matrix.operator, weights, args.n, config)

    exact_verdict = None
    if matrix.exact is not None:
        exact_verdict = classify_one_exact(matrix.exact)
        if exact_verdict is not report.verdict:
            logger.warning(
                "exact verdict %s differs from the numerical verdict %s",
                exact_verdict.value,
                report.verdict.value,
            )

    header = run_header(
        "cesaro-means",
        config,
        horizon=args.n,
        notes=[CONVERGENCE_NOTE],
        matrix=str(args.matrix),
        alpha=args.alpha,
    )
    if output_format(args, OutputFormat.JSON) is OutputFormat.CSV:
        text = csv_preamble(header) + distances_csv(report)
    else:
        text = convergence_schema(report, header, exact_verdict).model_dump_json(indent=2)
    emit(text, args.out)
    return EXIT_OK if exact_verdict in (None, report.verdict) else EXIT_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("cesaro-means", help="Cesàro means (C, alpha) of a matrix")
    parser.add_argument("matrix", type=Path, help="matrix file (.json or text)")
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--n", type=int, default=2000)
    parser.set_defaults(handler=cmd_cesaro_means)
