"""``ensemble``: verdict agreement over a stratified random operator ensemble."""

from __future__ import annotations

import argparse

from noerlund.commands.common import (
    CONVERGENCE_NOTE,
    EXIT_FAILED,
    EXIT_OK,
    csv_table,
    emit,
    output_format,
    run_header,
)
from noerlund.config import Settings
from noerlund.models import OutputFormat, Stratum
from noerlund.schemas import EnsembleReport, EnsembleRowSchema
from noerlund.services.ensemble import run_ensemble

ROW_COLUMNS = (
    "index",
    "stratum",
    "dim",
    "s_spec",
    "verdict",
    "status",
    "final_distance",
    "limit_error",
    "abel_error",
    "agrees",
    "disagreement",
    "note",
)


def cmd_ensemble(args: argparse.Namespace, config: Settings) -> int:
    strata = [Stratum(name) for name in args.strata]
    s_specs = args.s or ["A:1"]
    result = run_ensemble(
        seed=args.seed,
        count=args.count,
        d_max=args.d_max,
        s_specs=s_specs,
        strata=strata,
        horizon=args.n,
        workers=args.workers,
        config=config,
    )
    rows = [EnsembleRowSchema.model_validate(row) for row in result.rows]
    header = run_header(
        "ensemble",
        config,
        horizon=result.horizon,
        notes=[CONVERGENCE_NOTE],
        seed=args.seed,
        count=args.count,
        d_max=args.d_max,
        s_specs=s_specs,
        strata=[s.value for s in strata],
    )

    if output_format(args, OutputFormat.CSV) is OutputFormat.CSV:
        dumped = [row.model_dump(mode="json") for row in rows]
        text = csv_table(
            ROW_COLUMNS, [[record[column] for column in ROW_COLUMNS] for record in dumped], header
        )
    else:
        text = EnsembleReport(
            header=header,
            seed=result.seed,
            horizon=result.horizon,
            agreement_rate=result.agreement_rate,
            undetermined_rate=result.undetermined_rate,
            disagreements=len(result.disagreements),
            rows=rows,
        ).model_dump_json(indent=2)
    emit(text, args.out)
    return EXIT_FAILED if result.disagreements else EXIT_OK


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ensemble", help="stratified ensemble, verdict vs empirical status")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--count", type=int, default=60)
    parser.add_argument("--d-max", type=int, default=6)
    parser.add_argument(
        "--s",
        action="append",
        default=None,
        help="weights: 'A:<alpha>' or 'built' (repeatable, default A:1)",
    )
    parser.add_argument(
        "--strata",
        nargs="+",
        choices=[s.value for s in Stratum],
        default=[s.value for s in Stratum],
    )
    parser.add_argument("--n", type=int, default=None, help="horizon (default from settings)")
    parser.add_argument("--workers", type=int, default=None)
    parser.set_defaults(handler=cmd_ensemble)
