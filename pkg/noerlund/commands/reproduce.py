"""``reproduce-6-10`` and ``reproduce-6-3``: the worked examples as assertions."""

from __future__ import annotations

import argparse

from noerlund.commands.common import (
    CONVERGENCE_NOTE,
    EXIT_FAILED,
    EXIT_OK,
    convergence_schema,
    csv_table,
    emit,
    output_format,
    run_header,
)
from noerlund.config import Settings
from noerlund.models import OutputFormat
from noerlund.schemas import AssertionSchema, ReproductionReport, RunHeader
from noerlund.services.reproduction import (
    ReproductionResult,
    reproduce_jordan_example,
    reproduce_shift_example,
)


def _render(result: ReproductionResult, header: RunHeader, args: argparse.Namespace) -> str:
    if output_format(args, OutputFormat.JSON) is OutputFormat.CSV:
        return csv_table(
            ["name", "passed", "failing_index", "witness", "detail"],
            [(v.name, v.passed, v.failing_index, v.witness, v.detail) for v in result.verdicts],
            header,
        )
    report = ReproductionReport(
        header=header,
        example=result.example,
        passed=result.passed,
        assertions=[AssertionSchema.model_validate(v) for v in result.verdicts],
        convergence=convergence_schema(result.report) if result.report is not None else None,
    )
    return report.model_dump_json(indent=2)


def cmd_reproduce_jordan(args: argparse.Namespace, config: Settings) -> int:
    result = reproduce_jordan_example(args.n, args.convergence_n, config)
    header = run_header(
        "reproduce-6-10",
        config,
        horizon=args.n,
        notes=[CONVERGENCE_NOTE],
        convergence_horizon=args.convergence_n or args.n,
    )
    emit(_render(result, header, args), args.out)
    return EXIT_OK if result.passed else EXIT_FAILED


def cmd_reproduce_shift(args: argparse.Namespace, config: Settings) -> int:
    result = reproduce_shift_example(args.n, args.alpha)
    header = run_header("reproduce-6-3", config, horizon=args.n, alphas=list(args.alpha))
    emit(_render(result, header, args), args.out)
    return EXIT_OK if result.passed else EXIT_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    jordan = subparsers.add_parser(
        "reproduce-6-10", help="linear power growth with convergent Nörlund means"
    )
    jordan.add_argument("--n", type=int, default=64, help="horizon of the exact checks")
    jordan.add_argument(
        "--convergence-n",
        type=int,
        default=None,
        help="horizon of the float convergence checks (default: --n)",
    )
    jordan.set_defaults(handler=cmd_reproduce_jordan)

    shift = subparsers.add_parser("reproduce-6-3", help="super-polynomial weighted-shift norms")
    shift.add_argument("--n", type=int, default=4096, help="horizon")
    shift.add_argument(
        "--alpha", type=float, nargs="+", default=[1.0, 2.0, 4.0, 6.0], help="growth exponents"
    )
    shift.set_defaults(handler=cmd_reproduce_shift)
