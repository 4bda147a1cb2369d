"""``lcm`` and ``build-majorant``: concave majorants of sequence files."""

from __future__ import annotations

import argparse
import logging
from pathlib import Path

from noerlund.commands.common import EXIT_FAILED, EXIT_OK, csv_table, emit, output_format, run_header
from noerlund.config import Settings
from noerlund.errors import MajorantError
from noerlund.models import OutputFormat
from noerlund.schemas import BuiltMajorantReport, MajorantReport, Thm47Schema
from noerlund.services.concave_majorant import contact_structure, lcm_recursive, limsup_ratio
from noerlund.services.majorant_builder import build_majorant, verify_thm47
from noerlund.services.seq_calculus import h_index
from noerlund.services.sequence_io import format_value, parse_value, read_sequence

logger = logging.getLogger(__name__)

H_INDEX_SEARCH = 8


def _tail_slope(raw: str):
    if raw is None:
        return None
    if raw.strip().lower() in ("-inf", "-infinity"):
        return float("-inf")
    return parse_value(raw, 0)


def cmd_lcm(args: argparse.Namespace, config: Settings) -> int:
    b = read_sequence(args.input)
    result = lcm_recursive(b, _tail_slope(args.tail_slope))
    structure = contact_structure(b, result)
    try:
        ratio = limsup_ratio(b, result.c)
    except MajorantError as exc:
        logger.info("limsup ratio skipped: %s", exc)
        ratio = None

    header = run_header("lcm", config, horizon=b.horizon, input=str(args.input), tail_slope=args.tail_slope)
    if output_format(args, OutputFormat.JSON) is OutputFormat.CSV:
        contacts = set(result.contact_indices)
        text = csv_table(
            ["n", "b", "c", "contact"],
            [
                (n, format_value(bn), format_value(cn), n in contacts)
                for n, (bn, cn) in enumerate(zip(b.to_list(), result.c.to_list()))
            ],
            header,
        )
    else:
        text = MajorantReport(
            header=header,
            c=[format_value(v) for v in result.c.to_list()],
            contact_indices=list(result.contact_indices),
            nu=list(structure.nu),
            n_sup=result.n_sup,
            beyond_horizon=result.beyond_horizon,
            ell=result.ell,
            tail_slope=None if result.tail_slope is None else format_value(result.tail_slope),
            eventually_affine=structure.eventually_affine,
            slope_tail=structure.slope_tail,
            limsup_ratio=ratio,
        ).model_dump_json(indent=2)
    emit(text, args.out)
    return EXIT_OK


def cmd_build_majorant(args: argparse.Namespace, config: Settings) -> int:
    b = read_sequence(args.input)
    p = args.p
    if p is None:
        estimate = h_index(b, m_max=H_INDEX_SEARCH)
        if not estimate.is_finite or estimate.value < 1:
            raise MajorantError(
                f"cannot infer p: growth index of b is {estimate.label}; pass --p explicitly"
            )
        p = estimate.value - 1
        logger.info("using p = %d from the empirical growth index", p)

    built = build_majorant(b, p)
    report = verify_thm47(built.s, p, config)

    header = run_header("build-majorant", config, horizon=b.horizon, input=str(args.input), p=p)
    if output_format(args, OutputFormat.JSON) is OutputFormat.CSV:
        text = csv_table(
            ["n", "b", "a", "c", "s"],
            [
                (n, *(format_value(v) for v in values))
                for n, values in enumerate(
                    zip(built.b.to_list(), built.a_transform.to_list(), built.c.to_list(), built.s.to_list())
                )
            ],
            header,
        )
    else:
        text = BuiltMajorantReport(
            header=header,
            p=p,
            s=[format_value(v) for v in built.s.to_list()],
            c=[format_value(v) for v in built.c.to_list()],
            ratio_window=built.ratio_window,
            h_index=built.h_estimate.label,
            h_index_agrees=built.h_index_agrees,
            sandwich_holds=built.sandwich.holds,
            thm47=Thm47Schema.model_validate(report),
        ).model_dump_json(indent=2)
    emit(text, args.out)
    return EXIT_OK if report.all_passed else EXIT_FAILED


def register(subparsers: argparse._SubParsersAction) -> None:
    lcm = subparsers.add_parser("lcm", help="least concave majorant of a sequence file")
    lcm.add_argument("input", type=Path, help="sequence file (.csv or .json)")
    lcm.add_argument(
        "--tail-slope",
        default=None,
        help="slope continuing the sequence beyond its horizon ('p/q', decimal or -inf)",
    )
    lcm.set_defaults(handler=cmd_lcm)

    build = subparsers.add_parser("build-majorant", help="majorant with a concave p-th difference")
    build.add_argument("input", type=Path, help="sequence file (.csv or .json)")
    build.add_argument("--p", type=int, default=None, help="order (default: growth index - 1)")
    build.set_defaults(handler=cmd_build_majorant)
