"""Helpers shared by the subcommands: headers, output and exit codes."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from noerlund.config import Settings
from noerlund.models import OutputFormat, SpectralVerdict
from noerlund.schemas import ConvergenceSchema, RunHeader
from noerlund.services.ergodic_engine import ConvergenceReport
from noerlund.services.matrix_io import operator_payload

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2

CONVERGENCE_NOTE = (
    "converged: ||M_n - P|| <= convergence_atol * (1 + ||P||) over the last quarter "
    "(default factor 5e-2, not 1e-6, since the means approach P only at the rate "
    "Δs(n)/s(n)); limits are matched to limit_match_tol on the extrapolated estimate"
)


def run_header(
    command: str,
    config: Settings,
    horizon: Optional[int] = None,
    notes: Sequence[str] = (),
    **parameters: Any,
) -> RunHeader:
    return RunHeader(
        command=command,
        version=config.app_version,
        horizon=horizon,
        parameters=parameters,
        tolerances=config.tolerances(),
        overrides=config.tolerance_overrides(),
        notes=list(notes),
    )


def csv_preamble(header: RunHeader) -> str:
    """``# key=value`` comment lines carrying the run header."""

    record = header.model_dump(mode="json")
    lines = []
    for key in ("command", "version", "horizon"):
        lines.append(f"# {key}={'' if record[key] is None else record[key]}")
    for key in ("parameters", "tolerances", "overrides"):
        lines.append(f"# {key}={json.dumps(record[key], sort_keys=True)}")
    lines.extend(f"# note={note}" for note in record["notes"])
    return "\n".join(lines) + "\n"


def output_format(args: argparse.Namespace, default: OutputFormat) -> OutputFormat:
    return OutputFormat(args.format) if args.format else default


def emit(text: str, out: Optional[Path]) -> None:
    """Write ``text`` to ``out``, or to stdout when no path is given."""

    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def csv_table(
    columns: Sequence[str], rows: Iterable[Sequence[Any]], header: Optional[RunHeader] = None
) -> str:
    buffer = io.StringIO()
    if header is not None:
        buffer.write(csv_preamble(header))
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if value is None else value for value in row])
    return buffer.getvalue()


def convergence_schema(
    report: ConvergenceReport,
    header: Optional[RunHeader] = None,
    exact_verdict: Optional[SpectralVerdict] = None,
) -> ConvergenceSchema:
    return ConvergenceSchema(
        header=header,
        verdict=report.verdict,
        exact_verdict=exact_verdict,
        status=report.status,
        horizon=report.horizon,
        final_distance=report.final_distance,
        norm_ratio_tail=report.norm_ratio_tail,
        kernel_witness=report.kernel_witness,
        limit_error=report.limit_error,
        power_drift=report.power_drift,
        target=operator_payload(report.target) if report.target is not None else None,
        limit_estimate=(
            operator_payload(report.limit_estimate) if report.limit_estimate is not None else None
        ),
        thresholds=report.thresholds,
        distances=report.distances.to_list(),
    )
