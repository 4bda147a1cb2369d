"""Reading and writing scalar sequences.

Two layouts are accepted:

* CSV: one value per line with the index implicit. Blank lines and ``#``
  comments are skipped; values are integers, decimals or ``p/q``
  rationals. A file whose values are all rational yields an exact
  :class:`RealSeq`.
* JSON: a bare array, or an object ``{"values": [...], "generator": tag}``.
  Known generator tags (``cesaro:<alpha>``, ``weighted-shift``) are
  reattached as closed-form generators and checked against the values.

Exact values are written as ``"p/q"`` strings and floats as JSON numbers,
so a file written here reads back on the same arithmetic path.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from noerlund.errors import ParseError, SequenceError
from noerlund.services.operator_core import shift_norms_closed_form
from noerlund.services.seq_calculus import Number, RealSeq, cesaro_numbers

INTEGER_PATTERN = re.compile(r"^[+-]?\d+$")
RATIONAL_PATTERN = re.compile(r"^(?P<num>[+-]?\d+)\s*/\s*(?P<den>\d+)$")
CESARO_PREFIX = "cesaro:"
SHIFT_TAG = "weighted-shift"


@dataclass
class ParsedSequence:
    """Return value for :func:`parse_sequence_csv`."""

    sequence: RealSeq
    comments: List[str] = field(default_factory=list)


def parse_value(raw: str, line: int) -> Number:
    """Parse one cell as ``int``, ``Fraction`` (``p/q``) or ``float``."""

    value = raw.strip()
    if INTEGER_PATTERN.match(value):
        return int(value)
    match = RATIONAL_PATTERN.match(value)
    if match:
        if int(match.group("den")) == 0:
            raise ParseError(line, f"zero denominator in {value!r}")
        return Fraction(int(match.group("num")), int(match.group("den")))
    try:
        number = float(value)
    except ValueError:
        raise ParseError(line, f"cannot parse {value!r} as a number") from None
    if number != number:
        raise ParseError(line, "NaN is not a valid sequence value")
    return number


def parse_sequence_csv(content: str, tag: Optional[str] = None) -> ParsedSequence:
    """Parse single-column CSV text into a sequence.

    Parameters
    ----------
    content:
        Decoded file text; a BOM and any newline convention are accepted.
    tag:
        Optional provenance tag stored on the sequence.
    """

    normalised = content.replace("\r\n", "\n").replace("\r", "\n")
    if normalised.startswith("\ufeff"):
        normalised = normalised[1:]

    values: List[Number] = []
    comments: List[str] = []
    for line_no, row in enumerate(csv.reader(io.StringIO(normalised)), start=1):
        cells = [cell.strip() for cell in row]
        if not cells or not any(cells):
            continue
        if cells[0].startswith("#"):
            comments.append(",".join(row).lstrip("#").strip())
            continue
        if len([cell for cell in cells if cell]) != 1:
            raise ParseError(line_no, f"expected one value per line, got {len(cells)} columns")
        values.append(parse_value(cells[0], line_no))

    if not values:
        raise ParseError(1, "no sequence values found")
    try:
        sequence = RealSeq.from_values(values, tag=tag)
    except SequenceError as exc:
        raise ParseError(1, str(exc)) from exc
    return ParsedSequence(sequence=sequence, comments=comments)


def _json_value(raw: Any, index: int) -> Number:
    if isinstance(raw, bool):
        raise ParseError(1, f"boolean at index {index} is not a number")
    if isinstance(raw, (int, float)):
        return raw
    if isinstance(raw, str):
        return parse_value(raw, 1)
    raise ParseError(1, f"unsupported value at index {index}: {raw!r}")


def _alpha_from_tag(tag: str) -> Number:
    text = tag[len(CESARO_PREFIX):]
    if INTEGER_PATTERN.match(text) or RATIONAL_PATTERN.match(text):
        return parse_value(text, 1)
    return float(text)


def rehydrate(values: List[Number], tag: Optional[str]) -> RealSeq:
    """Attach the closed-form generator named by ``tag`` when one is known."""

    if tag is None:
        return RealSeq.from_values(values)
    horizon = len(values) - 1
    if tag.startswith(CESARO_PREFIX):
        generator = cesaro_numbers(_alpha_from_tag(tag), horizon).values.generator
    elif tag == SHIFT_TAG:
        generator = shift_norms_closed_form(horizon).generator
    else:
        return RealSeq.from_values(values, tag=tag)
    return RealSeq(values, generator=generator, tag=tag)


def parse_sequence_json(content: str) -> RealSeq:
    try:
        payload = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from exc

    tag = None
    if isinstance(payload, dict):
        tag = payload.get("generator")
        payload = payload.get("values")
    if not isinstance(payload, list) or not payload:
        raise ParseError(1, "expected a non-empty array of values")

    values = [_json_value(raw, i) for i, raw in enumerate(payload)]
    try:
        return rehydrate(values, tag)
    except SequenceError as exc:
        raise ParseError(1, str(exc)) from exc


def read_sequence(path: Union[str, Path]) -> RealSeq:
    """Read a sequence file, choosing the layout by suffix (``.json`` or CSV)."""

    path = Path(path)
    content = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return parse_sequence_json(content)
    return parse_sequence_csv(content, tag=path.stem).sequence


def format_value(value: Number) -> Union[str, float]:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return float(value)


def sequence_payload(seq: RealSeq) -> Dict[str, Any]:
    payload: Dict[str, Any] = {"values": [format_value(v) for v in seq.to_list()]}
    if seq.tag:
        payload["generator"] = seq.tag
    return payload


def sequence_to_json(seq: RealSeq) -> str:
    return json.dumps(sequence_payload(seq), indent=2)


def sequence_to_csv(seq: RealSeq) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for value in seq.to_list():
        formatted = format_value(value)
        writer.writerow([formatted if isinstance(formatted, str) else repr(formatted)])
    return buffer.getvalue()


__all__ = [
    "ParsedSequence",
    "format_value",
    "parse_sequence_csv",
    "parse_sequence_json",
    "parse_value",
    "read_sequence",
    "rehydrate",
    "sequence_payload",
    "sequence_to_csv",
    "sequence_to_json",
]
