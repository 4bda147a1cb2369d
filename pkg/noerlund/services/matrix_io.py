"""Matrix files for the command line.

* JSON: ``{"entries": [[[re, im], ...], ...], "norm_kind": "induced_sup"}``
  or a bare array of rows. Bare numbers are real entries and ``"p/q"``
  strings are rational.
* Text: the dimension ``d`` followed by ``d*d`` entries in row-major order,
  written ``a+bi``, ``a-bi``, ``bi`` or ``a``, separated by whitespace.

When every entry is rational the reader also returns the
:class:`ExactOperator`, so identity checks can run on the exact path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

import numpy as np

from noerlund.errors import OperatorError, ParseError
from noerlund.models import NormKind
from noerlund.services.exact_operator import ExactOperator
from noerlund.services.operator_core import Operator
from noerlund.services.sequence_io import parse_value
from noerlund.services.seq_calculus import Number


@dataclass(frozen=True, eq=False)
class MatrixFile:
    operator: Operator
    exact: Optional[ExactOperator] = None


def _is_rational(value: Number) -> bool:
    return isinstance(value, (int, Fraction))


def _imaginary(text: str, line: int) -> Number:
    coefficient = text[:-1]
    if coefficient in ("", "+"):
        return 1
    if coefficient == "-":
        return -1
    return parse_value(coefficient, line)


def _split_point(text: str) -> Optional[int]:
    """Index of the sign separating the real and imaginary parts, if any."""

    for pos in range(len(text) - 1, 0, -1):
        if text[pos] in "+-" and text[pos - 1] not in "eE":
            return pos
    return None


def parse_complex(token: str, line: int) -> Tuple[Number, Number]:
    """Split ``a+bi`` into its real and imaginary parts."""

    text = token.strip().replace(" ", "")
    if not text:
        raise ParseError(line, f"cannot parse complex entry {token!r}")
    if not text.endswith("i"):
        return parse_value(text, line), 0
    pos = _split_point(text)
    if pos is None:
        return 0, _imaginary(text, line)
    return parse_value(text[:pos], line), _imaginary(text[pos:], line)


def _build(pairs: List[List[Tuple[Number, Number]]], norm_kind: NormKind, line: int) -> MatrixFile:
    d = len(pairs)
    if d == 0 or any(len(row) != d for row in pairs):
        raise ParseError(line, "matrix must be square and non-empty")
    entries = np.array([[complex(float(r), float(i)) for r, i in row] for row in pairs])
    try:
        operator = Operator(entries, norm_kind)
    except OperatorError as exc:
        raise ParseError(line, str(exc)) from exc
    exact = None
    if all(_is_rational(r) and _is_rational(i) for row in pairs for r, i in row):
        exact = ExactOperator.from_rows([[(r, i) for r, i in row] for row in pairs])
    return MatrixFile(operator=operator, exact=exact)


def _json_entry(raw: Any) -> Tuple[Number, Number]:
    if isinstance(raw, list) and len(raw) == 2:
        return _json_scalar(raw[0]), _json_scalar(raw[1])
    return _json_scalar(raw), 0


def _json_scalar(raw: Any) -> Number:
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str)):
        raise ParseError(1, f"unsupported matrix entry {raw!r}")
    if isinstance(raw, str):
        return parse_value(raw, 1)
    return raw


def parse_matrix_json(content: str, norm_kind: Optional[NormKind] = None) -> MatrixFile:
    try:
        payload = json.loads(content)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from exc

    kind = norm_kind
    if isinstance(payload, dict):
        if kind is None and payload.get("norm_kind"):
            try:
                kind = NormKind(payload["norm_kind"])
            except ValueError:
                raise ParseError(1, f"unknown norm_kind {payload['norm_kind']!r}") from None
        payload = payload.get("entries")
    if not isinstance(payload, list) or not all(isinstance(row, list) for row in payload):
        raise ParseError(1, "expected an array of matrix rows")
    pairs = [[_json_entry(raw) for raw in row] for row in payload]
    return _build(pairs, kind or NormKind.INDUCED_SUP, 1)


def parse_matrix_text(content: str, norm_kind: Optional[NormKind] = None) -> MatrixFile:
    tokens: List[Tuple[str, int]] = []
    for line_no, line in enumerate(content.splitlines(), start=1):
        text = line.split("#", 1)[0]
        tokens.extend((token, line_no) for token in text.split())
    if not tokens:
        raise ParseError(1, "empty matrix file")

    head, head_line = tokens[0]
    if not head.isdigit() or int(head) < 1:
        raise ParseError(head_line, f"expected the dimension d >= 1, got {head!r}")
    d = int(head)
    entries = tokens[1:]
    if len(entries) != d * d:
        last_line = entries[-1][1] if entries else head_line
        raise ParseError(last_line, f"expected {d * d} entries, got {len(entries)}")
    parsed = [parse_complex(token, line) for token, line in entries]
    pairs = [parsed[i * d : (i + 1) * d] for i in range(d)]
    return _build(pairs, norm_kind or NormKind.INDUCED_SUP, head_line)


def read_matrix(path: Union[str, Path], norm_kind: Optional[NormKind] = None) -> MatrixFile:
    """Read a matrix file; ``.json`` selects the JSON layout, anything else is text."""

    path = Path(path)
    content = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return parse_matrix_json(content, norm_kind)
    return parse_matrix_text(content, norm_kind)


def operator_payload(operator: Operator) -> List[List[List[float]]]:
    """Row-major ``[re, im]`` pairs."""

    return [[[float(z.real), float(z.imag)] for z in row] for row in operator.entries]


def operator_to_json(operator: Operator) -> str:
    return json.dumps({"entries": operator_payload(operator), "norm_kind": operator.norm_kind.value})


__all__ = [
    "MatrixFile",
    "operator_payload",
    "operator_to_json",
    "parse_complex",
    "parse_matrix_json",
    "parse_matrix_text",
    "read_matrix",
]
