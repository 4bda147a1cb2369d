"""Gaussian-rational matrices for exact identity checks.

Real and imaginary parts are stored as object arrays of ``Fraction`` so that
sums, products and powers are exact. The induced norms are exact for real
matrices; for complex entries only :meth:`ExactOperator.magnitude_bound`
(max row sum of ``|re| + |im|``, zero iff the matrix is zero) is exact.
Ranks come from exact row reduction, so the verdict at 1 of a rational
matrix needs no singular-value cut.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from noerlund.errors import OperatorError
from noerlund.models import NormKind, SpectralVerdict
from noerlund.services.operator_core import Operator
from noerlund.services.seq_calculus import RealSeq

Rational = Union[int, Fraction]
Entry = Union[Rational, str, Tuple[Rational, Rational]]


def _fraction_matrix(rows: Iterable[Iterable[Rational]]) -> NDArray:
    try:
        matrix = np.array([[Fraction(x) for x in row] for row in rows], dtype=object)
    except (TypeError, ValueError) as exc:
        raise OperatorError(f"entries must be rational: {exc}") from exc
    return matrix


def _split(entry: Entry) -> Tuple[Fraction, Fraction]:
    if isinstance(entry, (tuple, list)):
        if len(entry) != 2:
            raise OperatorError(f"complex entry must be a (re, im) pair, got {entry!r}")
        return Fraction(entry[0]), Fraction(entry[1])
    if isinstance(entry, float):
        raise OperatorError(f"float entry {entry!r} on the exact path")
    return Fraction(entry), Fraction(0)


Pair = Tuple[Fraction, Fraction]


def _times(x: Pair, y: Pair) -> Pair:
    return x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]


def _over(x: Pair, y: Pair) -> Pair:
    norm = y[0] * y[0] + y[1] * y[1]
    return (x[0] * y[0] + x[1] * y[1]) / norm, (x[1] * y[0] - x[0] * y[1]) / norm


def _echelon_rank(rows: List[List[Pair]]) -> int:
    rank = 0
    for col in range(len(rows[0]) if rows else 0):
        pivot = next((r for r in range(rank, len(rows)) if any(rows[r][col])), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        lead = rows[rank]
        for r in range(rank + 1, len(rows)):
            if any(rows[r][col]):
                factor = _over(rows[r][col], lead[col])
                rows[r] = [
                    (x[0] - m[0], x[1] - m[1])
                    for x, m in zip(rows[r], (_times(factor, y) for y in lead))
                ]
        rank += 1
    return rank


@dataclass(frozen=True, eq=False)
class ExactOperator:
    re: NDArray
    im: NDArray

    def __post_init__(self) -> None:
        re = _fraction_matrix(self.re)
        im = _fraction_matrix(self.im)
        if re.ndim != 2 or re.shape[0] != re.shape[1] or re.shape[0] < 1:
            raise OperatorError(f"operator must be a non-empty square matrix, got shape {re.shape}")
        if im.shape != re.shape:
            raise OperatorError("real and imaginary parts differ in shape")
        re.flags.writeable = False
        im.flags.writeable = False
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Entry]]) -> "ExactOperator":
        pairs = [[_split(entry) for entry in row] for row in rows]
        return cls([[p[0] for p in row] for row in pairs], [[p[1] for p in row] for row in pairs])

    @classmethod
    def identity(cls, d: int) -> "ExactOperator":
        return cls([[int(i == j) for j in range(d)] for i in range(d)], [[0] * d for _ in range(d)])

    @classmethod
    def zeros(cls, d: int) -> "ExactOperator":
        return cls([[0] * d for _ in range(d)], [[0] * d for _ in range(d)])

    @property
    def dim(self) -> int:
        return int(self.re.shape[0])

    @property
    def is_real(self) -> bool:
        return all(x == 0 for x in self.im.flat)

    def __add__(self, other: "ExactOperator") -> "ExactOperator":
        return ExactOperator(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ExactOperator") -> "ExactOperator":
        return ExactOperator(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "ExactOperator":
        return ExactOperator(-self.re, -self.im)

    def __matmul__(self, other: "ExactOperator") -> "ExactOperator":
        return ExactOperator(
            self.re @ other.re - self.im @ other.im,
            self.re @ other.im + self.im @ other.re,
        )

    def __mul__(self, scalar: Rational) -> "ExactOperator":
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        return ExactOperator(self.re * Fraction(scalar), self.im * Fraction(scalar))

    __rmul__ = __mul__

    def power(self, k: int) -> "ExactOperator":
        if k < 0:
            raise OperatorError(f"power must be >= 0, got {k}")
        result = ExactOperator.identity(self.dim)
        for _ in range(k):
            result = result @ self
        return result

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.re.flat) and all(x == 0 for x in self.im.flat)

    def magnitude_bound(self) -> Fraction:
        return max(
            sum((abs(r) + abs(i) for r, i in zip(re_row, im_row)), Fraction(0))
            for re_row, im_row in zip(self.re, self.im)
        )

    def induced_norm(self, kind: NormKind = NormKind.INDUCED_SUP) -> Fraction:
        """Exact induced sup / l1 norm of a real matrix."""

        if not self.is_real:
            raise OperatorError("exact induced norms need a real matrix")
        kind = NormKind(kind)
        if kind is NormKind.INDUCED_SUP:
            lines = self.re
        elif kind is NormKind.INDUCED_L1:
            lines = self.re.T
        else:
            raise OperatorError(f"no exact {kind.value} norm")
        return max(sum((abs(x) for x in line), Fraction(0)) for line in lines)

    def rank(self) -> int:
        """Rank over the Gaussian rationals by exact row reduction."""

        rows = [list(zip(re_row, im_row)) for re_row, im_row in zip(self.re, self.im)]
        return _echelon_rank(rows)

    def to_operator(self, norm_kind: NormKind = NormKind.INDUCED_SUP) -> Operator:
        re = np.asarray(self.re, dtype=np.float64)
        im = np.asarray(self.im, dtype=np.float64)
        return Operator(re + 1j * im, norm_kind)


def classify_one_exact(T: ExactOperator) -> SpectralVerdict:
    """Verdict at 1 from the exact ranks of ``I - T`` and ``(I - T)^2``."""

    K = ExactOperator.identity(T.dim) - T
    rank = K.rank()
    if rank == T.dim:
        return SpectralVerdict.RESOLVENT_POINT
    if (K @ K).rank() != rank:
        return SpectralVerdict.NON_SIMPLE
    return SpectralVerdict.SIMPLE_POLE


def power_norms_exact(T: ExactOperator, N: int, kind: NormKind = NormKind.INDUCED_SUP) -> RealSeq:
    """``(||T^n||)_{n=0..N}`` in exact arithmetic for a real rational ``T``."""

    if N < 0:
        raise OperatorError(f"N must be >= 0, got {N}")
    power = ExactOperator.identity(T.dim)
    norms = [power.induced_norm(kind)]
    for _ in range(N):
        power = power @ T
        norms.append(power.induced_norm(kind))
    return RealSeq.from_values(norms, exact=True, tag="power-norms")


__all__ = ["ExactOperator", "classify_one_exact", "power_norms_exact"]
