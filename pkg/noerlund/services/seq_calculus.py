"""Real sequences and the backward-difference / partial-sum calculus.

A :class:`RealSeq` is a finite, immutable prefix ``a(0), ..., a(N)`` of an
infinite real sequence, optionally backed by a closed-form generator that
answers indices beyond the prefix. Two arithmetic paths share one code
path:

* the exact path stores :class:`fractions.Fraction` values in an object
  array and is selected automatically for integer/rational input;
* the float path stores ``float64`` values and is used for everything else.

This module provides:

* ``delta`` / ``sigma`` and their iterates (mutually inverse)
* Cesàro numbers ``A_alpha(n)`` with a closed-form generator
* shape predicates (monotone, concave, convex) with an optional relative
  tolerance for float data
* the unboundedness index estimator ``h_index`` (dyadic tail windows, or a
  caller-certified bound)
* the piecewise-linear interpolant ``phi_interpolant``
* finite checks for the Σ^p sandwich bounds and the ℓ1 difference bound
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from noerlund.config import settings
from noerlund.errors import InsufficientHorizonError, SequenceError
from noerlund.models import HIndexMode, SequenceOp

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]
Generator = Callable[[int], Number]

UNDETERMINED = "infinite/undetermined"


def _is_rational(value: object) -> bool:
    if isinstance(value, (bool, np.bool_)):
        return False
    return isinstance(value, (int, Fraction, np.integer))


def _as_values(values: Iterable[Number], exact: Optional[bool] = None) -> NDArray:
    """Normalise ``values`` into a read-only array on the requested path."""

    if isinstance(values, np.ndarray) and values.dtype != object:
        raw = values.tolist()
    else:
        raw = list(values)

    if exact is None:
        exact = bool(raw) and all(_is_rational(v) for v in raw)

    if exact:
        bad = next((i for i, v in enumerate(raw) if not _is_rational(v)), None)
        if bad is not None:
            raise SequenceError(f"value at index {bad} is not rational: {raw[bad]!r}")
        array = np.array([Fraction(int(v)) if isinstance(v, np.integer) else Fraction(v) for v in raw], dtype=object)
    else:
        try:
            array = np.asarray([float(v) for v in raw], dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise SequenceError(f"sequence values must be real numbers: {exc}") from exc
        if np.isnan(array).any():
            raise SequenceError(f"NaN at index {int(np.flatnonzero(np.isnan(array))[0])}")

    array.flags.writeable = False
    return array


def _sample_indices(horizon: int, count: int) -> List[int]:
    if horizon + 1 <= count:
        return list(range(horizon + 1))
    return sorted({int(round(x)) for x in np.linspace(0, horizon, count)})


@dataclass(frozen=True, eq=False)
class RealSeq:
    """A materialized prefix ``a(0..horizon)`` with an optional generator.

    When ``generator`` is given it must agree with the prefix; agreement is
    checked on a bounded sample of indices (exactly on the rational path,
    to ``Settings.generator_rtol`` on the float path).
    """

    values: NDArray
    generator: Optional[Generator] = None
    tag: Optional[str] = None

    def __post_init__(self) -> None:
        values = _as_values(self.values)
        if values.size == 0:
            raise SequenceError("a sequence needs at least the value at index 0")
        object.__setattr__(self, "values", values)
        if self.generator is not None:
            self._check_generator()

    def _check_generator(self) -> None:
        for n in _sample_indices(self.horizon, settings.generator_samples):
            expected = self.generator(n)
            actual = self.values[n]
            if self.exact and _is_rational(expected):
                consistent = Fraction(expected) == actual
            else:
                consistent = math.isclose(
                    float(actual), float(expected), rel_tol=settings.generator_rtol, abs_tol=0.0
                )
            if not consistent:
                raise SequenceError(
                    f"generator disagrees with the prefix at n={n}: {expected!r} != {actual!r}"
                )

    @classmethod
    def from_values(
        cls, values: Iterable[Number], *, exact: Optional[bool] = None, tag: Optional[str] = None
    ) -> "RealSeq":
        return cls(_as_values(values, exact), tag=tag)

    @classmethod
    def from_generator(
        cls, generator: Generator, horizon: int, *, tag: Optional[str] = None
    ) -> "RealSeq":
        if horizon < 0:
            raise SequenceError(f"horizon must be >= 0, got {horizon}")
        return cls([generator(n) for n in range(horizon + 1)], generator=generator, tag=tag)

    @property
    def horizon(self) -> int:
        return int(self.values.size) - 1

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def overflowed(self) -> bool:
        """True when a float prefix contains infinities."""
        return (not self.exact) and bool(np.isinf(self.values).any())

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, n: int) -> Number:
        if n < 0:
            raise IndexError(f"negative index {n}")
        if n <= self.horizon:
            value = self.values[n]
            return value if self.exact else float(value)
        if self.generator is None:
            raise IndexError(f"index {n} beyond horizon {self.horizon} and no generator")
        return self.generator(n)

    def __iter__(self):
        return iter(self.to_list())

    def to_list(self) -> List[Number]:
        return list(self.values) if self.exact else self.values.tolist()

    def as_float(self) -> NDArray[np.float64]:
        return np.asarray(self.values, dtype=np.float64).copy()

    def with_values(self, values: Iterable[Number], tag: Optional[str] = None) -> "RealSeq":
        """Derived sequence on the same path, without a generator."""
        return RealSeq(_as_values(values, self.exact), tag=tag)

    def truncate(self, horizon: int) -> "RealSeq":
        if not 0 <= horizon <= self.horizon:
            raise SequenceError(f"cannot truncate horizon {self.horizon} to {horizon}")
        return RealSeq(self.values[: horizon + 1], generator=self.generator, tag=self.tag)

    def extend(self, horizon: int) -> "RealSeq":
        if horizon <= self.horizon:
            return self.truncate(horizon)
        if self.generator is None:
            raise InsufficientHorizonError(horizon, self.horizon, "generator-free sequence")
        tail = [self.generator(n) for n in range(self.horizon + 1, horizon + 1)]
        return RealSeq(self.to_list() + tail, generator=self.generator, tag=self.tag)


@dataclass(frozen=True, eq=False)
class CesaroSeq:
    alpha: Number
    values: RealSeq


@dataclass(frozen=True)
class ShapeReport:
    """Shape verdicts; ``None`` means undetermined (horizon < 2)."""

    nondecreasing: bool
    strictly_increasing: bool
    concave: Optional[bool]
    convex: Optional[bool]


@dataclass(frozen=True)
class WindowEvidence:
    m: int
    front_max: float
    tail_max: float

    @property
    def non_increasing(self) -> bool:
        return self.tail_max <= self.front_max


@dataclass(frozen=True)
class CertifiedBound:
    """Caller-asserted statement ``a(n) <= constant * n**exponent`` for all n >= 1."""

    exponent: int
    constant: float
    source: str = ""


@dataclass(frozen=True)
class HIndexEstimate:
    value: Optional[int]
    evidence: Tuple[WindowEvidence, ...]
    mode: HIndexMode
    statement: Optional[CertifiedBound] = None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    @property
    def label(self) -> str:
        return UNDETERMINED if self.value is None else str(self.value)


@dataclass(frozen=True)
class SandwichCheck:
    """First violating index of each Σ^p bound, or ``None``."""

    p: int
    lower_violation: Optional[int]
    upper_violation: Optional[int]

    @property
    def holds(self) -> bool:
        return self.lower_violation is None and self.upper_violation is None


@dataclass(frozen=True)
class DifferenceBound:
    q: int
    total_variation: Number
    violation: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.violation is None


# ---------------------------------------------------------------------------
# Δ / Σ calculus
# ---------------------------------------------------------------------------


def delta(a: RealSeq) -> RealSeq:
    """Backward difference: ``(Δa)(0) = a(0)``, ``(Δa)(n) = a(n) - a(n-1)``."""

    out = np.empty_like(a.values)
    out[0] = a.values[0]
    out[1:] = a.values[1:] - a.values[:-1]
    return RealSeq(out)


def sigma(a: RealSeq) -> RealSeq:
    """Partial sums ``(Σa)(n) = a(0) + ... + a(n)``."""

    return RealSeq(np.cumsum(a.values))


_OPERATORS = {SequenceOp.DELTA: delta, SequenceOp.SIGMA: sigma}


def iterate(
    op: Union[SequenceOp, str, Callable[[RealSeq], RealSeq]], a: RealSeq, m: int
) -> RealSeq:
    """Apply ``op`` (``delta`` or ``sigma``) ``m`` times; ``m = 0`` is the identity."""

    if m < 0:
        raise SequenceError(f"iteration count must be >= 0, got {m}")
    fn = op if callable(op) else _OPERATORS[SequenceOp(op)]
    result = a
    for _ in range(m):
        result = fn(result)
    return result


# ---------------------------------------------------------------------------
# Cesàro numbers
# ---------------------------------------------------------------------------


def _cesaro_prefix(alpha: Number, N: int, exact: bool) -> List[Number]:
    if exact:
        values: List[Number] = [Fraction(1)]
        for n in range(1, N + 1):
            values.append(values[-1] * (alpha + n) / n)
        return values
    k = np.arange(1, N + 1, dtype=np.float64)
    return [1.0] + np.cumprod((alpha + k) / k).tolist()


def _cesaro_generator(alpha: Number, prefix: Sequence[Number], exact: bool) -> Generator:
    frozen = tuple(prefix)

    def generate(n: int) -> Number:
        if n < len(frozen):
            return frozen[n]
        value = frozen[-1]
        for k in range(len(frozen), n + 1):
            value = value * (alpha + k) / k if exact else value * ((alpha + k) / k)
        return value

    return generate


def cesaro_numbers(alpha: Number, N: int, *, exact: Optional[bool] = None) -> CesaroSeq:
    """Cesàro numbers ``A_alpha(0..N)`` via ``A(n) = A(n-1) * (alpha + n) / n``.

    Rational ``alpha`` (int or Fraction) selects the exact path unless
    ``exact=False`` is passed.
    """

    if N < 0:
        raise SequenceError(f"N must be >= 0, got {N}")
    if exact is None:
        exact = _is_rational(alpha)
    alpha = Fraction(alpha) if exact else float(alpha)
    prefix = _cesaro_prefix(alpha, N, exact)
    seq = RealSeq(
        _as_values(prefix, exact),
        generator=_cesaro_generator(alpha, prefix, exact),
        tag=f"cesaro:{alpha}",
    )
    return CesaroSeq(alpha=alpha, values=seq)


def concavity_order(alpha: Number) -> int:
    """The integer ``p = max{k : k < alpha}`` for which Δ^p A_alpha is concave."""

    if alpha <= 0:
        raise SequenceError(f"alpha must be > 0, got {alpha}")
    return math.ceil(alpha) - 1


def hockey_stick(j: int, n: int) -> int:
    """``sum_{k=j}^{n} C(k, j)``, equal to ``C(n+1, j+1)``."""

    if j < 0 or n < j:
        raise SequenceError(f"hockey_stick needs n >= j >= 0, got j={j}, n={n}")
    return sum(math.comb(k, j) for k in range(j, n + 1))


# ---------------------------------------------------------------------------
# Shape predicates
# ---------------------------------------------------------------------------


def shape_check(a: RealSeq, rel_tol: float = 0.0) -> ShapeReport:
    """Monotonicity and concavity/convexity of the prefix.

    With ``rel_tol = 0`` every comparison is exact. A positive ``rel_tol``
    (float data) allows each inequality to fail by ``rel_tol`` times the
    largest magnitude among the values it compares. Strict increase is
    never relaxed.
    """

    v = a.as_float() if rel_tol > 0 else a.values
    d1 = v[1:] - v[:-1]
    if rel_tol > 0:
        slack1 = rel_tol * np.maximum(np.abs(v[1:]), np.abs(v[:-1]))
    else:
        slack1 = 0
    nondecreasing = bool(np.all(d1 >= -slack1))
    strictly_increasing = bool(np.all(d1 > 0))

    if a.horizon < 2:
        return ShapeReport(nondecreasing, strictly_increasing, None, None)

    d2 = v[2:] - 2 * v[1:-1] + v[:-2]
    if rel_tol > 0:
        slack2 = rel_tol * np.maximum.reduce([np.abs(v[2:]), np.abs(v[1:-1]), np.abs(v[:-2])])
    else:
        slack2 = 0
    concave = bool(np.all(d2 <= slack2))
    convex = bool(np.all(d2 >= -slack2))
    return ShapeReport(nondecreasing, strictly_increasing, concave, convex)


# ---------------------------------------------------------------------------
# Unboundedness index
# ---------------------------------------------------------------------------


def dyadic_windows(horizon: int) -> Tuple[range, range]:
    """The two tail windows ``[N/4, N/2)`` and ``[N/2, N]``."""

    return range(horizon // 4, horizon // 2), range(horizon // 2, horizon + 1)


def h_index(
    a: RealSeq, m_max: int, certified: Optional[CertifiedBound] = None
) -> HIndexEstimate:
    """Estimate the smallest m with ``a(n) / n**m`` bounded above.

    Empirical mode compares the maxima of ``a(n) / n**m`` over the two
    dyadic tail windows; the first m whose maximum does not grow is
    returned. Exact mode returns the exponent of a caller-certified bound
    after checking the prefix does not contradict it.
    """

    if certified is not None:
        values = a.as_float()
        n = np.arange(1, a.horizon + 1, dtype=np.float64)
        bound = certified.constant * n ** certified.exponent
        violations = np.flatnonzero(values[1:] > bound)
        if violations.size:
            raise SequenceError(
                f"certified bound {certified.constant} * n^{certified.exponent} fails at n={int(violations[0]) + 1}"
            )
        return HIndexEstimate(certified.exponent, (), HIndexMode.EXACT, certified)

    if m_max < 1:
        raise SequenceError(f"m_max must be >= 1, got {m_max}")
    if a.horizon < settings.h_index_min_horizon:
        raise InsufficientHorizonError(settings.h_index_min_horizon, a.horizon, "h_index")

    values = a.as_float()
    front, tail = dyadic_windows(a.horizon)
    front_idx = np.arange(front.start, front.stop)
    tail_idx = np.arange(tail.start, tail.stop)

    evidence = []
    for m in range(m_max + 1):
        front_max = float(np.max(values[front_idx] / front_idx.astype(np.float64) ** m))
        tail_max = float(np.max(values[tail_idx] / tail_idx.astype(np.float64) ** m))
        evidence.append(WindowEvidence(m, front_max, tail_max))

    value = next((e.m for e in evidence if e.non_increasing), None)
    if value is None:
        logger.debug("h_index undetermined up to m_max=%d", m_max)
    return HIndexEstimate(value, tuple(evidence), HIndexMode.EMPIRICAL)


# ---------------------------------------------------------------------------
# Interpolation and finite bound checks
# ---------------------------------------------------------------------------


def phi_interpolant(a: RealSeq, x: Number) -> Number:
    """Piecewise-linear interpolant through ``(n, a(n))``."""

    if not 0 <= x <= a.horizon:
        raise SequenceError(f"x={x} outside [0, {a.horizon}]")
    if x == a.horizon:
        return a[a.horizon]
    n = int(math.floor(x))
    return a[n] * (n + 1 - x) + a[n + 1] * (x - n)


def _binomials(N: int, p: int, exact: bool) -> NDArray:
    coeffs = [math.comb(n + p, p) for n in range(N + 1)]
    return np.array(coeffs, dtype=object) if exact else np.asarray(coeffs, dtype=np.float64)


def _first_violation(mask: NDArray) -> Optional[int]:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def sigma_power_sandwich(a: RealSeq, p: int) -> SandwichCheck:
    """Check both Σ^p bounds for a nondecreasing concave ``a`` with a(0) >= 0.

    ``C(n+p,p) a(n) / (p+1) + p C(n+p,p) a(0) / (p+1) <= Σ^p a(n) <= C(n+p,p) a(n)``
    """

    if p < 0:
        raise SequenceError(f"p must be >= 0, got {p}")
    s = iterate(SequenceOp.SIGMA, a, p).values
    binom = _binomials(a.horizon, p, a.exact)
    v = a.values
    if a.exact:
        lower = binom * v * Fraction(1, p + 1) + binom * v[0] * Fraction(p, p + 1)
        upper = binom * v
        slack_lo = slack_hi = 0
    else:
        lower = binom * v / (p + 1) + binom * v[0] * p / (p + 1)
        upper = binom * v
        slack_lo = 1e-12 * np.maximum(np.abs(lower), np.abs(s))
        slack_hi = 1e-12 * np.maximum(np.abs(upper), np.abs(s))
    return SandwichCheck(
        p=p,
        lower_violation=_first_violation(lower - s > slack_lo),
        upper_violation=_first_violation(s - upper > slack_hi),
    )


def difference_l1_bound(a: RealSeq, q: int) -> DifferenceBound:
    """With ``M = sum |Δ^q a|`` over the prefix, check ``a(n) <= M C(n+q-1, n)``."""

    if q < 1:
        raise SequenceError(f"q must be >= 1, got {q}")
    diffs = iterate(SequenceOp.DELTA, a, q).values
    total = sum(abs(d) for d in diffs) if a.exact else float(np.sum(np.abs(diffs)))
    binom = _binomials(a.horizon, q - 1, a.exact)
    bound = binom * total
    slack = 0 if a.exact else 1e-12 * np.maximum(np.abs(bound), 1.0)
    return DifferenceBound(q, total, _first_violation(a.values - bound > slack))


def l1_tail_fraction(a: RealSeq, start: float = 0.75) -> float:
    """Share of ``sum |a(n)|`` contributed by indices above ``start * horizon``."""

    magnitudes = np.abs(a.as_float())
    total = float(np.sum(magnitudes))
    if total == 0.0:
        return 0.0
    cut = int(start * a.horizon)
    return float(np.sum(magnitudes[cut + 1 :])) / total


def difference_ratio(s: RealSeq, k: int) -> RealSeq:
    """``Δ^k s(n) / s(n)`` on the float path (``s`` must be nonzero)."""

    values = s.as_float()
    if np.any(values == 0.0):
        raise SequenceError("difference_ratio needs s(n) != 0")
    return RealSeq(iterate(SequenceOp.DELTA, s, k).as_float() / values)


def shift_ratio(s: RealSeq, k: int) -> RealSeq:
    """``s(n+k) / s(n)`` for ``n = 0..horizon-k``."""

    if k < 0 or k > s.horizon:
        raise SequenceError(f"shift {k} not in [0, {s.horizon}]")
    values = s.as_float()
    if np.any(values[: s.horizon - k + 1] == 0.0):
        raise SequenceError("shift_ratio needs s(n) != 0")
    return RealSeq(values[k:] / values[: s.horizon - k + 1])


__all__ = [
    "CertifiedBound",
    "CesaroSeq",
    "DifferenceBound",
    "HIndexEstimate",
    "RealSeq",
    "SandwichCheck",
    "ShapeReport",
    "UNDETERMINED",
    "WindowEvidence",
    "cesaro_numbers",
    "concavity_order",
    "delta",
    "difference_l1_bound",
    "difference_ratio",
    "dyadic_windows",
    "h_index",
    "hockey_stick",
    "iterate",
    "l1_tail_fraction",
    "phi_interpolant",
    "shape_check",
    "shift_ratio",
    "sigma",
    "sigma_power_sandwich",
]
