"""Majorants with a concave p-th difference, and the growth-property verifier.

Given an unbounded sequence ``b`` with polynomial growth index ``p + 1``,
:func:`build_majorant` produces ``s >= b`` such that ``Δ^p s`` is concave:

* ``b(0)`` is clamped to 0 when negative
* ``a(n) = (p+1) b(n) / C(n+p, p) - p b(0)``
* ``c`` = least concave majorant of ``a`` (finite prefix, no tail slope)
* ``s = Σ^p c``

:func:`verify_thm47` checks the six growth/regularity properties such an
``s`` enjoys (positivity, strict increase, growth between ``n^p`` and
``n^(p+1)``, ratio ``s(n+1)/s(n) -> 1`` and summability of ``|Δ^(p+2) s|``)
on the prefix, storing each finite criterion and threshold next to its
verdict. :func:`admissible_weight` turns a power-norm sequence into weights
``s`` with ``||T^n|| / s(n) -> 0``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from noerlund.config import Settings, settings as default_settings
from noerlund.errors import InsufficientHorizonError, MajorantError
from noerlund.models import SequenceOp
from noerlund.services.concave_majorant import MajorantResult, lcm_recursive
from noerlund.services.seq_calculus import (
    HIndexEstimate,
    RealSeq,
    SandwichCheck,
    dyadic_windows,
    h_index,
    iterate,
    l1_tail_fraction,
    shape_check,
    sigma_power_sandwich,
)

logger = logging.getLogger(__name__)

MIN_HORIZON = 16


@dataclass(frozen=True, eq=False)
class BuiltMajorant:
    p: int
    b: RealSeq
    a_transform: RealSeq
    c: RealSeq
    s: RealSeq
    ratio_window: float
    h_estimate: HIndexEstimate
    majorant: MajorantResult

    @property
    def h_index_agrees(self) -> bool:
        return self.h_estimate.value == self.p + 1

    @property
    def sandwich(self) -> SandwichCheck:
        return sigma_power_sandwich(self.c, self.p)


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    witness: float
    criterion: str
    threshold: Optional[float] = None


@dataclass(frozen=True)
class Thm47Report:
    p: int
    horizon: int
    items: Tuple[CriterionResult, ...]
    preconditions: Tuple[CriterionResult, ...]
    difference_checks: Tuple[CriterionResult, ...]

    def item(self, name: str) -> CriterionResult:
        for result in self.items + self.preconditions + self.difference_checks:
            if result.name == name:
                return result
        raise KeyError(name)

    @property
    def all_passed(self) -> bool:
        return all(result.passed for result in self.items)

    @property
    def preconditions_met(self) -> bool:
        return all(result.passed for result in self.preconditions)


@dataclass(frozen=True, eq=False)
class AdmissibleWeight:
    """Weights built from power norms: ``b(n) = (n+1)^(H+1)`` and its majorant."""

    h_estimate: HIndexEstimate
    built: BuiltMajorant

    @property
    def s(self) -> RealSeq:
        return self.built.s


def _a_transform(b: RealSeq, p: int) -> RealSeq:
    binom = [math.comb(n + p, p) for n in range(b.horizon + 1)]
    b0 = b[0]
    if b.exact:
        values = [Fraction(p + 1) * bn / k - p * b0 for bn, k in zip(b.values, binom)]
    else:
        values = ((p + 1) * b.as_float() / np.asarray(binom, dtype=np.float64) - p * b0).tolist()
    return b.with_values(values)


def build_majorant(b: RealSeq, p: int) -> BuiltMajorant:
    """Build ``s >= b`` with ``Δ^p s`` concave.

    Parameters
    ----------
    b:
        The sequence to majorize; rational input stays on the exact path.
    p:
        Target order, normally ``h_index(b) - 1``. A disagreement with the
        empirical index is logged, not raised.
    """

    if p < 0:
        raise MajorantError(f"p must be >= 0, got {p}")
    if b.horizon < MIN_HORIZON:
        raise InsufficientHorizonError(MIN_HORIZON, b.horizon, "build_majorant")

    values = b.to_list()
    if values[0] < 0:
        logger.info("b(0) = %s is negative; replacing it by 0", values[0])
        values[0] = 0
    b_tilde = b.with_values(values, tag=b.tag)

    a = _a_transform(b_tilde, p)
    majorant = lcm_recursive(a)
    c = majorant.c
    s = iterate(SequenceOp.SIGMA, c, p)

    start = b_tilde.horizon // 2
    s_tail = s.as_float()[start:]
    if np.any(s_tail <= 0):
        raise MajorantError("built s is not positive on the tail window; is b unbounded?")
    ratio_window = float(np.max(b_tilde.as_float()[start:] / s_tail))

    estimate = h_index(b_tilde, m_max=p + 2)
    if estimate.value != p + 1:
        logger.warning(
            "empirical growth index of b is %s but p + 1 = %d; continuing with p = %d",
            estimate.label,
            p + 1,
            p,
        )

    return BuiltMajorant(
        p=p,
        b=b_tilde,
        a_transform=a,
        c=c,
        s=s,
        ratio_window=ratio_window,
        h_estimate=estimate,
        majorant=majorant,
    )


def _window_minima(ratio: np.ndarray, horizon: int) -> Tuple[float, float, float]:
    cuts = (horizon // 8, horizon // 4, horizon // 2, horizon + 1)
    return tuple(float(np.min(ratio[lo:hi])) for lo, hi in zip(cuts, cuts[1:]))


def _summability(s: RealSeq, p: int, concave_difference: bool) -> float:
    """Share of ``sum |Δ^(p+2) s|`` coming from the last quarter of the prefix."""

    if not concave_difference:
        return l1_tail_fraction(iterate(SequenceOp.DELTA, s, p + 2))

    # Δ^2 c <= 0 from n = 2 on, so the sums telescope through Δc.
    first = iterate(SequenceOp.DELTA, s, p + 1).as_float()
    horizon = s.horizon
    cut = int(0.75 * horizon)
    total = abs(first[0]) + abs(first[1] - first[0]) + (first[1] - first[horizon])
    tail = first[cut] - first[horizon]
    return float(tail / total) if total else 0.0


def verify_thm47(s: RealSeq, p: int, config: Optional[Settings] = None) -> Thm47Report:
    """Evaluate the six growth properties of ``s`` on its prefix.

    Precondition failures are recorded as items, never raised.
    """

    config = config or default_settings
    if p < 0:
        raise MajorantError(f"p must be >= 0, got {p}")
    if s.horizon < MIN_HORIZON:
        raise InsufficientHorizonError(MIN_HORIZON, s.horizon, "verify_thm47")

    horizon = s.horizon
    values = s.as_float()
    n = np.arange(horizon + 1, dtype=np.float64)
    n[0] = 1.0

    base = iterate(SequenceOp.DELTA, s, p)
    base_shape = shape_check(base)
    half = horizon // 2
    base_values = base.as_float()
    preconditions = (
        CriterionResult(
            "concave_difference",
            bool(base_shape.concave),
            float(p),
            f"Δ^{p} s passes the exact concavity check",
        ),
        CriterionResult(
            "unbounded_difference",
            bool(np.max(base_values[half:]) > np.max(base_values[:half])),
            float(np.max(base_values[half:]) - np.max(base_values[:half])),
            f"max of Δ^{p} s over [N/2, N] exceeds its max over [0, N/2)",
        ),
        CriterionResult(
            "nonnegative_start",
            bool(s[0] >= 0),
            float(s[0]),
            "s(0) >= 0",
        ),
    )

    raw = s.values
    increments = raw[1:] - raw[:-1]
    growth = _window_minima(values / n ** p, horizon)
    front, tail = dyadic_windows(horizon)
    capped = values / n ** (p + 1)
    front_max = float(np.max(capped[front.start : front.stop]))
    tail_max = float(np.max(capped[tail.start : tail.stop]))
    step_ratio = abs(values[horizon] / values[horizon - 1] - 1.0)
    fraction = _summability(s, p, bool(base_shape.concave))

    items = (
        CriterionResult(
            "positive",
            bool(np.all(raw[1:] > 0)),
            float(np.min(values[1:])),
            "s(n) > 0 for 1 <= n <= N (exact comparison)",
        ),
        CriterionResult(
            "strictly_increasing",
            bool(np.all(increments > 0)),
            float(np.min(np.asarray(increments, dtype=np.float64))),
            "s(n+1) - s(n) > 0 for 0 <= n < N (exact comparison)",
        ),
        CriterionResult(
            "outgrows_power_p",
            growth[0] < growth[1] < growth[2],
            growth[2] / growth[0] if growth[0] else float("inf"),
            f"min of s(n)/n^{p} strictly increases over [N/8,N/4), [N/4,N/2), [N/2,N]",
        ),
        CriterionResult(
            "bounded_by_power_p_plus_1",
            tail_max <= front_max,
            tail_max / front_max if front_max else float("inf"),
            f"max of s(n)/n^{p + 1} over [N/2,N] <= its max over [N/4,N/2)",
            1.0,
        ),
        CriterionResult(
            "ratio_tends_to_one",
            step_ratio < config.thm47_ratio_tol,
            float(step_ratio),
            "|s(N)/s(N-1) - 1| below threshold",
            config.thm47_ratio_tol,
        ),
        CriterionResult(
            "summable_difference",
            fraction < config.thm47_l1_tail_fraction,
            fraction,
            f"last-quarter share of sum |Δ^{p + 2} s| below threshold",
            config.thm47_l1_tail_fraction,
        ),
    )

    difference_checks = []
    for j in range(p + 1):
        shape = shape_check(iterate(SequenceOp.DELTA, s, j))
        difference_checks.append(
            CriterionResult(
                f"difference_{j}_strictly_increasing",
                shape.strictly_increasing,
                float(j),
                f"Δ^{j} s strictly increasing",
            )
        )
        if j < p:
            difference_checks.append(
                CriterionResult(
                    f"difference_{j}_convex",
                    bool(shape.convex),
                    float(j),
                    f"Δ^{j} s convex",
                )
            )

    return Thm47Report(
        p=p,
        horizon=horizon,
        items=items,
        preconditions=preconditions,
        difference_checks=tuple(difference_checks),
    )


def admissible_weight(norms: RealSeq, m_max: int = 8) -> AdmissibleWeight:
    """Weights ``s`` with ``norms(n) / s(n) -> 0`` for polynomially bounded norms.

    The growth index ``H`` of ``norms`` is estimated empirically;
    ``b(n) = (n+1)^(H+1)`` is then majorized with ``p = H``.
    """

    estimate = h_index(norms, m_max=m_max)
    if not estimate.is_finite:
        raise MajorantError(f"power norms are not polynomially bounded up to m_max={m_max}")
    H = estimate.value
    b = RealSeq.from_values(
        (np.arange(1, norms.horizon + 2, dtype=np.float64) ** (H + 1)).tolist(),
        exact=False,
        tag=f"power:{H + 1}",
    )
    return AdmissibleWeight(h_estimate=estimate, built=build_majorant(b, H))


__all__ = [
    "AdmissibleWeight",
    "BuiltMajorant",
    "CriterionResult",
    "Thm47Report",
    "admissible_weight",
    "build_majorant",
    "verify_thm47",
]
