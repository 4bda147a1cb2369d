"""Worked examples re-checked on a finite horizon.

Two examples are reproduced:

* the Jordan-type matrix ``T = -[[1, 1], [0, 1]]`` on ``C^2`` with the sup
  norm, whose powers grow linearly (``||T^n|| = n + 1``) while the Nörlund
  means for a logarithmically growing ``s`` still converge to 0;
* the weighted shift with ``||T^k|| = exp(sum_{j<=k} j^(-1/2))``, which
  grows faster than any power of ``k`` while its ``k``-th roots tend to 1.

Each check yields an :class:`AssertionVerdict`; a failing check records
the first failing index where one exists. Identity checks run in exact
rational arithmetic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from noerlund.config import Settings, settings as default_settings
from noerlund.errors import InsufficientHorizonError
from noerlund.models import ConvergenceStatus, NormKind, SpectralVerdict
from noerlund.services.ergodic_engine import ConvergenceReport, convergence_report
from noerlund.services.exact_operator import ExactOperator, power_norms_exact
from noerlund.services.majorant_builder import verify_thm47
from noerlund.services.operator_core import shift_norms_closed_form
from noerlund.services.seq_calculus import RealSeq, h_index, shape_check, sigma

logger = logging.getLogger(__name__)

JORDAN_MIN_HORIZON = 8
SHIFT_MIN_HORIZON = 64
ROOT_CEILING = 1.05
MEAN_CEILING = 1e-2


@dataclass(frozen=True)
class AssertionVerdict:
    name: str
    passed: bool
    detail: str
    failing_index: Optional[int] = None
    witness: Optional[float] = None


@dataclass(frozen=True, eq=False)
class ReproductionResult:
    example: str
    horizon: int
    verdicts: Tuple[AssertionVerdict, ...]
    report: Optional[ConvergenceReport] = None
    norms: Optional[RealSeq] = None

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def failures(self) -> List[AssertionVerdict]:
        return [v for v in self.verdicts if not v.passed]


# ---------------------------------------------------------------------------
# Jordan-type example on C^2
# ---------------------------------------------------------------------------


def jordan_weight_increments(N: int, exact: bool = True) -> RealSeq:
    """``a(0) = 1``, ``a(1) = 5/2`` and ``a(n) = 1/(n-1) + 2/n + 1/(n+1)``."""

    if exact:
        values = [Fraction(1), Fraction(5, 2)] + [
            Fraction(1, n - 1) + Fraction(2, n) + Fraction(1, n + 1) for n in range(2, N + 1)
        ]
        return RealSeq.from_values(values[: N + 1], exact=True, tag="jordan-increments")
    n = np.arange(2, N + 1, dtype=np.float64)
    tail = 1.0 / (n - 1.0) + 2.0 / n + 1.0 / (n + 1.0)
    values = np.concatenate(([1.0, 2.5], tail))[: N + 1]
    return RealSeq.from_values(values, exact=False, tag="jordan-increments")


def jordan_operator() -> ExactOperator:
    return ExactOperator.from_rows([[-1, -1], [0, -1]])


def alternating_moment(a: RealSeq, n: int) -> Fraction:
    """``sum_{k<=n} (-1)^k k a(n-k)``."""

    return sum((Fraction((-1) ** k * k) * a[n - k] for k in range(n + 1)), Fraction(0))


def _check_alternating_identity(a: RealSeq, N: int) -> AssertionVerdict:
    for n in range(1, N + 1):
        value = alternating_moment(a, n)
        if value != Fraction(-1, n):
            return AssertionVerdict(
                "alternating_identity", False, f"sum equals {value}, expected -1/{n}", n, float(value)
            )
    return AssertionVerdict(
        "alternating_identity", True, f"sum_k (-1)^k k a(n-k) = -1/n exactly for 1 <= n <= {N}"
    )


def _check_linear_norms(norms: RealSeq) -> AssertionVerdict:
    for n, value in enumerate(norms.to_list()):
        if value != n + 1:
            return AssertionVerdict("linear_power_norms", False, f"||T^{n}|| = {value}", n, float(value))
    return AssertionVerdict(
        "linear_power_norms", True, f"||T^n|| = n + 1 exactly for n <= {norms.horizon}"
    )


def _check_means(report: ConvergenceReport) -> AssertionVerdict:
    converged = report.status is ConvergenceStatus.CONVERGED
    to_zero = report.verdict is SpectralVerdict.RESOLVENT_POINT
    small = report.final_distance <= MEAN_CEILING
    return AssertionVerdict(
        "means_converge_to_zero",
        converged and to_zero and small,
        f"status {report.status.value}, verdict {report.verdict.value}, "
        f"||M_N|| = {report.final_distance:.3e}",
        None if converged and small else report.horizon,
        report.final_distance,
    )


def _check_norm_ratio(report: ConvergenceReport) -> AssertionVerdict:
    """Measured ``||T^n||/s(n)`` from the power stack against the lower bound."""

    ratios = report.norm_ratios.as_float()
    N = report.horizon
    for n in range(3, N + 1):
        ratio = float(ratios[n])
        bound = (n + 1) / (7.5 + 4.0 * math.log(n - 1))
        if not ratio >= bound:
            return AssertionVerdict(
                "norm_ratio_lower_bound",
                False,
                f"measured ||T^n||/s(n) = {ratio:.6g} < {bound:.6g}",
                n,
                ratio,
            )
    return AssertionVerdict(
        "norm_ratio_lower_bound",
        True,
        f"measured ||T^n||/s(n) >= (n+1)/(15/2 + 4 log(n-1)) for 3 <= n <= {N}",
        None,
        float(ratios[N]),
    )


def _check_weight_regularity(s: RealSeq, config: Settings) -> AssertionVerdict:
    # Δ^2 s decays only like 1/n^2, so short horizons get their own threshold.
    concave = bool(shape_check(s).concave)
    summable = verify_thm47(s, 0, config).item("summable_difference")
    threshold = config.reproduction_l1_tail_fraction
    return AssertionVerdict(
        "weights_concave_summable",
        concave and summable.witness < threshold,
        f"s concave: {concave}; last-quarter share of sum |Δ^2 s| = {summable.witness:.3e} "
        f"(threshold {threshold:g})",
        None,
        summable.witness,
    )


def reproduce_jordan_example(
    N: int, convergence_horizon: Optional[int] = None, config: Optional[Settings] = None
) -> ReproductionResult:
    """Run the five checks of the Jordan-type example.

    The identity and the power norms are checked exactly up to ``N``; the
    convergence, ratio and regularity checks use float weights up to
    ``convergence_horizon`` (default ``N``).
    """

    config = config or default_settings
    if N < JORDAN_MIN_HORIZON:
        raise InsufficientHorizonError(JORDAN_MIN_HORIZON, N, "reproduce-6-10")
    horizon = convergence_horizon or N

    a_exact = jordan_weight_increments(N, exact=True)
    T = jordan_operator()
    norms = power_norms_exact(T, N, NormKind.INDUCED_SUP)

    s_float = sigma(jordan_weight_increments(horizon, exact=False))
    report = convergence_report(T.to_operator(NormKind.INDUCED_SUP), s_float, horizon, config)

    verdicts = (
        _check_alternating_identity(a_exact, N),
        _check_linear_norms(norms),
        _check_means(report),
        _check_norm_ratio(report),
        _check_weight_regularity(s_float, config),
    )
    for verdict in verdicts:
        logger.info("%s: %s", verdict.name, "pass" if verdict.passed else "FAIL")
    return ReproductionResult("6.10", N, verdicts, report=report, norms=norms)


# ---------------------------------------------------------------------------
# Weighted shift
# ---------------------------------------------------------------------------


def reproduce_shift_example(N: int, alphas: Sequence[float] = (1, 2, 4, 6)) -> ReproductionResult:
    """Super-polynomial growth of the weighted-shift norms."""

    if N < SHIFT_MIN_HORIZON:
        raise InsufficientHorizonError(SHIFT_MIN_HORIZON, N, "reproduce-6-3")
    if not alphas:
        raise ValueError("at least one growth exponent is required")

    norms = shift_norms_closed_form(N)
    values = norms.as_float()
    k = np.arange(N + 1, dtype=np.float64)
    lower = np.exp(2.0 * np.sqrt(k + 1.0) - 2.0)
    below = np.flatnonzero(values < lower * (1.0 - 1e-12))
    verdicts = [
        AssertionVerdict(
            "exponential_lower_bound",
            below.size == 0,
            f"||T^k|| >= exp(2 sqrt(k+1) - 2) for k <= {N}",
            int(below[0]) if below.size else None,
        )
    ]

    root = float(values[N] ** (1.0 / N))
    verdicts.append(
        AssertionVerdict(
            "root_tends_to_one",
            1.0 < root < ROOT_CEILING,
            f"||T^N||^(1/N) = {root:.6f}, expected in (1, {ROOT_CEILING})",
            None if 1.0 < root < ROOT_CEILING else N,
            root,
        )
    )

    m_max = int(math.ceil(max(alphas)))
    estimate = h_index(norms, m_max=m_max)
    verdicts.append(
        AssertionVerdict(
            "growth_index_undetermined",
            not estimate.is_finite,
            f"growth index up to m_max={m_max}: {estimate.label}",
        )
    )

    verdicts.append(
        AssertionVerdict(
            "first_norm_is_e",
            math.isclose(values[1], math.e, rel_tol=1e-15),
            f"||T^1|| = {values[1]!r}",
            None if math.isclose(values[1], math.e, rel_tol=1e-15) else 1,
            float(values[1]),
        )
    )

    half = N // 2
    stalled = [
        alpha for alpha in alphas if not values[N] / N ** alpha > values[half] / half ** alpha
    ]
    verdicts.append(
        AssertionVerdict(
            "outgrows_powers",
            not stalled,
            f"||T^k||/k^alpha still increasing between k={half} and k={N} for alpha in {list(alphas)}",
            N if stalled else None,
        )
    )
    return ReproductionResult("6.3", N, tuple(verdicts), norms=norms)


__all__ = [
    "AssertionVerdict",
    "ReproductionResult",
    "alternating_moment",
    "jordan_operator",
    "jordan_weight_increments",
    "reproduce_jordan_example",
    "reproduce_shift_example",
]
