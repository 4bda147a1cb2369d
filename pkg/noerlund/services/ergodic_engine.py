"""Nörlund means of operator powers and their convergence diagnostics.

``M_n = (1/s(n)) sum_{k<=n} Δs(n-k) T^k`` is accumulated through the
partial sums ``S_n = T S_(n-1) + Δs(n) I``, one multiplication per step.
Powers ``T^n = T^(n-1) T`` are kept alongside for the norm ratios and for
the drift check against ``numpy.linalg.matrix_power`` at the last index.

Convergence is judged on the finite curve ``||M_n - P||`` where ``P`` always
comes from :func:`classify_one`. The verdict is one of converged, diverged
or undetermined, with every threshold recorded in the report.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from noerlund.config import Settings, settings as default_settings
from noerlund.errors import InsufficientHorizonError, OperatorError, WeightError
from noerlund.models import ConvergenceStatus, SequenceOp, SpectralVerdict
from noerlund.services.exact_operator import ExactOperator
from noerlund.services.operator_core import (
    Operator,
    SpectralClassification,
    classify_one,
    matrix_norm,
    operator_powers,
)
from noerlund.services.seq_calculus import RealSeq, cesaro_numbers, dyadic_windows, iterate

logger = logging.getLogger(__name__)

AnyOperator = Union[Operator, ExactOperator]


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    distances: RealSeq
    target: Optional[Operator]
    status: ConvergenceStatus
    final_distance: float
    norm_ratio_tail: float
    norm_ratios: RealSeq
    classification: SpectralClassification
    kernel_witness: float
    limit_estimate: Optional[Operator]
    limit_error: Optional[float]
    power_drift: float
    thresholds: Dict[str, float] = field(default_factory=dict)

    @property
    def horizon(self) -> int:
        return self.distances.horizon

    @property
    def verdict(self) -> SpectralVerdict:
        return self.classification.verdict


# ---------------------------------------------------------------------------
# Means
# ---------------------------------------------------------------------------


def _weights(s: RealSeq, N: int) -> Tuple[NDArray, NDArray]:
    """Validated ``(Δs(0..N), s(0..N))`` as float arrays."""

    if N < 0:
        raise WeightError(0, f"N must be >= 0, got {N}")
    if N > s.horizon:
        raise InsufficientHorizonError(N, s.horizon, "noerlund_means")
    window = s.truncate(N)
    raw = window.values
    for n, value in enumerate(raw):
        if not value > 0:
            raise WeightError(n, f"s({n}) = {value} is not positive")
        if n and value < raw[n - 1]:
            raise WeightError(n, f"s decreases at n={n}")
    return iterate(SequenceOp.DELTA, window, 1).as_float(), window.as_float()


def _partial_sums(T: Operator, increments: NDArray) -> NDArray:
    d = T.dim
    identity = np.eye(d, dtype=np.complex128)
    sums = np.empty((increments.size, d, d), dtype=np.complex128)
    sums[0] = increments[0] * identity
    for n in range(1, increments.size):
        sums[n] = T.entries @ sums[n - 1] + increments[n] * identity
    return sums


def _mean_stack(T: Operator, s: RealSeq, N: int) -> Tuple[NDArray, NDArray]:
    increments, values = _weights(s, N)
    return _partial_sums(T, increments) / values[:, None, None], values


def noerlund_means(T: Operator, s: RealSeq, N: int) -> List[Operator]:
    """``M_0, ..., M_N`` for the weights ``s``."""

    means, _ = _mean_stack(T, s, N)
    return [T.with_entries(m) for m in means]


def cesaro_means(T: Operator, alpha: float, N: int) -> List[Operator]:
    """Nörlund means for ``s = A_alpha``."""

    if not alpha > 0:
        raise WeightError(0, f"alpha must be > 0, got {alpha}")
    return noerlund_means(T, cesaro_numbers(alpha, N).values, N)


# ---------------------------------------------------------------------------
# Algebraic identity
# ---------------------------------------------------------------------------


def _algebra(T: AnyOperator, a: RealSeq):
    if isinstance(T, ExactOperator) and a.exact:
        return T, ExactOperator.identity(T.dim), ExactOperator.zeros(T.dim), Fraction
    dense = T.to_operator() if isinstance(T, ExactOperator) else T
    d = dense.dim
    return dense.entries, np.eye(d, dtype=np.complex128), np.zeros((d, d), dtype=np.complex128), float


def lemma64_sides(T: AnyOperator, a: RealSeq, m: int, n: int):
    """Both sides of the finite convolution identity, assembled independently.

    Left: ``(sum_{k<=n} a(n-k) T^k) (I - T)^m``.
    Right: ``(-1)^m sum_{k<=n+m} Δ^m a(n+m-k) T^k
    + sum_{j<m} (-1)^j Δ^j a(n+j+1) (I - T)^(m-1-j)``.
    """

    if m < 1:
        raise OperatorError(f"m must be >= 1, got {m}")
    if n < 0:
        raise OperatorError(f"n must be >= 0, got {n}")
    if a.horizon < n + m + 1:
        raise InsufficientHorizonError(n + m + 1, a.horizon, "lemma64_check")

    X, identity, zero, scalar = _algebra(T, a)
    powers = [identity]
    for _ in range(n + m):
        powers.append(powers[-1] @ X)
    step = identity - X
    gaps = [identity]
    for _ in range(m):
        gaps.append(gaps[-1] @ step)
    differences = [iterate(SequenceOp.DELTA, a, j) for j in range(m + 1)]

    weighted = zero
    for k in range(n + 1):
        weighted = weighted + scalar(a[n - k]) * powers[k]
    lhs = weighted @ gaps[m]

    rhs = zero
    for k in range(n + m + 1):
        rhs = rhs + scalar(differences[m][n + m - k]) * powers[k]
    rhs = scalar((-1) ** m) * rhs
    for j in range(m):
        rhs = rhs + scalar((-1) ** j * differences[j][n + j + 1]) * gaps[m - 1 - j]
    return lhs, rhs


def lemma64_check(T: AnyOperator, a: RealSeq, m: int, n: int) -> Union[Fraction, float]:
    """Size of ``LHS - RHS``; exactly 0 on the rational path."""

    lhs, rhs = lemma64_sides(T, a, m, n)
    if isinstance(lhs, ExactOperator):
        return (lhs - rhs).magnitude_bound()
    kind = T.norm_kind if isinstance(T, Operator) else default_settings.default_norm
    return matrix_norm(lhs - rhs, kind)


# ---------------------------------------------------------------------------
# Convergence diagnostics
# ---------------------------------------------------------------------------


def _classify_status(distances: NDArray, projection_norm: float, config: Settings) -> ConvergenceStatus:
    N = distances.size - 1
    front, tail = dyadic_windows(N)
    tail_values = distances[tail.start :]
    noise = config.convergence_noise_floor * (1.0 + projection_norm)
    if float(np.max(distances)) <= noise:
        return ConvergenceStatus.CONVERGED
    # M_0 = I = P gives a zero minimum; roundoff above it is not growth.
    baseline = max(float(np.min(distances)), noise)
    if float(np.min(tail_values)) > config.divergence_factor * baseline:
        return ConvergenceStatus.DIVERGED

    atol = config.convergence_atol * (1.0 + projection_norm)
    last_quarter = distances[(3 * N) // 4 :]
    front_max = float(np.max(distances[front.start : front.stop]))
    decaying = float(np.max(tail_values)) <= config.convergence_decay_ratio * front_max
    settled = front_max <= noise
    if float(np.max(last_quarter)) <= atol and (decaying or settled):
        return ConvergenceStatus.CONVERGED
    return ConvergenceStatus.UNDETERMINED


def _extrapolate(means: NDArray, increments: NDArray, values: NDArray) -> Optional[NDArray]:
    """Remove the leading ``Δs(n)/s(n)`` term from ``M_N`` using ``M_(N/2)``."""

    N = means.shape[0] - 1
    half = N // 2
    r_half = increments[half] / values[half]
    r_full = increments[N] / values[N]
    if r_half == r_full:
        return None
    return (r_half * means[N] - r_full * means[half]) / (r_half - r_full)


def power_drift(T: Operator, accumulated: NDArray, N: int) -> float:
    """Relative gap between ``T^N`` built step by step and by repeated squaring."""

    reference = np.linalg.matrix_power(T.entries, N)
    scale = max(matrix_norm(reference, T.norm_kind), matrix_norm(accumulated, T.norm_kind))
    if scale == 0.0:
        return 0.0
    return matrix_norm(accumulated - reference, T.norm_kind) / scale


def convergence_report(
    T: Operator, s: RealSeq, N: int, config: Optional[Settings] = None
) -> ConvergenceReport:
    """Distances of the Nörlund means to the spectral projection at 1."""

    config = config or default_settings
    if N < 8:
        raise InsufficientHorizonError(8, N, "convergence_report")
    classification = classify_one(T, config.rank_tol)
    target = classification.projection
    target_entries = target.entries if target is not None else np.zeros_like(T.entries)

    means, values = _mean_stack(T, s, N)
    increments = iterate(SequenceOp.DELTA, s.truncate(N), 1).as_float()
    distances = np.array([matrix_norm(m - target_entries, T.norm_kind) for m in means])

    powers = operator_powers(T, N)
    with np.errstate(over="ignore", invalid="ignore"):
        ratios = np.array([matrix_norm(p, T.norm_kind) for p in powers]) / values
    drift = power_drift(T, powers[N], N)
    if drift > config.power_drift_rtol:
        logger.warning("accumulated T^%d drifts from repeated squaring by %.3e", N, drift)

    projection_norm = target.norm() if target is not None else 0.0
    status = _classify_status(distances, projection_norm, config)
    if status is ConvergenceStatus.UNDETERMINED:
        logger.warning("convergence undetermined at N=%d (final distance %.3e)", N, distances[-1])

    identity = np.eye(T.dim, dtype=np.complex128)
    limit_estimate = limit_error = None
    if target is not None:
        estimate = _extrapolate(means, increments, values)
        if estimate is not None and np.all(np.isfinite(estimate)):
            limit_estimate = T.with_entries(estimate)
            limit_error = limit_estimate.distance(target)

    tail_start = N // 2
    return ConvergenceReport(
        distances=RealSeq.from_values(distances, exact=False, tag="distances"),
        target=target,
        status=status,
        final_distance=float(distances[-1]),
        norm_ratio_tail=float(np.max(ratios[tail_start:])),
        norm_ratios=RealSeq.from_values(ratios, exact=False, tag="norm-ratios"),
        classification=classification,
        kernel_witness=matrix_norm((identity - T.entries) @ means[N], T.norm_kind),
        limit_estimate=limit_estimate,
        limit_error=limit_error,
        power_drift=drift,
        thresholds={
            "convergence_atol": config.convergence_atol * (1.0 + projection_norm),
            "convergence_decay_ratio": config.convergence_decay_ratio,
            "convergence_noise_floor": config.convergence_noise_floor,
            "divergence_factor": config.divergence_factor,
            "power_drift_rtol": config.power_drift_rtol,
            "rank_tol": config.rank_tol,
        },
    )


def distances_csv(report: ConvergenceReport) -> str:
    """CSV rows ``n,distance,norm_ratio`` for offline plotting."""

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "distance", "norm_ratio"])
    for n, (distance, ratio) in enumerate(zip(report.distances.to_list(), report.norm_ratios.to_list())):
        writer.writerow([n, repr(distance), repr(ratio)])
    return buffer.getvalue()


__all__ = [
    "ConvergenceReport",
    "cesaro_means",
    "convergence_report",
    "distances_csv",
    "lemma64_check",
    "lemma64_sides",
    "noerlund_means",
    "power_drift",
]
