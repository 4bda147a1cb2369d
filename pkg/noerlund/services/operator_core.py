"""Finite-dimensional complex operators and the spectral point 1.

Operators are dense complex square matrices carrying the induced norm used
to measure them (``induced_sup`` by default). The module covers power
norms, resolvents and Abel means, and the classification of the point 1:

* ``resolvent_point`` when ``I - T`` is invertible (projection 0);
* ``simple_pole`` when ``rank(I - T) = rank((I - T)^2)`` with a nontrivial
  kernel; the projection onto ``ker(I - T)`` along ``ran(I - T)`` is
  assembled from SVD bases;
* ``non_simple`` otherwise.

Numerical ranks use a cut relative to the largest singular value; a
singular value too close to the cut raises instead of guessing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from itertools import accumulate
from typing import Optional, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from noerlund.config import settings
from noerlund.errors import IndeterminateRankError, OperatorError, SpectrumProximityError
from noerlund.models import NormKind, SpectralVerdict
from noerlund.services.seq_calculus import RealSeq

logger = logging.getLogger(__name__)

_NORM_ORDERS = {
    NormKind.INDUCED_SUP: np.inf,
    NormKind.INDUCED_L1: 1,
    NormKind.SPECTRAL_L2: 2,
}


def matrix_norm(entries: NDArray, kind: NormKind = NormKind.INDUCED_SUP) -> float:
    """Induced norm of a square matrix; infinite when entries are not finite."""

    if not np.all(np.isfinite(entries)):
        return math.inf
    return float(np.linalg.norm(entries, _NORM_ORDERS[NormKind(kind)]))


@dataclass(frozen=True, eq=False)
class Operator:
    entries: NDArray[np.complex128]
    norm_kind: NormKind = NormKind.INDUCED_SUP

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.complex128)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1] or entries.shape[0] < 1:
            raise OperatorError(f"operator must be a non-empty square matrix, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise OperatorError("operator entries must be finite")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "norm_kind", NormKind(self.norm_kind))

    @classmethod
    def identity(cls, d: int, norm_kind: NormKind = NormKind.INDUCED_SUP) -> "Operator":
        return cls(np.eye(d, dtype=np.complex128), norm_kind)

    @classmethod
    def zeros(cls, d: int, norm_kind: NormKind = NormKind.INDUCED_SUP) -> "Operator":
        return cls(np.zeros((d, d), dtype=np.complex128), norm_kind)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def norm(self) -> float:
        return matrix_norm(self.entries, self.norm_kind)

    def with_entries(self, entries: ArrayLike) -> "Operator":
        return Operator(entries, self.norm_kind)

    def distance(self, other: "Operator") -> float:
        return matrix_norm(self.entries - other.entries, self.norm_kind)

    def __matmul__(self, other: "Operator") -> "Operator":
        return self.with_entries(self.entries @ other.entries)


@dataclass(frozen=True, eq=False)
class SpectralClassification:
    verdict: SpectralVerdict
    projection: Optional[Operator]
    kernel_dim: int
    range_codim: int
    rank: int
    tolerance_used: float
    singular_values: Tuple[float, ...] = ()


@dataclass(frozen=True)
class RootBound:
    root: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.root <= self.bound * (1.0 + 1e-12)


# ---------------------------------------------------------------------------
# Powers and norms
# ---------------------------------------------------------------------------


def operator_powers(T: Operator, N: int) -> NDArray[np.complex128]:
    """Stack ``T^0, ..., T^N`` built by ``T^n = T^(n-1) @ T``.

    Entries that overflow are left as ``inf``/``nan``.
    """

    if N < 0:
        raise OperatorError(f"N must be >= 0, got {N}")
    powers = np.empty((N + 1, T.dim, T.dim), dtype=np.complex128)
    powers[0] = np.eye(T.dim)
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, N + 1):
            powers[n] = powers[n - 1] @ T.entries
    return powers


def power_norms(T: Operator, N: int) -> RealSeq:
    """``(||T^n||)_{n=0..N}`` in ``T.norm_kind``; overflow saturates at ``inf``."""

    norms = [matrix_norm(p, T.norm_kind) for p in operator_powers(T, N)]
    if math.inf in norms:
        first = norms.index(math.inf)
        norms[first:] = [math.inf] * (N + 1 - first)
        logger.warning("power norms overflow from n=%d on", first)
    return RealSeq.from_values(norms, exact=False, tag="power-norms")


def running_max(norms: RealSeq) -> RealSeq:
    """Prefix maxima ``max{norms(k) : k <= n}``."""

    return norms.with_values(list(accumulate(norms.to_list(), max)))


def spectral_radius_estimate(T: Operator, squarings: Optional[int] = None) -> float:
    """``lim ||T^n||^(1/n)`` evaluated at ``n = 2**squarings`` by normalized squaring."""

    squarings = settings.spectral_radius_squarings if squarings is None else squarings
    P = np.array(T.entries)
    log_scale = 0.0
    for _ in range(squarings):
        size = matrix_norm(P, T.norm_kind)
        if size == 0.0:
            return 0.0
        P = P / size
        log_scale = 2.0 * (log_scale + math.log(size))
        P = P @ P
    size = matrix_norm(P, T.norm_kind)
    if size == 0.0:
        return 0.0
    return math.exp((log_scale + math.log(size)) / 2.0 ** squarings)


def power_root_bound(norms: RealSeq, alpha: float) -> RootBound:
    """Compare ``||T^N||^(1/N)`` with ``(M N^alpha)^(1/N)``, ``M = max ||T^n|| / n^alpha``."""

    N = norms.horizon
    if N < 1:
        raise OperatorError("power_root_bound needs at least ||T^1||")
    values = norms.as_float()
    n = np.arange(1, N + 1, dtype=np.float64)
    M = float(np.max(values[1:] / n ** alpha))
    return RootBound(root=float(values[N] ** (1.0 / N)), bound=float((M * N ** alpha) ** (1.0 / N)))


def shift_norms_closed_form(N: int) -> RealSeq:
    """Norms ``exp(sum_{j<=k} j^(-1/2))`` of the powers of a weighted shift."""

    if N < 0:
        raise OperatorError(f"N must be >= 0, got {N}")
    j = np.arange(1, N + 1, dtype=np.float64)
    exponents = np.concatenate(([0.0], np.cumsum(1.0 / np.sqrt(j))))
    frozen = tuple(np.exp(exponents).tolist())
    last_exponent = float(exponents[-1])

    def generate(k: int) -> float:
        if k < len(frozen):
            return frozen[k]
        exponent = last_exponent
        for i in range(len(frozen), k + 1):
            exponent += 1.0 / math.sqrt(i)
        return float(np.exp(exponent))

    return RealSeq(list(frozen), generator=generate, tag="weighted-shift")


# ---------------------------------------------------------------------------
# Resolvent and Abel means
# ---------------------------------------------------------------------------


def resolvent(T: Operator, lam: complex) -> Operator:
    """``(lam I - T)^(-1)``, refused when ``lam`` is numerically in the spectrum."""

    identity = np.eye(T.dim, dtype=np.complex128)
    shifted = lam * identity - T.entries
    with np.errstate(divide="ignore", invalid="ignore"):
        condition = float(np.linalg.cond(shifted))
    if not math.isfinite(condition) or condition > settings.resolvent_cond_cap:
        raise SpectrumProximityError(condition)

    inverse = np.linalg.solve(shifted, identity)
    residual = matrix_norm(shifted @ inverse - identity, T.norm_kind)
    if residual > settings.resolvent_residual_rtol * matrix_norm(inverse, T.norm_kind):
        raise SpectrumProximityError(condition, f"resolvent residual {residual:.3e} too large")
    return T.with_entries(inverse)


def abel_mean(T: Operator, lam: float) -> Operator:
    """``(lam - 1) (lam I - T)^(-1)`` for real ``lam > 1``."""

    if not lam > 1:
        raise OperatorError(f"abel_mean needs lam > 1, got {lam}")
    radius = spectral_radius_estimate(T)
    if radius > 1.0 + settings.spectral_radius_slack:
        raise OperatorError(f"spectral radius estimate {radius:.6f} exceeds 1")
    R = resolvent(T, lam)
    return R.with_entries((lam - 1.0) * R.entries)


# ---------------------------------------------------------------------------
# Classification of the point 1
# ---------------------------------------------------------------------------


def _numerical_rank(M: NDArray, tol: float, floor: float = 0.0) -> Tuple[int, NDArray]:
    """Rank with the cut at ``tol * max(largest singular value, floor)``."""

    singular = np.linalg.svd(M, compute_uv=False)
    scale = max(float(singular[0]) if singular.size else 0.0, floor)
    if scale == 0.0:
        return 0, singular
    cut = tol * scale
    gap = settings.rank_gap_factor
    ambiguous = singular[(singular > cut / gap) & (singular < cut * gap)]
    if ambiguous.size:
        raise IndeterminateRankError(ambiguous, cut)
    return int(np.count_nonzero(singular > cut)), singular


def _spectral_projection(K: NDArray, rank: int) -> NDArray:
    """Idempotent with range ``ker K`` and kernel ``ran K``."""

    d = K.shape[0]
    if rank == 0:
        return np.eye(d, dtype=np.complex128)
    U, _, Vh = np.linalg.svd(K)
    range_basis = U[:, :rank]
    kernel_basis = Vh[rank:].conj().T
    basis = np.hstack([kernel_basis, range_basis])
    coordinates = np.linalg.solve(basis, np.eye(d, dtype=np.complex128))
    return kernel_basis @ coordinates[: d - rank, :]


def classify_one(T: Operator, tol: Optional[float] = None) -> SpectralClassification:
    """Classify the point 1 for ``T`` by rank stabilization of ``I - T``."""

    tol = settings.rank_tol if tol is None else tol
    if tol <= 0:
        raise OperatorError(f"rank tolerance must be > 0, got {tol}")

    d = T.dim
    K = np.eye(d, dtype=np.complex128) - T.entries
    # I - T is measured against T itself, so roundoff in T ~ I is not rank.
    floor = max(1.0, matrix_norm(T.entries, NormKind.SPECTRAL_L2))
    rank, singular = _numerical_rank(K, tol, floor)
    kernel_dim = d - rank
    values = tuple(float(v) for v in singular)

    if kernel_dim == 0:
        return SpectralClassification(
            SpectralVerdict.RESOLVENT_POINT, Operator.zeros(d, T.norm_kind), 0, 0, rank, tol, values
        )

    rank_squared, _ = _numerical_rank(K @ K, tol, floor * floor)
    if rank_squared != rank:
        logger.debug("rank(I-T)=%d but rank((I-T)^2)=%d", rank, rank_squared)
        return SpectralClassification(
            SpectralVerdict.NON_SIMPLE, None, kernel_dim, kernel_dim, rank, tol, values
        )

    projection = T.with_entries(_spectral_projection(K, rank))
    return SpectralClassification(
        SpectralVerdict.SIMPLE_POLE, projection, kernel_dim, kernel_dim, rank, tol, values
    )


__all__ = [
    "Operator",
    "RootBound",
    "SpectralClassification",
    "abel_mean",
    "classify_one",
    "matrix_norm",
    "operator_powers",
    "power_norms",
    "power_root_bound",
    "resolvent",
    "running_max",
    "shift_norms_closed_form",
    "spectral_radius_estimate",
]
