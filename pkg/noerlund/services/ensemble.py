"""Stratified random operators and the verdict-agreement run.

Members are similar to a prescribed Jordan form, ``T = S J S^(-1)``, with
``S`` a random unitary times a diagonal scaling in ``[1, SCALE_MAX]`` so the
conditioning stays bounded. The strata are:

* ``resolvent``: every eigenvalue inside the disk of radius ``DISK_RADIUS``
* ``semisimple``: the eigenvalue 1 with multiplicity, rest in the disk
* ``jordan``: a Jordan block of size 2 or 3 at 1, rest in the disk

Every member is generated up front from one seeded generator, so results
do not depend on the number of workers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from noerlund.config import Settings, settings as default_settings
from noerlund.errors import NoerlundError
from noerlund.models import ConvergenceStatus, NormKind, SpectralVerdict, Stratum
from noerlund.services.ergodic_engine import convergence_report
from noerlund.services.majorant_builder import admissible_weight
from noerlund.services.operator_core import Operator, abel_mean, power_norms
from noerlund.services.seq_calculus import RealSeq, cesaro_numbers

logger = logging.getLogger(__name__)

DISK_RADIUS = 0.5
SCALE_MAX = 1.25
ABEL_STEP = 1e-4
BUILT_SPEC = "built"
CESARO_SPEC_PREFIX = "A:"


@dataclass(frozen=True, eq=False)
class EnsembleMember:
    index: int
    stratum: Stratum
    operator: Operator

    @property
    def dim(self) -> int:
        return self.operator.dim


@dataclass(frozen=True)
class EnsembleRow:
    index: int
    stratum: Stratum
    dim: int
    s_spec: str
    verdict: Optional[SpectralVerdict]
    status: Optional[ConvergenceStatus]
    final_distance: Optional[float]
    limit_error: Optional[float]
    abel_error: Optional[float]
    agrees: Optional[bool]
    note: str = ""

    @property
    def disagreement(self) -> bool:
        return self.agrees is False


@dataclass(frozen=True)
class EnsembleResult:
    seed: int
    horizon: int
    rows: Tuple[EnsembleRow, ...]

    @property
    def decided(self) -> List[EnsembleRow]:
        return [row for row in self.rows if row.agrees is not None]

    @property
    def agreement_rate(self) -> float:
        decided = self.decided
        return sum(row.agrees for row in decided) / len(decided) if decided else 0.0

    @property
    def undetermined_rate(self) -> float:
        return 1.0 - len(self.decided) / len(self.rows) if self.rows else 0.0

    @property
    def disagreements(self) -> List[EnsembleRow]:
        return [row for row in self.rows if row.disagreement]


def parse_s_spec(spec: str) -> Optional[float]:
    """``"A:<alpha>"`` gives ``alpha``; ``"built"`` gives ``None``."""

    if spec == BUILT_SPEC:
        return None
    if spec.startswith(CESARO_SPEC_PREFIX):
        try:
            alpha = float(spec[len(CESARO_SPEC_PREFIX):])
        except ValueError:
            raise ValueError(f"bad weight spec {spec!r}") from None
        if alpha > 0:
            return alpha
    raise ValueError(f"bad weight spec {spec!r}; expected 'A:<alpha>' with alpha > 0 or 'built'")


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def _disk_points(rng: np.random.Generator, count: int) -> np.ndarray:
    radius = DISK_RADIUS * np.sqrt(rng.uniform(0.0, 1.0, count))
    angle = rng.uniform(0.0, 2.0 * np.pi, count)
    return radius * np.exp(1j * angle)


def _similarity(rng: np.random.Generator, d: int) -> np.ndarray:
    gaussian = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    unitary, _ = np.linalg.qr(gaussian)
    return unitary @ np.diag(rng.uniform(1.0, SCALE_MAX, d))


def _canonical_form(rng: np.random.Generator, stratum: Stratum, d: int) -> np.ndarray:
    form = np.zeros((d, d), dtype=np.complex128)
    if stratum is Stratum.RESOLVENT:
        np.fill_diagonal(form, _disk_points(rng, d))
        return form
    if stratum is Stratum.SEMISIMPLE:
        ones = int(rng.integers(1, d + 1))
        np.fill_diagonal(form, np.concatenate((np.ones(ones), _disk_points(rng, d - ones))))
        return form
    block = int(rng.integers(2, min(3, d) + 1))
    np.fill_diagonal(form, np.concatenate((np.ones(block), _disk_points(rng, d - block))))
    for i in range(block - 1):
        form[i, i + 1] = 1.0
    return form


def generate_member(
    rng: np.random.Generator, index: int, stratum: Stratum, d_max: int, norm_kind: NormKind
) -> EnsembleMember:
    d = int(rng.integers(2, d_max + 1))
    S = _similarity(rng, d)
    T = S @ _canonical_form(rng, stratum, d) @ np.linalg.inv(S)
    return EnsembleMember(index=index, stratum=Stratum(stratum), operator=Operator(T, norm_kind))


def generate_ensemble(
    seed: int,
    count: int,
    d_max: int,
    strata: Sequence[Stratum] = tuple(Stratum),
    norm_kind: NormKind = NormKind.INDUCED_SUP,
) -> List[EnsembleMember]:
    """``count`` members cycling through ``strata``, reproducible from ``seed``."""

    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if d_max < 2:
        raise ValueError(f"d_max must be >= 2, got {d_max}")
    if not strata:
        raise ValueError("at least one stratum is required")
    rng = np.random.default_rng(seed)
    return [
        generate_member(rng, i, strata[i % len(strata)], d_max, norm_kind) for i in range(count)
    ]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _weights(member: EnsembleMember, spec: str, horizon: int) -> RealSeq:
    alpha = parse_s_spec(spec)
    if alpha is None:
        return admissible_weight(power_norms(member.operator, horizon)).s
    return cesaro_numbers(alpha, horizon, exact=False).values


def evaluate_member(member: EnsembleMember, spec: str, horizon: int, config: Settings) -> EnsembleRow:
    """One convergence report, compared with the verdict at 1.

    A converged member agrees only when both the extrapolated limit and the
    Abel mean at ``1 + ABEL_STEP`` are within their tolerances of ``P``.
    """

    try:
        report = convergence_report(member.operator, _weights(member, spec, horizon), horizon, config)
    except NoerlundError as exc:
        logger.warning("member %d (%s) failed: %s", member.index, spec, exc)
        return EnsembleRow(
            member.index, member.stratum, member.dim, spec, None, None, None, None, None, None, str(exc)
        )

    expected = (
        ConvergenceStatus.DIVERGED
        if report.verdict is SpectralVerdict.NON_SIMPLE
        else ConvergenceStatus.CONVERGED
    )
    abel_error = None
    if report.status is ConvergenceStatus.UNDETERMINED:
        agrees = None
    elif report.status is not expected:
        agrees = False
    elif expected is ConvergenceStatus.CONVERGED:
        abel_error = abel_mean(member.operator, 1.0 + ABEL_STEP).distance(report.target)
        limit_ok = report.limit_error is not None and report.limit_error <= config.limit_match_tol
        agrees = limit_ok and abel_error <= config.abel_match_tol
    else:
        agrees = True

    return EnsembleRow(
        index=member.index,
        stratum=member.stratum,
        dim=member.dim,
        s_spec=spec,
        verdict=report.verdict,
        status=report.status,
        final_distance=report.final_distance,
        limit_error=report.limit_error,
        abel_error=abel_error,
        agrees=agrees,
    )


def run_ensemble(
    seed: int,
    count: int,
    d_max: int,
    s_specs: Sequence[str] = ("A:1",),
    strata: Sequence[Stratum] = tuple(Stratum),
    horizon: Optional[int] = None,
    workers: Optional[int] = None,
    config: Optional[Settings] = None,
) -> EnsembleResult:
    """Evaluate every member under every weight spec.

    Rows come back in member order, then spec order, whatever ``workers`` is.
    """

    config = config or default_settings
    horizon = horizon or config.ensemble_horizon
    workers = workers or config.ensemble_workers
    for spec in s_specs:
        parse_s_spec(spec)

    members = generate_ensemble(seed, count, d_max, strata, config.default_norm)
    jobs = [(member, spec) for member in members for spec in s_specs]
    logger.info("ensemble: %d members x %d weights at N=%d", len(members), len(s_specs), horizon)

    def run(job: Tuple[EnsembleMember, str]) -> EnsembleRow:
        return evaluate_member(job[0], job[1], horizon, config)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(job) for job in jobs]

    for row in rows:
        if row.disagreement:
            logger.warning(
                "member %d (%s, %s): status %s vs verdict %s",
                row.index,
                row.stratum.value,
                row.s_spec,
                row.status.value if row.status else None,
                row.verdict.value if row.verdict else None,
            )
    return EnsembleResult(seed=seed, horizon=horizon, rows=tuple(rows))


__all__ = [
    "EnsembleMember",
    "EnsembleResult",
    "EnsembleRow",
    "evaluate_member",
    "generate_ensemble",
    "generate_member",
    "parse_s_spec",
    "run_ensemble",
]
