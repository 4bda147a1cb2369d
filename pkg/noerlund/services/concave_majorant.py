"""Least concave majorants of finite sequences.

The majorant ``c`` of ``b`` is built by the forward recursion

    c(0) = b(0),  c(n+1) = c(n) + max_{n<k<=N} (b(k) - c(n)) / (k - n)

optionally floored by a caller-supplied tail slope that stands in for the
chords to indices beyond the horizon. An upper convex hull (monotone
chain) gives an independent construction of the same object when no tail
slope is used.

Contacts (indices with ``c(n) = b(n)``) are compared exactly on the
rational path. On the float path two values match when they differ by at
most ``Settings.contact_rtol`` times the larger of them, plus a roundoff
floor of a few ulps of the sequence scale per index of horizon.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from noerlund.config import settings
from noerlund.errors import MajorantError, StructuralInconsistencyError
from noerlund.services.seq_calculus import Number, RealSeq, _is_rational

ROUNDOFF_ULPS = 8


@dataclass(frozen=True, eq=False)
class MajorantResult:
    """Majorant prefix plus contact metadata.

    ``n_sup`` is the largest index whose increment is attained by a
    materialized chord, or ``None`` when every increment up to the horizon
    is attained (the set extends beyond the horizon).
    """

    c: RealSeq
    contact_indices: Tuple[int, ...]
    n_sup: Optional[int]
    ell: float
    tail_slope: Optional[Number] = None

    @property
    def beyond_horizon(self) -> bool:
        return self.n_sup is None


@dataclass(frozen=True)
class ContactStructure:
    nu: Tuple[int, ...]
    eventually_affine: bool
    slope_tail: Optional[float]


class _Matcher:
    """Equality test shared by contact extraction and the ν recursion."""

    def __init__(self, b: RealSeq, exact: bool) -> None:
        self.exact = exact
        self.floor = 0.0
        if not exact:
            scale = float(np.max(np.abs(b.as_float())))
            self.floor = ROUNDOFF_ULPS * sys.float_info.epsilon * (b.horizon + 1) * scale

    def __call__(self, x: Number, y: Number) -> bool:
        if self.exact:
            return x == y
        x, y = float(x), float(y)
        return abs(x - y) <= settings.contact_rtol * max(abs(x), abs(y)) + self.floor


def _validate_tail_slope(tail_slope: Optional[Number]) -> Optional[Number]:
    if tail_slope is None:
        return None
    if isinstance(tail_slope, float):
        if math.isnan(tail_slope) or tail_slope == math.inf:
            raise MajorantError(f"tail_slope must be finite, got {tail_slope}")
        if tail_slope == -math.inf:
            return None
    return tail_slope


def _ell_estimate(values: NDArray) -> float:
    horizon = values.size - 1
    start = max(1, horizon // 2)
    idx = np.arange(start, horizon + 1)
    return float(np.max(np.asarray(values[idx], dtype=np.float64) / idx))


def _contacts(b_values: NDArray, c_values: Sequence[Number], match: _Matcher) -> Tuple[int, ...]:
    return tuple(n for n, (bn, cn) in enumerate(zip(b_values, c_values)) if match(cn, bn))


def _path_values(b: RealSeq, exact: bool) -> NDArray:
    return b.values if exact else b.as_float()


def lcm_recursive(b: RealSeq, tail_slope: Optional[Number] = None) -> MajorantResult:
    """Least concave majorant by the forward chord recursion.

    Without ``tail_slope`` the result is the LCM of the finite prefix. With
    it, each increment is ``max(best materialized chord, tail_slope)``.
    """

    if b.horizon < 1:
        raise MajorantError("lcm_recursive needs horizon >= 1")
    tail_slope = _validate_tail_slope(tail_slope)
    exact = b.exact and (tail_slope is None or _is_rational(tail_slope))
    if exact and tail_slope is not None:
        tail_slope = Fraction(tail_slope)
    elif tail_slope is not None:
        tail_slope = float(tail_slope)

    values = _path_values(b, exact)
    horizon = b.horizon
    offsets = np.arange(1, horizon + 1, dtype=object if exact else np.float64)

    c: List[Number] = [values[0]]
    attained: List[bool] = [True]
    for n in range(horizon):
        current = c[-1]
        best = np.max((values[n + 1 :] - current) / offsets[: horizon - n])
        if tail_slope is not None and tail_slope > best:
            c.append(current + tail_slope)
            attained.append(False)
        else:
            c.append(current + best)
            attained.append(True)

    n_sup = None if all(attained) else max(i for i, hit in enumerate(attained) if hit)
    match = _Matcher(b, exact)
    return MajorantResult(
        c=RealSeq.from_values(c, exact=exact),
        contact_indices=_contacts(values, c, match),
        n_sup=n_sup,
        ell=_ell_estimate(values),
        tail_slope=tail_slope,
    )


def _cross(o: Tuple[int, Number], a: Tuple[int, Number], p: Tuple[int, Number]) -> Number:
    return (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])


def lcm_hull_oracle(b: RealSeq) -> MajorantResult:
    """Least concave majorant as the upper convex hull of ``{(n, b(n))}``."""

    if b.horizon < 1:
        raise MajorantError("lcm_hull_oracle needs horizon >= 1")
    exact = b.exact
    values = _path_values(b, exact)

    hull: List[Tuple[int, Number]] = []
    for x, y in enumerate(values):
        point = (x, y)
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) >= 0:
            hull.pop()
        hull.append(point)

    c: List[Number] = [values[0]] * (b.horizon + 1)
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        for n in range(x0, x1 + 1):
            c[n] = y0 + (y1 - y0) * (n - x0) / (x1 - x0)

    match = _Matcher(b, exact)
    return MajorantResult(
        c=RealSeq.from_values(c, exact=exact),
        contact_indices=_contacts(values, c, match),
        n_sup=None,
        ell=_ell_estimate(values),
    )


def contact_structure(b: RealSeq, result: MajorantResult) -> ContactStructure:
    """Rebuild the contact indices from the ν recursion and cross-check them.

    ``ν_0 = 0`` and ``ν_{k+1}`` is the smallest ``n > ν_k`` lying on the
    chord of slope ``c(ν_k + 1) - c(ν_k)`` through ``(ν_k, c(ν_k))``.
    """

    exact = b.exact and result.c.exact
    values = _path_values(b, exact)
    c = result.c.values if exact else result.c.as_float()
    match = _Matcher(b, exact)
    limit = result.n_sup if result.n_sup is not None else b.horizon

    nu = [0]
    while nu[-1] < limit:
        k = nu[-1]
        slope = c[k + 1] - c[k]
        following = next(
            (n for n in range(k + 1, b.horizon + 1) if match(values[n], c[k] + (n - k) * slope)),
            None,
        )
        if following is None:
            raise StructuralInconsistencyError(nu, result.contact_indices)
        nu.append(following)

    if tuple(nu) != tuple(result.contact_indices):
        raise StructuralInconsistencyError(nu, result.contact_indices)

    eventually_affine = result.n_sup is not None
    slope_tail = float(c[-1] - c[-2]) if eventually_affine else None
    return ContactStructure(tuple(nu), eventually_affine, slope_tail)


def limsup_ratio(b: RealSeq, c: RealSeq) -> float:
    """Maximum of ``b(n) / c(n)`` over the tail window ``[N/2, N]``."""

    if b.horizon != c.horizon:
        raise MajorantError(f"horizon mismatch: b has {b.horizon}, c has {c.horizon}")
    bv, cv = b.as_float(), c.as_float()
    start = b.horizon // 2
    window = cv[start:]
    if np.any(window <= 0):
        bad = start + int(np.flatnonzero(window <= 0)[0])
        raise MajorantError(f"c must be positive on the tail window; c({bad}) = {cv[bad]}")
    if start > 0 and not np.max(bv[start:]) > np.max(bv[:start]):
        raise MajorantError(
            "b does not grow on the horizon: the tail window never exceeds the first half"
        )
    return float(np.max(bv[start:] / window))


def chord_monotonicity_violations(b: RealSeq, result: MajorantResult) -> List[Tuple[int, int]]:
    """Pairs ``(n, k)`` where the chord from ``n+1`` to ``k`` is steeper than from ``n``."""

    exact = b.exact and result.c.exact
    values = _path_values(b, exact)
    c = result.c.values if exact else result.c.as_float()
    scale = 0.0 if exact else settings.contact_rtol * max(1.0, float(np.max(np.abs(values))))
    violations: List[Tuple[int, int]] = []
    for n in range(b.horizon - 1):
        for k in range(n + 2, b.horizon + 1):
            later = (values[k] - c[n + 1]) / (k - n - 1)
            earlier = (values[k] - c[n]) / (k - n)
            if later - earlier > scale:
                violations.append((n, k))
    return violations


__all__ = [
    "ContactStructure",
    "MajorantResult",
    "chord_monotonicity_violations",
    "contact_structure",
    "lcm_hull_oracle",
    "lcm_recursive",
    "limsup_ratio",
]
