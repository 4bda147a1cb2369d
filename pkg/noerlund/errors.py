"""Exception hierarchy.

Every error is a ``ValueError`` so callers that only care about bad input
can catch the builtin, while the CLI catches :class:`NoerlundError` to map
failures onto exit status 2.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple


class NoerlundError(ValueError):
    """Base class for all library errors."""


class SequenceError(NoerlundError):
    """Invalid sequence data or an unmet sequence precondition."""


class InsufficientHorizonError(SequenceError):
    def __init__(self, required: int, available: int, what: str = "sequence") -> None:
        self.required = required
        self.available = available
        super().__init__(
            f"{what} needs horizon >= {required}, got {available}"
        )


class MajorantError(NoerlundError):
    """Concave-majorant or builder precondition failed."""


class StructuralInconsistencyError(MajorantError):
    """The contact recursion disagrees with the equality-contact set."""

    def __init__(self, recursion: Sequence[int], contacts: Sequence[int]) -> None:
        self.recursion: Tuple[int, ...] = tuple(recursion)
        self.contacts: Tuple[int, ...] = tuple(contacts)
        super().__init__(
            "contact recursion and equality contacts differ: "
            f"recursion={list(self.recursion)[:12]}, contacts={list(self.contacts)[:12]}"
        )


class OperatorError(NoerlundError):
    """Invalid operator data or an unmet operator precondition."""


class SpectrumProximityError(OperatorError):
    """``lambda*I - T`` is singular or too ill-conditioned to invert."""

    def __init__(self, condition: float, message: Optional[str] = None) -> None:
        self.condition = condition
        super().__init__(message or f"lambda is too close to the spectrum (condition ~ {condition:.3e})")


class IndeterminateRankError(OperatorError):
    """A singular value sits inside the indeterminacy band around the rank cut."""

    def __init__(self, singular_values: Sequence[float], cut: float) -> None:
        self.singular_values: Tuple[float, ...] = tuple(float(v) for v in singular_values)
        self.cut = cut
        super().__init__(
            f"numerical rank is indeterminate: singular values {list(self.singular_values)} "
            f"lie within the band around cut {cut:.3e}"
        )


class WeightError(NoerlundError):
    """Nörlund weights are not positive and nondecreasing on the window."""

    def __init__(self, index: int, message: str) -> None:
        self.index = index
        super().__init__(f"inadmissible weight at n={index}: {message}")


class ParseError(NoerlundError):
    """A sequence or matrix file could not be read."""

    def __init__(self, line: int, message: str) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}")
