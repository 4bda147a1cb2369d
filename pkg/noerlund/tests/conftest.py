"""
PyTest Configuration and Fixtures

Shared operators, weight sequences and file helpers for the noerlund test
suite. Every test runs against a snapshot of the shared settings, so
tests that reconfigure tolerances cannot leak into each other.
"""

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from noerlund.config import configure, settings
from noerlund.services.exact_operator import ExactOperator
from noerlund.services.operator_core import Operator
from noerlund.services.reproduction import jordan_operator, jordan_weight_increments
from noerlund.services.seq_calculus import RealSeq, sigma


@pytest.fixture(autouse=True)
def restore_settings():
    """Put the shared settings back after each test."""
    snapshot = settings.model_copy()
    yield
    configure(snapshot)


# ============================================================================
# Operators
# ============================================================================

@pytest.fixture
def jordan_exact() -> ExactOperator:
    """T = -[[1, 1], [0, 1]] in exact arithmetic"""
    return jordan_operator()


@pytest.fixture
def jordan_T(jordan_exact: ExactOperator) -> Operator:
    """T = -[[1, 1], [0, 1]] with the sup norm"""
    return jordan_exact.to_operator()


@pytest.fixture
def jordan_block() -> Operator:
    """Unipotent Jordan block at 1"""
    return Operator(np.array([[1.0, 1.0], [0.0, 1.0]]))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


# ============================================================================
# Sequences
# ============================================================================

@pytest.fixture
def jordan_weights() -> Callable[[int], RealSeq]:
    """Float weights s = Σa for the Jordan-type example, any horizon"""

    def build(N: int) -> RealSeq:
        return sigma(jordan_weight_increments(N, exact=False))

    return build


@pytest.fixture
def linear_weights() -> Callable[[int], RealSeq]:
    """s(n) = n + 1 on the exact path"""

    def build(N: int) -> RealSeq:
        return RealSeq.from_values(range(1, N + 2))

    return build


# ============================================================================
# Files
# ============================================================================

@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], Path]:
    """Write text into tmp_path and return the path"""

    def write(name: str, content: str) -> Path:
        path = tmp_path / name
        path.write_text(content, encoding="utf-8")
        return path

    return write
