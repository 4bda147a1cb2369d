from pydantic import BaseModel, ConfigDict, Field
from typing import Optional, List, Dict, Any, Union
from noerlund import __version__
from noerlund.models import ConvergenceStatus, SpectralVerdict, Stratum

# Exact values travel as "p/q" strings, floats as numbers
Value = Union[str, float]
Matrix = List[List[List[float]]]


# Header Schemas
class RunHeader(BaseModel):
    command: str
    version: str = __version__
    horizon: Optional[int] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    tolerances: Dict[str, Any] = Field(default_factory=dict)
    overrides: Dict[str, Any] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)


# Majorant Schemas
class MajorantReport(BaseModel):
    header: RunHeader
    c: List[Value]
    contact_indices: List[int]
    nu: Optional[List[int]] = None
    n_sup: Optional[int] = None
    beyond_horizon: bool
    ell: float
    tail_slope: Optional[Value] = None
    eventually_affine: bool
    slope_tail: Optional[float] = None
    limsup_ratio: Optional[float] = None


class CriterionSchema(BaseModel):
    name: str
    passed: bool
    witness: float
    criterion: str
    threshold: Optional[float] = None

    model_config = ConfigDict(from_attributes=True)


class Thm47Schema(BaseModel):
    p: int
    horizon: int
    all_passed: bool
    preconditions_met: bool
    items: List[CriterionSchema]
    preconditions: List[CriterionSchema]
    difference_checks: List[CriterionSchema]

    model_config = ConfigDict(from_attributes=True)


class BuiltMajorantReport(BaseModel):
    header: RunHeader
    p: int
    s: List[Value]
    c: List[Value]
    ratio_window: float
    h_index: str
    h_index_agrees: bool
    sandwich_holds: bool
    thm47: Thm47Schema


# Convergence Schemas
class ConvergenceSchema(BaseModel):
    header: Optional[RunHeader] = None
    verdict: SpectralVerdict
    exact_verdict: Optional[SpectralVerdict] = None
    status: ConvergenceStatus
    horizon: int
    final_distance: float
    norm_ratio_tail: float
    kernel_witness: float
    limit_error: Optional[float] = None
    power_drift: float
    target: Optional[Matrix] = None
    limit_estimate: Optional[Matrix] = None
    thresholds: Dict[str, float] = Field(default_factory=dict)
    distances: List[float] = Field(default_factory=list)


# Reproduction Schemas
class AssertionSchema(BaseModel):
    name: str
    passed: bool
    detail: str
    failing_index: Optional[int] = None
    witness: Optional[float] = None

    model_config = ConfigDict(from_attributes=True)


class ReproductionReport(BaseModel):
    header: RunHeader
    example: str
    passed: bool
    assertions: List[AssertionSchema]
    convergence: Optional[ConvergenceSchema] = None


# Ensemble Schemas
class EnsembleRowSchema(BaseModel):
    index: int
    stratum: Stratum
    dim: int
    s_spec: str
    verdict: Optional[SpectralVerdict] = None
    status: Optional[ConvergenceStatus] = None
    final_distance: Optional[float] = None
    limit_error: Optional[float] = None
    abel_error: Optional[float] = None
    agrees: Optional[bool] = None
    disagreement: bool
    note: str = ""

    model_config = ConfigDict(from_attributes=True)


class EnsembleReport(BaseModel):
    header: RunHeader
    seed: int
    horizon: int
    agreement_rate: float
    undetermined_rate: float
    disagreements: int
    rows: List[EnsembleRowSchema]
