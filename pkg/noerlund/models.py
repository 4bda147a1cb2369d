import enum


# Enums
class NormKind(str, enum.Enum):
    INDUCED_SUP = "induced_sup"
    INDUCED_L1 = "induced_l1"
    SPECTRAL_L2 = "spectral_l2"


class SequenceOp(str, enum.Enum):
    DELTA = "delta"
    SIGMA = "sigma"


class HIndexMode(str, enum.Enum):
    EXACT = "exact"
    EMPIRICAL = "empirical"


class SpectralVerdict(str, enum.Enum):
    RESOLVENT_POINT = "resolvent_point"
    SIMPLE_POLE = "simple_pole"
    NON_SIMPLE = "non_simple"


class ConvergenceStatus(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    UNDETERMINED = "undetermined"


class Stratum(str, enum.Enum):
    RESOLVENT = "resolvent"
    SEMISIMPLE = "semisimple"
    JORDAN = "jordan"


class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
