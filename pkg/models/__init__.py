# Models package for problem data, coefficient tables and results

from .game import GameSpec, Trajectory, MATRIX_FIELDS, WEIGHT_FIELDS, SPEC_FIELDS
from .coefficients import (
    ResponseAnchor,
    FollowerStage,
    FollowerCoeffs,
    LeaderStage,
    LeaderCoeffs,
    TTable
)
from .solutions import (
    PrecommitSolution,
    StageDiagnostics,
    EquilibriumSolution,
    StationarityReport,
    VariationReport,
    DeviationReport,
    ConsistencyRow,
    ConsistencyReport,
    FixedPointResult
)
from .report import RunStatus, NotSolvableInfo, RunReport

__all__ = [
    "GameSpec",
    "Trajectory",
    "MATRIX_FIELDS",
    "WEIGHT_FIELDS",
    "SPEC_FIELDS",
    "ResponseAnchor",
    "FollowerStage",
    "FollowerCoeffs",
    "LeaderStage",
    "LeaderCoeffs",
    "TTable",
    "PrecommitSolution",
    "StageDiagnostics",
    "EquilibriumSolution",
    "StationarityReport",
    "VariationReport",
    "DeviationReport",
    "ConsistencyRow",
    "ConsistencyReport",
    "FixedPointResult",
    "RunStatus",
    "NotSolvableInfo",
    "RunReport"
]
