"""Decompositions of polynomial dynamical systems on the p-adic integers."""
from .core import (
    IntPolynomial,
    NonUnitError,
    NotSimpleRootError,
    Prime,
    Residue,
    Valuation,
    hensel_lift,
    valuation,
)
from .engine import (
    Behavior,
    BehaviorTag,
    Cycle,
    Displacement,
    Forecast,
    ForecastKind,
    InsufficientPrecisionError,
    LiftSet,
    Multiplier,
    NotClosedError,
    classify,
    displacement,
    find_cycles,
    lift,
    multiplier,
    splitting_forecast,
)
from .decomposer import (
    Ball,
    BasinRecord,
    BudgetExhaustedError,
    Certificate,
    Decomposition,
    MinimalComponent,
    NotMinimalError,
    PeriodicOrbit,
    attractor_refine,
    decompose,
    minimality_check,
    partition_violations,
)
from .oracle import (
    CapExceededError,
    FunctionalGraph,
    NotACycleError,
    basin_of,
    build_graph,
    census,
    crosscheck,
)
from .theorems import (
    CaseId,
    ConjectureReport,
    CycleCountForecast,
    NoCountError,
    UnsupportedPrimeError,
    classify_case,
    conjecture_check,
    growing_cycle_count,
    predict,
    sqrt_minus_one,
)

__version__ = "0.1.0"

__all__ = [
    "IntPolynomial",
    "NonUnitError",
    "NotSimpleRootError",
    "Prime",
    "Residue",
    "Valuation",
    "hensel_lift",
    "valuation",
    "Behavior",
    "BehaviorTag",
    "Cycle",
    "Displacement",
    "Forecast",
    "ForecastKind",
    "InsufficientPrecisionError",
    "LiftSet",
    "Multiplier",
    "NotClosedError",
    "classify",
    "displacement",
    "find_cycles",
    "lift",
    "multiplier",
    "splitting_forecast",
    "Ball",
    "BasinRecord",
    "BudgetExhaustedError",
    "Certificate",
    "Decomposition",
    "MinimalComponent",
    "NotMinimalError",
    "PeriodicOrbit",
    "attractor_refine",
    "decompose",
    "minimality_check",
    "partition_violations",
    "CapExceededError",
    "FunctionalGraph",
    "NotACycleError",
    "basin_of",
    "build_graph",
    "census",
    "crosscheck",
    "CaseId",
    "ConjectureReport",
    "CycleCountForecast",
    "NoCountError",
    "UnsupportedPrimeError",
    "classify_case",
    "conjecture_check",
    "growing_cycle_count",
    "predict",
    "sqrt_minus_one",
]
