"""Cognitive handoff simulator and multi-objective network-selection engine."""

from ._kernels import BACKEND
from .context import (
    REGISTRY,
    ContextSnapshot,
    ExecutionModel,
    HandoffConfiguration,
    HandoffConstraint,
    HandoffPolicy,
    ToleranceRange,
    apply_policies,
    check_constraint,
    normalize_variable,
)
from .metrics import PerformanceCounters, RadarReport, accumulate, radar, run_radar, tradeoff_sweep
from .objectives import (
    CorrelationSpec,
    Feature,
    ObjectiveVector,
    dominates,
    feasible,
    objective_value,
    objective_vector,
    pareto_front,
    scalarize,
)
from .pipeline import run_scenario
from .scenario import LoadedScenario, parse_scenario, reference_scenario_path

__version__ = "0.1.0"
