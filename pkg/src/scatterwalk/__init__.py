"""Scattering quantum walks on complete, bipartite and M-partite graphs, applied to vertex search."""

from .circuit import CircuitState, OracleFunction, WalkCircuit, verify_circuit
from .classical import ClassicalSearchSpec, Variant, blind_average, memory_average, monte_carlo_average
from .collapsed import (
    CollapsedModel,
    bipartite_model,
    bipartite_two_step_model,
    collapsed_trajectory,
    complete_model,
    mpartite_model,
)
from .config import TOL, Tolerances
from .errors import (
    DimensionError,
    DomainViolationError,
    InvalidArgumentError,
    InvalidFamilyError,
    InvalidGraphError,
    InvalidParameterError,
    NoSolutionError,
    ResidualError,
    ScatterWalkError,
    TooLargeError,
    TranscriptionError,
    UnsupportedError,
)
from .graph import Bipartite, Complete, EdgeIndex, Graph, MPartite, bipartite_graph, complete_graph, mpartite_graph
from .search import (
    CostModel,
    SearchOutcome,
    SweepGrid,
    Trace,
    average_vs_phase,
    collapsed_fast_trace,
    optimal_steps,
    phase_sweep,
    probability_trace,
)
from .walkcore import Criterion, StepOperator, evolve, success_probability, uniform_initial_state

__version__ = "0.1.0"

__all__ = [
    "Bipartite",
    "CircuitState",
    "ClassicalSearchSpec",
    "CollapsedModel",
    "Complete",
    "CostModel",
    "Criterion",
    "DimensionError",
    "DomainViolationError",
    "EdgeIndex",
    "Graph",
    "InvalidArgumentError",
    "InvalidFamilyError",
    "InvalidGraphError",
    "InvalidParameterError",
    "MPartite",
    "NoSolutionError",
    "OracleFunction",
    "ResidualError",
    "ScatterWalkError",
    "SearchOutcome",
    "StepOperator",
    "SweepGrid",
    "TOL",
    "Tolerances",
    "TooLargeError",
    "Trace",
    "TranscriptionError",
    "UnsupportedError",
    "Variant",
    "WalkCircuit",
    "average_vs_phase",
    "bipartite_graph",
    "bipartite_model",
    "bipartite_two_step_model",
    "blind_average",
    "collapsed_fast_trace",
    "collapsed_trajectory",
    "complete_graph",
    "complete_model",
    "evolve",
    "memory_average",
    "monte_carlo_average",
    "mpartite_graph",
    "mpartite_model",
    "optimal_steps",
    "phase_sweep",
    "probability_trace",
    "success_probability",
    "uniform_initial_state",
    "verify_circuit",
]
