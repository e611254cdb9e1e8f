"""Search experiments: probability traces, optimal measurement time and phase sweeps.

Repeating a walk of ``m`` steps until the measurement succeeds takes a
geometric number of repetitions, so the expected total cost is
``cost(m) / P(m)``. The "walk-only" cost counts ``m`` per repetition; the
"walk-plus-measure" cost counts ``m + 1``.
"""

from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO, Union

import numpy as np

from . import classical
from .collapsed import (
    CollapsedModel,
    bipartite_model,
    collapsed_trajectory,
    complete_model,
    matrix_trajectory,
    rephased,
    mpartite_model,
    theta_complete,
)
from .config import TOL
from .errors import InvalidFamilyError, InvalidParameterError, NoSolutionError, ResidualError, TooLargeError
from .graph import Bipartite, Complete, Graph, MPartite, complete_graph
from .walkcore import Criterion, StepOperator, bipartite_entering_state, criterion_mask, trajectory, uniform_initial_state

# full-space sweeps beyond this many amplitude updates must use the collapsed path
FULL_SPACE_SWEEP_CAP = 5_000_000_000


class CostModel(str, enum.Enum):
    WALK_ONLY = "walk-only"
    WALK_PLUS_MEASURE = "walk-plus-measure"


@dataclass(frozen=True)
class Trace:
    """Success probability per measured step count, for all three criteria."""

    steps: np.ndarray
    incident: np.ndarray
    entering: np.ndarray
    leaving: np.ndarray

    def select(self, criterion: Criterion) -> np.ndarray:
        return getattr(self, Criterion(criterion).value)

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "p_incident", "p_entering", "p_leaving"])
        for row in zip(self.steps.tolist(), self.incident, self.entering, self.leaving):
            w.writerow([row[0], *(repr(float(x)) for x in row[1:])])


@dataclass(frozen=True)
class SearchOutcome:
    trace: Trace
    criterion: Criterion
    cost_model: CostModel
    m_opt: int  # -1 when no step count gives a finite cost
    n_bar: float
    measure_only: float  # expected cost when measuring the start state, 1 / P(0)
    peak: tuple[int, float]

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "cost_model": self.cost_model.value,
            "m_opt": self.m_opt,
            "n_bar": self.n_bar,
            "measure_only": self.measure_only,
            "peak_step": self.peak[0],
            "peak_probability": self.peak[1],
        }


def repetition_pmf(p: float, k: int) -> float:
    """Probability that the first success comes on repetition ``k``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError("probability out of range")
    if k < 1:
        return 0.0
    return (1.0 - p) ** (k - 1) * p


def expected_repetitions(p: float) -> float:
    return math.inf if p <= 0.0 else 1.0 / p


def first_peak(p: np.ndarray, steps: Optional[np.ndarray] = None) -> tuple[int, float]:
    """First local maximum reaching at least half of the trace maximum.

    Later revivals of the walk can be marginally higher than the first
    maximum, so the global argmax is not the search time. A flat trace returns
    its first entry.
    """
    p = np.asarray(p)
    steps = np.arange(len(p)) if steps is None else np.asarray(steps)
    floor = 0.5 * p.max()
    for i in range(1, len(p) - 1):
        if p[i] > p[i + 1] and p[i] >= p[i - 1] and p[i] >= floor and p[i] > p[0]:
            return int(steps[i]), float(p[i])
    i = int(np.argmax(p))
    return int(steps[i]), float(p[i])


def optimal_steps(p: Sequence[float], cost_model: CostModel = CostModel.WALK_ONLY,
                  steps: Optional[Sequence[int]] = None) -> tuple[int, float]:
    """Step count minimizing the expected total cost; ties go to the smaller count.

    Walk-only minimizes ``m / P(m)`` over ``m >= 1``; walk-plus-measure
    minimizes ``(m + 1) / P(m)`` over ``m >= 0``.
    """
    p = np.asarray(p, dtype=float)
    steps = np.arange(len(p)) if steps is None else np.asarray(steps)
    cost_model = CostModel(cost_model)
    cost = steps + 1.0 if cost_model is CostModel.WALK_PLUS_MEASURE else steps.astype(float)
    allowed = steps >= (0 if cost_model is CostModel.WALK_PLUS_MEASURE else 1)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        n_bar = np.where((p > 0) & allowed, cost / np.where(p > 0, p, 1.0), np.inf)
    if not np.isfinite(n_bar).any():
        raise NoSolutionError("success probability is zero at every admissible step count")
    i = int(np.argmin(n_bar))
    return int(steps[i]), float(n_bar[i])


def make_outcome(trace: Trace, criterion: Criterion = Criterion.INCIDENT,
                 cost_model: CostModel = CostModel.WALK_ONLY) -> SearchOutcome:
    criterion, cost_model = Criterion(criterion), CostModel(cost_model)
    p = trace.select(criterion)
    try:
        m_opt, n_bar = optimal_steps(p, cost_model, trace.steps)
    except NoSolutionError:
        # e.g. a trace of m = 0 only under the walk-only cost
        m_opt, n_bar = -1, math.inf
    measure_only = expected_repetitions(float(p[0])) if trace.steps[0] == 0 else math.nan
    return SearchOutcome(trace, criterion, cost_model, m_opt, n_bar, measure_only, first_peak(p, trace.steps))


InitSpec = Union[str, np.ndarray]


def initial_state(g: Graph, init: InitSpec = "uniform") -> np.ndarray:
    """``"uniform"``, ``"entering1"``, ``"entering2"`` or an explicit vector."""
    if isinstance(init, np.ndarray):
        return init.astype(complex)
    if init == "uniform":
        return uniform_initial_state(g)
    if init in ("entering1", "entering2"):
        return bipartite_entering_state(g, int(init[-1]))
    raise InvalidParameterError(f"unknown initial state {init!r}")


def full_trace(g: Graph, phi: float, m_max: int, init: InitSpec = "uniform") -> Trace:
    if m_max < 0:
        raise InvalidParameterError("m_max must be non-negative")
    op = StepOperator(g, phi)
    masks = [criterion_mask(g, c) for c in Criterion]
    rows = []
    for psi in trajectory(op, initial_state(g, init), m_max):
        prob = np.abs(psi) ** 2
        rows.append([prob[m].sum() for m in masks])
    arr = np.array(rows)
    return Trace(np.arange(m_max + 1), arr[:, 0], arr[:, 1], arr[:, 2])


def probability_trace(g: Graph, phi: float, m_max: int, criterion: Criterion = Criterion.INCIDENT,
                      init: InitSpec = "uniform", cost_model: CostModel = CostModel.WALK_ONLY,
                      fast: bool = False) -> SearchOutcome:
    """Success probability after ``0..m_max`` steps plus the derived optimum.

    ``fast=True`` evolves the collapsed model of the graph's family instead of
    the full edge space.
    """
    if fast:
        trace = collapsed_fast_trace(model_for(g, phi), m_max, initial_state(g, init))
    else:
        trace = full_trace(g, phi, m_max, init)
    return make_outcome(trace, criterion, cost_model)


def model_for(g: Graph, phi: float, validate: bool = True) -> CollapsedModel:
    """Collapsed one-step model matching a family-tagged graph."""
    fam = g.family
    if isinstance(fam, Complete):
        return complete_model(fam.N, fam.v, phi, validate=validate)
    if isinstance(fam, Bipartite):
        return bipartite_model(fam.N1, fam.N2, fam.v1, fam.v2, phi, validate=validate)
    if isinstance(fam, MPartite):
        if fam.M == 2:
            return bipartite_model(fam.N, fam.N, 1, 0, phi, validate=validate)
        return mpartite_model(fam.M, fam.N, phi, validate=validate)
    raise InvalidFamilyError("graph has no family tag; no collapsed model available")


def mask_probabilities(model: CollapsedModel, comps: np.ndarray, edge_mask: np.ndarray) -> np.ndarray:
    """Probability of ``edge_mask`` for each row of collapsed coefficients."""
    w = model.class_weights(edge_mask)
    if not np.all((w == 0) | (w == 1)):
        raise InvalidParameterError("edge mask is not constant on the collapsed classes")
    return (np.abs(comps) ** 2) @ w


def collapsed_fast_trace(model: CollapsedModel, m_max: int, psi0: Optional[np.ndarray] = None,
                         allow_leakage: bool = False) -> Trace:
    """Trace computed from collapsed coefficients only.

    The start state (uniform by default) must lie in the model's span. With
    ``allow_leakage`` a component outside the span is tolerated and its
    criterion weight is carried as a constant; that is exact for the
    decoupled special-special pair of the two-step bipartite model.
    """
    g = model.graph
    psi0 = uniform_initial_state(g) if psi0 is None else np.asarray(psi0, dtype=complex)
    c0, residual = model.project(psi0)
    leak = psi0 - model.lift(c0)
    if residual > TOL.residual_refuse and not allow_leakage:
        raise ResidualError(residual, TOL.residual_refuse)
    mult = model.step_multiplicity
    comps = collapsed_trajectory(model, c0, m_max // mult)
    leak_prob = np.abs(leak) ** 2
    cols = []
    for c in Criterion:
        mask = criterion_mask(g, c)
        cols.append(mask_probabilities(model, comps, mask) + leak_prob[mask].sum())
    return Trace(np.arange(len(comps)) * mult, *cols)


def set_masks(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Edges touching a special vertex of set 1 and of set 2 (bipartite)."""
    if not isinstance(g.family, Bipartite):
        raise InvalidFamilyError("set split needs a bipartite graph")
    idx = g.index
    n1 = g.family.N1
    sm = g.special_mask
    in1 = (sm[idx.tails] & (idx.tails < n1)) | (sm[idx.heads] & (idx.heads < n1))
    in2 = (sm[idx.tails] & (idx.tails >= n1)) | (sm[idx.heads] & (idx.heads >= n1))
    return in1, in2


@dataclass(frozen=True)
class SplitTrace:
    steps: np.ndarray
    incident: np.ndarray
    set1: np.ndarray
    set2: np.ndarray

    def split(self, step: int) -> tuple[float, float]:
        """Fractions of the special-edge probability attributable to each set."""
        i = int(np.searchsorted(self.steps, step))
        a, b = self.set1[i], self.set2[i]
        return float(a / (a + b)), float(b / (a + b))


def bipartite_split_trace(N1: int, N2: int, v1: int, v2: int, m_max: int, phi: float = np.pi,
                          init: InitSpec = "uniform", fast: bool = True) -> SplitTrace:
    """Per-set special-edge probabilities on the bipartite graph.

    Edges joining special vertices of both sets count toward both sets.
    """
    model = bipartite_model(N1, N2, v1, v2, phi)
    g = model.graph
    m1, m2 = set_masks(g)
    inc = criterion_mask(g, Criterion.INCIDENT)
    psi0 = initial_state(g, init)
    if fast:
        c0, residual = model.project(psi0)
        if residual > TOL.residual_refuse:
            raise ResidualError(residual, TOL.residual_refuse)
        comps = collapsed_trajectory(model, c0, m_max)
        cols = [mask_probabilities(model, comps, m) for m in (inc, m1, m2)]
    else:
        op = StepOperator(g, phi)
        probs = [np.abs(psi) ** 2 for psi in trajectory(op, psi0, m_max)]
        cols = [np.array([p[m].sum() for p in probs]) for m in (inc, m1, m2)]
    return SplitTrace(np.arange(m_max + 1), *cols)


@dataclass(frozen=True)
class SweepGrid:
    """Success probabilities over a (phase, step) grid on the complete graph."""

    N: int
    v: int
    phis: np.ndarray
    steps: np.ndarray
    incident: np.ndarray  # shape (len(phis), len(steps))
    entering: np.ndarray
    leaving: np.ndarray

    def select(self, criterion: Criterion) -> np.ndarray:
        return getattr(self, Criterion(criterion).value)

    def ridge(self, criterion: Criterion = Criterion.INCIDENT,
              cost_model: CostModel = CostModel.WALK_ONLY) -> tuple[np.ndarray, np.ndarray]:
        """Optimal step count and expected cost for every phase."""
        P = self.select(criterion)
        res = [optimal_steps(row, cost_model, self.steps) for row in P]
        return np.array([r[0] for r in res]), np.array([r[1] for r in res])

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi", "m", "p_incident", "p_entering", "p_leaving"])
        for i, phi in enumerate(self.phis):
            for j, m in enumerate(self.steps):
                w.writerow([repr(float(phi)), int(m), repr(float(self.incident[i, j])),
                            repr(float(self.entering[i, j])), repr(float(self.leaving[i, j]))])


def default_phase_grid(points: int = 128) -> np.ndarray:
    return 2.0 * np.pi * np.arange(points) / points


def default_m_max(N: int, v: int) -> int:
    return 4 * math.ceil(math.pi / (2 * theta_complete(N, v)))


def phase_sweep(N: int, v: int, phis: Optional[Sequence[float]] = None, m_max: Optional[int] = None,
                fast: bool = True, workers: int = 1) -> SweepGrid:
    """Probability grid over phases and step counts for the complete graph.

    Results are ordered by phase index regardless of ``workers``.
    """
    phis = default_phase_grid() if phis is None else np.asarray(phis, dtype=float)
    m_max = default_m_max(N, v) if m_max is None else m_max
    g = complete_graph(N, v)
    if not fast and g.dim * len(phis) * (m_max + 1) > FULL_SPACE_SWEEP_CAP:
        raise TooLargeError("full-space sweep too large; use the collapsed fast path (fast=True)")

    if fast:
        # validate once, then only the small matrix changes with phi
        base = complete_model(N, v, float(phis[0]) if len(phis) else np.pi)
        c0, residual = base.project(uniform_initial_state(g))
        if residual > TOL.residual_refuse:
            raise ResidualError(residual, TOL.residual_refuse)
        weights = np.column_stack([base.class_weights(criterion_mask(g, c)) for c in Criterion])

    def one(phi: float) -> Trace:
        if fast:
            probs = (np.abs(matrix_trajectory(rephased(base, phi).matrix, c0, m_max)) ** 2) @ weights
            return Trace(np.arange(m_max + 1), probs[:, 0], probs[:, 1], probs[:, 2])
        return full_trace(g, phi, m_max)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            traces = list(ex.map(one, phis))
    else:
        traces = [one(p) for p in phis]
    stack = {c: np.array([t.select(c) for t in traces]) for c in Criterion}
    return SweepGrid(N, v, phis, np.arange(m_max + 1), stack[Criterion.INCIDENT],
                     stack[Criterion.ENTERING], stack[Criterion.LEAVING])


@dataclass(frozen=True)
class PhaseCurve:
    phis: np.ndarray
    m_opt: np.ndarray
    n_bar: np.ndarray
    blind_average: float
    memory_average: float

    def write_csv(self, fh: TextIO) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi", "m_opt", "n_bar", "blind_average", "memory_average"])
        for phi, m, n in zip(self.phis, self.m_opt, self.n_bar):
            w.writerow([repr(float(phi)), int(m), repr(float(n)), self.blind_average, self.memory_average])


def average_vs_phase(N: int, v: int, phis: Optional[Sequence[float]] = None, m_max: Optional[int] = None,
                     criterion: Criterion = Criterion.INCIDENT, cost_model: CostModel = CostModel.WALK_ONLY,
                     grid: Optional[SweepGrid] = None) -> PhaseCurve:
    """Optimal expected cost per phase with the classical averages as reference lines."""
    grid = grid or phase_sweep(N, v, phis, m_max)
    m_opt, n_bar = grid.ridge(criterion, cost_model)
    spec = classical.ClassicalSearchSpec(N, v)
    return PhaseCurve(grid.phis, m_opt, n_bar, classical.blind_average(spec), classical.memory_average(spec))
