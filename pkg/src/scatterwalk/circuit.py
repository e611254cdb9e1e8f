"""Oracle circuit that performs one walk step on edge (x) vertex (x) ancilla registers.

The vertex register has ``n_vertices + 1`` slots. The extra slot
``REF = n_vertices`` is the reference state the register starts and ends in,
kept apart from vertex 0. One step is::

    CW2 -> oracle -> CU_f -> oracle -> CW1

CW2 copies the head of the edge register into the vertex register, the
oracle writes ``f(vertex)`` into the ancilla, CU_f scatters the edge register
with the normal or special rule depending on the ancilla, and the last two
gates uncompute both registers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import TOL
from .errors import DomainViolationError, InvalidParameterError
from .graph import Graph
from .walkcore import StepOperator, evolve


@dataclass
class OracleFunction:
    """Black-box marking function with a query counter; ``f(REF) = 0``."""

    values: np.ndarray
    calls: int = 0

    @classmethod
    def from_graph(cls, g: Graph) -> "OracleFunction":
        values = np.zeros(g.n_vertices + 1, dtype=np.int8)
        values[list(g.specials)] = 1
        return cls(values)

    def __call__(self, vertex: int) -> int:
        return int(self.values[vertex])


@dataclass
class CircuitState:
    """Amplitudes indexed as ``amps[edge, vertex_slot, ancilla]``."""

    graph: Graph
    amps: np.ndarray = field(repr=False)

    @property
    def ref(self) -> int:
        return self.graph.n_vertices

    @classmethod
    def from_walk_state(cls, g: Graph, psi: np.ndarray) -> "CircuitState":
        amps = np.zeros((g.dim, g.n_vertices + 1, 2), dtype=complex)
        amps[:, g.n_vertices, 0] = psi
        return cls(g, amps)

    def copy(self) -> "CircuitState":
        return CircuitState(self.graph, self.amps.copy())

    def edge_component(self) -> np.ndarray:
        return self.amps[:, self.ref, 0].copy()

    def ancilla_residual(self) -> float:
        """Largest amplitude outside the ``|REF>|0>`` ancilla sector."""
        rest = self.amps.copy()
        rest[:, self.ref, 0] = 0
        return float(np.max(np.abs(rest), initial=0.0))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def _check_slots(s: CircuitState, slot_of_edge: np.ndarray, gate: str, tol: float = TOL.circuit) -> None:
    mask = np.ones(s.amps.shape[:2], dtype=bool)
    mask[np.arange(len(slot_of_edge)), slot_of_edge] = False
    stray = np.max(np.abs(s.amps[mask]), initial=0.0)
    if stray > tol:
        raise DomainViolationError(f"{gate}: amplitude {stray:.3e} outside the gate's domain")


def oracle_apply(s: CircuitState, f: OracleFunction) -> CircuitState:
    """XOR ``f(vertex register)`` into the ancilla. Counts as one oracle query."""
    f.calls += 1
    out = s.amps.copy()
    marked = np.flatnonzero(f.values)
    out[:, marked, :] = out[:, marked, ::-1]
    return CircuitState(s.graph, out)


def controlled_swap(s: CircuitState, control: str) -> CircuitState:
    """Swap vertex-register slots REF and the head (or tail) of the edge register.

    Unitary on the whole space and its own inverse.
    """
    idx = s.graph.index
    vert = idx.heads if control == "head" else idx.tails
    rows = np.arange(len(vert))
    out = s.amps.copy()
    out[rows, s.ref, :] = s.amps[rows, vert, :]
    out[rows, vert, :] = s.amps[rows, s.ref, :]
    return CircuitState(s.graph, out)


def cw2_apply(s: CircuitState) -> CircuitState:
    """``|m,l>|REF> -> |m,l>|l>``."""
    _check_slots(s, np.full(s.graph.dim, s.ref), "CW2")
    return controlled_swap(s, "head")


def cw1_apply(s: CircuitState) -> CircuitState:
    """``|l,m>|l> -> |l,m>|REF>``: the vertex now sits in the tail slot of the edge."""
    _check_slots(s, s.graph.index.tails, "CW1")
    return controlled_swap(s, "tail")


def _ancilla_operators(g: Graph, phi: float) -> tuple[StepOperator, StepOperator]:
    deg = g.degrees.astype(float)
    normal = StepOperator(g, phi, r=1.0 - 2.0 / deg, t=2.0 / deg)
    special = StepOperator(g, phi, r=np.full(g.n_vertices, -np.exp(1j * phi)), t=np.zeros(g.n_vertices))
    return normal, special


def cuf_apply(s: CircuitState, phi: float, ops: Optional[tuple[StepOperator, StepOperator]] = None) -> CircuitState:
    """Scatter the edge register at the vertex held in the vertex register.

    Ancilla 0 selects the normal rule and ancilla 1 the special rule. Only
    defined when the vertex register equals the head of the edge register.
    """
    g = s.graph
    idx = g.index
    _check_slots(s, idx.heads, "CU_f")
    ops = ops or _ancilla_operators(g, phi)
    rows = np.arange(g.dim)
    out = np.zeros_like(s.amps)
    for c in (0, 1):
        x = s.amps[rows, idx.heads, c]
        out[rows, idx.tails, c] = ops[c].apply(x)
    return CircuitState(g, out)


class WalkCircuit:
    """Reusable circuit for one graph and phase; tracks oracle queries."""

    def __init__(self, graph: Graph, phi: float, oracle: Optional[OracleFunction] = None):
        self.graph = graph
        self.phi = float(phi)
        self.oracle = oracle or OracleFunction.from_graph(graph)
        self._ops = _ancilla_operators(graph, self.phi)
        self.steps = 0

    def step(self, s: CircuitState) -> CircuitState:
        s = cw2_apply(s)
        s = oracle_apply(s, self.oracle)
        s = cuf_apply(s, self.phi, self._ops)
        s = oracle_apply(s, self.oracle)
        s = cw1_apply(s)
        self.steps += 1
        return s

    def run(self, s: CircuitState, n: int) -> CircuitState:
        for _ in range(n):
            s = self.step(s)
        return s

    @property
    def oracle_calls(self) -> int:
        return self.oracle.calls


def circuit_step(s: CircuitState, f: OracleFunction, phi: float) -> CircuitState:
    return WalkCircuit(s.graph, phi, f).step(s)


def verify_circuit(g: Graph, phi: float, steps: int, psi0: Optional[np.ndarray] = None) -> dict:
    """Run ``steps`` circuit passes and compare against the walk engine.

    Returns a report with the maximum per-amplitude deviation of the edge
    register, the largest stray ancilla amplitude and the oracle query count.
    """
    if steps < 0:
        raise InvalidParameterError("steps must be non-negative")
    if psi0 is None:
        psi0 = np.full(g.dim, 1.0 / np.sqrt(g.dim), dtype=complex)
    circ = WalkCircuit(g, phi)
    state = CircuitState.from_walk_state(g, psi0)
    op = StepOperator(g, phi)
    psi = np.asarray(psi0, dtype=complex)
    max_dev = max_anc = 0.0
    for _ in range(steps):
        state = circ.step(state)
        psi = evolve(op, psi, 1)
        max_dev = max(max_dev, float(np.max(np.abs(state.edge_component() - psi))))
        max_anc = max(max_anc, state.ancilla_residual())
    fam = g.family
    return {
        "family": type(fam).__name__.lower() if fam else None,
        "params": dict(fam.__dict__) if fam else {"n": g.n_vertices},
        "phi": float(phi),
        "steps": steps,
        "max_abs_dev": max_dev,
        "ancilla_residual": max_anc,
        "oracle_calls": circ.oracle_calls,
        "passed": bool(max_dev <= TOL.circuit and max_anc <= TOL.circuit and circ.oracle_calls == 2 * steps),
    }
