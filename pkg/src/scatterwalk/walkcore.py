"""Full edge-space scattering walk.

A walk state is a complex numpy vector indexed by ``graph.index``. One step
scatters the amplitude arriving at every vertex ``l`` on edge ``(k, l)``:
a fraction ``-r`` is reflected back onto ``(l, k)`` and ``t`` is transmitted
onto every other outgoing edge ``(l, m)``.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import Iterator, Optional, TextIO

import numpy as np

from .config import TOL
from .errors import DimensionError, InvalidFamilyError, InvalidGraphError, InvalidParameterError, TooLargeError
from .graph import Bipartite, Graph


class Criterion(str, enum.Enum):
    """Which edges count as "found a special vertex" on measurement."""

    INCIDENT = "incident"  # either endpoint special
    ENTERING = "entering"  # head special
    LEAVING = "leaving"  # tail special


@dataclass(frozen=True)
class ScatterCoeffs:
    r: complex
    t: float


def normal_coeffs(degree: int) -> ScatterCoeffs:
    if degree < 1:
        raise InvalidGraphError("isolated vertex has no scattering rule")
    t = 2.0 / degree
    return ScatterCoeffs(1.0 - t, t)


def special_coeffs(phi: float) -> ScatterCoeffs:
    return ScatterCoeffs(-np.exp(1j * phi), 0.0)


def scatter_coeffs(g: Graph, l: int, phi: float) -> ScatterCoeffs:
    if not 0 <= l < g.n_vertices:
        raise InvalidParameterError(f"vertex {l} out of range")
    degree = int(g.degrees[l])
    if degree < 1:
        raise InvalidGraphError(f"vertex {l} is isolated")
    if l in g.specials:
        return special_coeffs(phi)
    return normal_coeffs(degree)


class StepOperator:
    """Step unitary of the scattering walk, applied without materializing it.

    Parameters
    ----------
    graph : Graph
    phi : float
        Reflection phase at special vertices.
    r, t : array_like, optional
        Per-vertex overrides of the reflection/transmission coefficients. By
        default normal vertices get ``t = 2/deg``, ``r = 1 - t`` and special
        vertices ``r = -exp(i phi)``, ``t = 0``.
    """

    def __init__(self, graph: Graph, phi: float = np.pi, r=None, t=None):
        if np.any(graph.degrees == 0):
            raise InvalidGraphError("graph has an isolated vertex")
        self.graph = graph
        self.phi = float(phi)
        deg = graph.degrees.astype(float)
        if t is None:
            t = np.where(graph.special_mask, 0.0, 2.0 / deg)
        if r is None:
            r = np.where(graph.special_mask, -np.exp(1j * self.phi), 1.0 - 2.0 / deg)
        self.t = np.asarray(t, dtype=float)
        self.r = np.asarray(r, dtype=complex)
        tails = graph.index.tails
        # per-edge coefficients of: out(l,m) = t_l * S(l) - (t_l + r_l) * in(m,l)
        self._t_edge = self.t[tails]
        self._c_edge = (self.t + self.r)[tails]

    @property
    def dim(self) -> int:
        return len(self.graph.index)

    def coeffs(self, l: int) -> ScatterCoeffs:
        return ScatterCoeffs(complex(self.r[l]), float(self.t[l]))

    def conjugate(self) -> "StepOperator":
        return StepOperator(self.graph, -self.phi, r=np.conj(self.r), t=self.t)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """Apply one step to a state vector or to the columns of a matrix."""
        psi = np.asarray(psi)
        if psi.shape[0] != self.dim:
            raise DimensionError(f"state has length {psi.shape[0]}, operator acts on {self.dim}")
        idx = self.graph.index
        incoming = psi[idx.reverse]
        totals = np.add.reduceat(incoming, idx.tail_starts, axis=0)
        t_e, c_e = self._t_edge, self._c_edge
        if psi.ndim == 2:
            t_e, c_e = t_e[:, None], c_e[:, None]
        return t_e * totals[idx.tails] - c_e * incoming

    __call__ = apply


def apply_step(op: StepOperator, psi: np.ndarray) -> np.ndarray:
    return op.apply(psi)


def evolve(op: StepOperator, psi: np.ndarray, n: int) -> np.ndarray:
    if n < 0:
        raise InvalidParameterError("step count must be non-negative")
    out = np.array(psi, dtype=complex, copy=True)
    for _ in range(n):
        out = op.apply(out)
    return out


def trajectory(op: StepOperator, psi: np.ndarray, n: int) -> Iterator[np.ndarray]:
    """Yield ``psi, U psi, ..., U^n psi``."""
    cur = np.array(psi, dtype=complex, copy=True)
    yield cur
    for _ in range(n):
        cur = op.apply(cur)
        yield cur


def uniform_initial_state(g: Graph) -> np.ndarray:
    if not g.edges:
        raise InvalidGraphError("graph has no edges")
    return np.full(g.dim, 1.0 / np.sqrt(g.dim), dtype=complex)


def bipartite_entering_state(g: Graph, target_set: int = 2) -> np.ndarray:
    """Equal superposition of every directed edge whose head lies in ``target_set``."""
    if not isinstance(g.family, Bipartite):
        raise InvalidFamilyError("entering-set state needs a bipartite graph")
    if target_set not in (1, 2):
        raise InvalidParameterError("target_set must be 1 or 2")
    n1 = g.family.N1
    heads = g.index.heads
    mask = heads >= n1 if target_set == 2 else heads < n1
    psi = mask.astype(complex)
    return psi / np.sqrt(mask.sum())


def criterion_mask(g: Graph, criterion: Criterion = Criterion.INCIDENT) -> np.ndarray:
    criterion = Criterion(criterion)
    idx = g.index
    head_special = g.special_mask[idx.heads]
    tail_special = g.special_mask[idx.tails]
    if criterion is Criterion.ENTERING:
        return head_special
    if criterion is Criterion.LEAVING:
        return tail_special
    return head_special | tail_special


def success_probability(psi: np.ndarray, g: Graph, criterion: Criterion = Criterion.INCIDENT) -> float:
    return float(np.sum(np.abs(psi[criterion_mask(g, criterion)]) ** 2))


def check_normalized(psi: np.ndarray, tol: float = TOL.norm) -> None:
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > tol:
        raise InvalidParameterError(f"state norm {norm!r} differs from 1 by more than {tol}")


def materialize_unitary(op: StepOperator, cap: Optional[int] = None) -> np.ndarray:
    """Dense matrix of the step operator; column ``j`` is ``U e_j``."""
    cap = TOL.materialize_cap if cap is None else cap
    if op.dim > cap:
        raise TooLargeError(f"dimension {op.dim} exceeds the materialization cap {cap}")
    return op.apply(np.eye(op.dim, dtype=complex))


def write_state_csv(fh: TextIO, g: Graph, psi: np.ndarray) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["from", "to", "re", "im"])
    for (a, b), amp in zip(g.index, psi):
        w.writerow([a, b, repr(float(amp.real)), repr(float(amp.imag))])


def read_state_csv(fh: TextIO, g: Graph) -> np.ndarray:
    psi = np.zeros(g.dim, dtype=complex)
    for row in csv.DictReader(fh):
        psi[g.index.position(int(row["from"]), int(row["to"]))] = complex(float(row["re"]), float(row["im"]))
    return psi
