"""Collapsed (invariant-subspace) models of the walk for the symmetric families.

Every automorphism fixing the special vertices permutes directed edges inside
a handful of classes. The normalized sum over each class, ``|w_j>``, spans a
subspace that the step operator maps into itself, so the walk from any
symmetric start state is described by a small unitary matrix acting on the
coefficients of the ``|w_j>``.

Each model's matrix is written out from closed-form coefficients and, unless
``validate=False``, checked against the full edge-space operator at build
time by lifting every ``|w_j>``, stepping it and projecting back.
"""

from __future__ import annotations

import copy
import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from .config import TOL
from .errors import InvalidParameterError, TranscriptionError, UnsupportedError
from .graph import Graph, bipartite_graph, complete_graph, mpartite_graph
from .walkcore import StepOperator

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CollapsedBasisVector:
    """Normalized equal superposition of a class of directed edges."""

    label: str
    tails: np.ndarray
    heads: np.ndarray

    @property
    def size(self) -> int:
        return len(self.tails)

    @property
    def weight(self) -> float:
        return 1.0 / math.sqrt(self.size)

    @property
    def members(self) -> list[tuple[int, int]]:
        return list(zip(self.tails.tolist(), self.heads.tolist()))


@dataclass(frozen=True)
class EigenSystem:
    """Spectral data of a collapsed matrix, sorted by eigenvalue phase.

    ``vectors`` holds orthonormal eigenvectors as columns. ``ok`` is False when
    the Schur form is not diagonal within tolerance (non-normal input), in
    which case callers fall back to repeated multiplication.
    """

    values: np.ndarray
    vectors: np.ndarray
    ok: bool = True

    def overlaps(self, c0: np.ndarray) -> np.ndarray:
        return self.vectors.conj().T @ c0


@dataclass(eq=False)
class CollapsedModel:
    family: str
    graph: Graph
    phi: float
    basis: list[CollapsedBasisVector]
    matrix: np.ndarray
    params: dict
    step_multiplicity: int = 1
    dropped: tuple[str, ...] = ()
    _positions: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        idx = self.graph.index
        self._positions = [idx.positions(b.tails, b.heads) for b in self.basis]

    @property
    def labels(self) -> list[str]:
        return [b.label for b in self.basis]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def label_index(self, label: str) -> int:
        return self.labels.index(label)

    def eigensystem(self) -> EigenSystem:
        return eigensystem(self.matrix)

    def lift(self, components: np.ndarray) -> np.ndarray:
        """Map collapsed coefficients back to a full edge-space vector."""
        psi = np.zeros(self.graph.dim, dtype=complex)
        for c, b, pos in zip(components, self.basis, self._positions):
            psi[pos] = c * b.weight
        return psi

    def project(self, psi: np.ndarray) -> tuple[np.ndarray, float]:
        comps = np.array([np.sum(psi[pos]) * b.weight for b, pos in zip(self.basis, self._positions)],
                         dtype=complex)
        residual = float(np.linalg.norm(psi - self.lift(comps)))
        return comps, residual

    def class_weights(self, edge_mask: np.ndarray) -> np.ndarray:
        """Fraction of each basis vector's members selected by ``edge_mask``.

        For masks that respect the symmetry every entry is exactly 0 or 1.
        """
        return np.array([edge_mask[pos].mean() for pos in self._positions])

    def full_space_matrix(self, op: Optional[StepOperator] = None) -> tuple[np.ndarray, float]:
        """Matrix of ``U**step_multiplicity`` on the basis, computed in full space.

        Returns the matrix and the largest closure residual over basis vectors.
        """
        op = op or StepOperator(self.graph, self.phi)
        cols, worst = [], 0.0
        for j in range(self.dim):
            e = np.zeros(self.dim, dtype=complex)
            e[j] = 1.0
            psi = self.lift(e)
            for _ in range(self.step_multiplicity):
                psi = op.apply(psi)
            comps, res = self.project(psi)
            cols.append(comps)
            worst = max(worst, res)
        return np.column_stack(cols), worst

    def validate(self, tol: float = TOL.collapse, on_mismatch: str = "raise") -> float:
        """Compare the transcribed matrix with the full-space operator.

        Returns the max entry deviation. With ``on_mismatch="replace"`` the
        full-space matrix is adopted instead of raising.
        """
        ref, residual = self.full_space_matrix()
        dev = float(np.max(np.abs(ref - self.matrix)))
        if dev > tol or residual > tol:
            diff = np.array2string(ref - self.matrix, precision=3, suppress_small=True)
            log.error("collapsed %s matrix mismatch (max %.3e, closure residual %.3e):\n%s",
                      self.family, dev, residual, diff)
            if on_mismatch != "replace" or residual > tol:
                raise TranscriptionError(
                    f"{self.family} collapsed matrix deviates from full space by {dev:.3e} "
                    f"(closure residual {residual:.3e})")
            self.matrix = ref
        return dev

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "phi": self.phi,
            "step_multiplicity": self.step_multiplicity,
            "basis": [{"label": b.label, "size": b.size} for b in self.basis],
            "dropped": list(self.dropped),
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
            "params": {k: float(v) for k, v in self.params.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def eigensystem(matrix: np.ndarray, tol: float = TOL.eigen) -> EigenSystem:
    # complex Schur form of a normal matrix is diagonal with a unitary factor,
    # which keeps eigenvectors orthonormal even inside degenerate eigenspaces
    T, Z = scipy.linalg.schur(np.asarray(matrix, dtype=complex), output="complex")
    off = T - np.diag(np.diag(T))
    ok = bool(np.max(np.abs(off), initial=0.0) <= tol)
    values = np.diag(T).copy()
    order = np.argsort(np.angle(values), kind="stable")
    return EigenSystem(values[order], Z[:, order], ok)


def _build(family: str, graph: Graph, phi: float, classes: list[tuple[str, np.ndarray]],
           columns: dict[str, dict[str, complex]], params: dict, step_multiplicity: int = 1,
           validate: bool = True) -> CollapsedModel:
    idx = graph.index
    basis, dropped = [], []
    for label, mask in classes:
        if mask.any():
            basis.append(CollapsedBasisVector(label, idx.tails[mask], idx.heads[mask]))
        else:
            dropped.append(label)
    if not basis:
        raise InvalidParameterError(f"{family} model has no non-empty basis vectors for these parameters")
    labels = [b.label for b in basis]
    mat = np.zeros((len(labels), len(labels)), dtype=complex)
    for j, src in enumerate(labels):
        for dst, coeff in columns.get(src, {}).items():
            if dst in labels:
                mat[labels.index(dst), j] = coeff
    model = CollapsedModel(family, graph, float(phi), basis, mat, params, step_multiplicity, tuple(dropped))
    if validate:
        model.validate()
    return model


def complete_matrix(N: int, v: int, phi: float) -> np.ndarray:
    """4x4 step matrix on (w1, w2, w3, w4) for the complete graph."""
    q = -1.0 + 2.0 * v / (N - 1)
    s = math.sqrt(max(0.0, 1.0 - q * q))
    e = np.exp(1j * phi)
    return np.array([
        [0, q, s, 0],
        [e, 0, 0, 0],
        [0, s, -q, 0],
        [0, 0, 0, e],
    ], dtype=complex)


def complete_model(N: int, v: int, phi: float = np.pi, validate: bool = True) -> CollapsedModel:
    """Model on w1 (normal->special), w2 (special->normal), w3 (normal->normal), w4 (special->special).

    w4 is empty and dropped when ``v == 1``; w3 is dropped when ``v == N - 1``.
    """
    if not 1 <= v < N:
        raise InvalidParameterError(f"complete model needs 1 <= v < N, got N={N}, v={v}")
    g = complete_graph(N, v)
    idx = g.index
    ts, hs = g.special_mask[idx.tails], g.special_mask[idx.heads]
    classes = [("w1", ~ts & hs), ("w2", ts & ~hs), ("w3", ~ts & ~hs), ("w4", ts & hs)]
    t = 2.0 / (N - 1)
    q = -1.0 + 2.0 * v / (N - 1)
    # s = t * sqrt(v (N - v - 1)) equals sqrt(1 - q^2)
    s = t * math.sqrt(v * (N - v - 1))
    e = np.exp(1j * phi)
    columns = {
        "w1": {"w2": e},
        "w2": {"w1": q, "w3": s},
        "w3": {"w1": s, "w3": -q},
        "w4": {"w4": e},
    }
    return _build("complete", g, phi, classes, columns, {"q": q, "s": s, "t": t, "r": 1 - t}, validate=validate)


def bipartite_params(N1: int, N2: int, v1: int, v2: int) -> dict:
    p1, p2 = N1 - v1, N2 - v2
    t1, t2 = 2.0 / N2, 2.0 / N1
    r1, r2 = 1.0 - t1, 1.0 - t2
    return {
        "t1": t1, "r1": r1, "t2": t2, "r2": r2,
        "q1": -r1 + t1 * (v2 - 1), "s1": t1 * math.sqrt(v2 * p2),
        "q2": -r2 + t2 * (v1 - 1), "s2": t2 * math.sqrt(v1 * p1),
        "x1": 2.0 * v1 / N1, "x2": 2.0 * v2 / N2,
    }


def _bipartite_classes(g: Graph, N1: int) -> list[tuple[str, np.ndarray]]:
    idx = g.index
    ts, hs = g.special_mask[idx.tails], g.special_mask[idx.heads]
    into1 = idx.heads < N1
    into2 = ~into1
    return [
        ("w01", into1 & ts & hs),
        ("w02", into2 & ts & hs),
        ("w11", into1 & ~ts & hs),
        ("w12", into1 & ts & ~hs),
        ("w13", into1 & ~ts & ~hs),
        ("w21", into2 & ts & ~hs),
        ("w22", into2 & ~ts & hs),
        ("w23", into2 & ~ts & ~hs),
    ]


def bipartite_model(N1: int, N2: int, v1: int, v2: int, phi: float = np.pi,
                    validate: bool = True) -> CollapsedModel:
    """One-step model on (w01, w02, w11, w12, w13, w21, w22, w23).

    ``w1*`` vectors enter set 1 and ``w2*`` vectors enter set 2; w01/w02 join
    the special vertices of both sets and decouple from the rest. Empty
    classes (e.g. all of set 1 special) are dropped and listed in ``dropped``.
    """
    g = bipartite_graph(N1, N2, v1, v2)
    p1, p2 = N1 - v1, N2 - v2
    P = bipartite_params(N1, N2, v1, v2)
    e = np.exp(1j * phi)
    columns = {
        "w01": {"w02": e},
        "w02": {"w01": e},
        "w11": {"w21": e},
        "w12": {"w22": P["q1"], "w23": P["s1"]},
        "w13": {"w23": P["t1"] * (p2 - 1) - P["r1"], "w22": P["s1"]},
        "w21": {"w11": P["q2"], "w13": P["s2"]},
        "w22": {"w12": e},
        # a normal set-2 vertex transmits onto the p1 - 1 other normal set-1 vertices
        "w23": {"w13": P["t2"] * (p1 - 1) - P["r2"], "w11": P["s2"]},
    }
    return _build("bipartite", g, phi, _bipartite_classes(g, N1), columns, P, validate=validate)


def bipartite_two_step_model(N1: int, N2: int, v1: int, v2: int, phi: float = np.pi,
                             validate: bool = True) -> CollapsedModel:
    """Two-step matrix ``U^2`` restricted to the set-2 subspace (w21, w22, w23); phi = pi only."""
    if not math.isclose(phi, math.pi, rel_tol=0, abs_tol=1e-12):
        raise UnsupportedError("the two-step bipartite model is only defined for phi = pi")
    g = bipartite_graph(N1, N2, v1, v2)
    P = bipartite_params(N1, N2, v1, v2)
    q1, s1, q2, s2 = P["q1"], P["s1"], P["q2"], P["s2"]
    classes = [c for c in _bipartite_classes(g, N1) if c[0] in ("w21", "w22", "w23")]
    columns = {
        "w21": {"w21": -q2, "w22": s1 * s2, "w23": -q1 * s2},
        "w22": {"w22": -q1, "w23": -s1},
        "w23": {"w21": -s2, "w22": -q2 * s1, "w23": q1 * q2},
    }
    return _build("bipartite-two-step", g, phi, classes, columns, P, step_multiplicity=2, validate=validate)


MPARTITE_LABELS = ("w1", "w2", "w3", "w4", "w5")


def _matrix_columns(mat: np.ndarray, labels: tuple[str, ...]) -> dict[str, dict[str, complex]]:
    return {src: {dst: mat[i, j] for i, dst in enumerate(labels) if mat[i, j] != 0} for j, src in enumerate(labels)}


def mpartite_matrix(M: int, N: int, phi: float = np.pi) -> np.ndarray:
    """5x5 step matrix on (w1..w5) for the M-partite graph; needs no graph, so any size works."""
    if M < 3:
        raise UnsupportedError("M-partite model needs M >= 3; use bipartite_model for M = 2")
    t = 2.0 / (N * (M - 1))
    r = 1.0 - t
    e = np.exp(1j * phi)
    a = t * math.sqrt(N - 1)
    b = t * math.sqrt(N * (M - 2))
    c = t * math.sqrt(N * (N - 1) * (M - 2))
    # columns are the images U|w_j>
    return np.array([
        [0, -r, a, 0, b],
        [e, 0, 0, 0, 0],
        [0, 0, 0, 1, 0],
        [0, a, -(N * (M - 3) + 2) / (N * (M - 1)), 0, c],
        [0, b, c, 0, (M - 3) / (M - 1)],
    ], dtype=complex)


def mpartite_model(M: int, N: int, phi: float = np.pi, validate: bool = True) -> CollapsedModel:
    """Model on w1..w5 for the M-partite graph with special vertex (0, 0).

    w1/w2 enter/leave the special vertex, w3/w4 leave/enter the normal
    vertices of its set, and w5 collects every edge between the other sets.
    """
    if M < 3:
        raise UnsupportedError("M-partite model needs M >= 3; use bipartite_model for M = 2")
    g = mpartite_graph(M, N)
    idx = g.index
    tail_home, head_home = idx.tails // N == 0, idx.heads // N == 0
    ts, hs = idx.tails == 0, idx.heads == 0
    classes = [
        ("w1", hs),
        ("w2", ts),
        ("w3", tail_home & ~ts),
        ("w4", head_home & ~hs),
        ("w5", ~tail_home & ~head_home),
    ]
    t = 2.0 / (N * (M - 1))
    columns = _matrix_columns(mpartite_matrix(M, N, phi), MPARTITE_LABELS)
    return _build("mpartite", g, phi, classes, columns, {"t": t, "r": 1.0 - t}, validate=validate)


def project(psi: np.ndarray, model: CollapsedModel) -> tuple[np.ndarray, float]:
    return model.project(psi)


def matrix_trajectory(matrix: np.ndarray, c0: np.ndarray, n_max: int) -> np.ndarray:
    """Rows ``0..n_max`` of ``matrix**n @ c0`` computed from one eigendecomposition."""
    c0 = np.asarray(c0, dtype=complex)
    if n_max == 0:
        return c0[None, :].copy()
    es = eigensystem(matrix)
    if not es.ok:
        warnings.warn("collapsed matrix is not diagonalizable within tolerance; "
                      "using repeated multiplication", RuntimeWarning)
        out = np.empty((n_max + 1, len(c0)), dtype=complex)
        out[0] = c0
        for n in range(n_max):
            out[n + 1] = matrix @ out[n]
        return out
    powers = es.values[None, :] ** np.arange(n_max + 1)[:, None]
    out = (powers * es.overlaps(c0)[None, :]) @ es.vectors.T
    out[0] = c0
    return out


def collapsed_trajectory(model: CollapsedModel, c0: np.ndarray, n_max: int) -> np.ndarray:
    """Collapsed coefficients after ``0..n_max`` applications of the model matrix."""
    return matrix_trajectory(model.matrix, c0, n_max)


def rephased(model: CollapsedModel, phi: float) -> CollapsedModel:
    """Same basis at another phase, without rebuilding or revalidating.

    Only the complete and M-partite matrices are available in closed form;
    other families raise ``UnsupportedError`` and must be rebuilt.
    """
    if model.family == "complete":
        full = complete_matrix(model.graph.family.N, model.graph.family.v, phi)
        keep = [("w1", "w2", "w3", "w4").index(lab) for lab in model.labels]
    elif model.family == "mpartite":
        full = mpartite_matrix(model.graph.family.M, model.graph.family.N, phi)
        keep = [MPARTITE_LABELS.index(lab) for lab in model.labels]
    else:
        raise UnsupportedError(f"no closed-form matrix for the {model.family} family")
    out = copy.copy(model)
    out.phi = float(phi)
    out.matrix = full[np.ix_(keep, keep)]
    return out


def evolve_collapsed(model: CollapsedModel, c0: np.ndarray, n: int) -> np.ndarray:
    """``matrix**n @ c0`` as a sum over eigenvectors weighted by ``lambda**n``.

    For the two-step bipartite model ``n`` counts double steps.
    """
    if n < 0:
        raise InvalidParameterError("step count must be non-negative")
    return collapsed_trajectory(model, c0, n)[n]


def evolve_repeated(model: CollapsedModel, c0: np.ndarray, n: int) -> np.ndarray:
    c = np.asarray(c0, dtype=complex)
    for _ in range(n):
        c = model.matrix @ c
    return c


# closed-form asymptotics ---------------------------------------------------

def theta_complete(N: int, v: int) -> float:
    """Rotation angle per step; exactly ``arccos(1 - v/(N-1))``."""
    return math.atan2(math.sqrt(v * (2 * N - v - 2)), N - v - 1)


def complete_step_count(N: int, v: int) -> int:
    return round(math.pi / (2 * theta_complete(N, v)))


def closed_form_complete(N: int, v: int, n: int) -> np.ndarray:
    """Large-N approximation of the (w1, w2, w3, w4) amplitudes after n steps at phi = pi.

    The dropped eigenvalue -1 component leaves an error of order sqrt(v/N) in
    the first two entries.
    """
    th = theta_complete(N, v)
    pre = 1.0 / (2.0 * math.sqrt(N * v))
    a = math.sqrt(2.0 * v * (N - 1))
    return pre * np.array([
        a * math.sin((2 * n + 1) * th / 2),
        -a * math.sin((2 * n - 1) * th / 2),
        2.0 * math.sqrt(v * (N - v - 1)) * math.cos(n * th),
        0.0,
    ])


def bipartite_theta(N1: int, N2: int, v1: int, v2: int) -> float:
    """Rotation angle of the two-step matrix per application: ``sqrt(2 (x1 + x2))``.

    One application is two walk steps, so the per-step angle is half of this.
    """
    x1, x2 = 2.0 * v1 / N1, 2.0 * v2 / N2
    if x1 + x2 == 0:
        raise InvalidParameterError("no special vertices")
    return math.sqrt(2.0 * (x1 + x2))


def bipartite_theta_single(N1: int, N2: int) -> float:
    """Same angle written for one special vertex per set: ``2 sqrt(1/N1 + 1/N2)``."""
    return 2.0 * math.sqrt(1.0 / N1 + 1.0 / N2)


def bipartite_double_steps(N1: int, N2: int, v1: int, v2: int) -> int:
    """Applications of the two-step matrix needed to rotate onto special edges."""
    return round(math.pi / (2.0 * bipartite_theta(N1, N2, v1, v2)))


def bipartite_step_count(N1: int, N2: int, v1: int, v2: int) -> int:
    """Walk steps (always even) at which the set-2 start concentrates on special edges."""
    return 2 * bipartite_double_steps(N1, N2, v1, v2)


def bipartite_split(N1: int, N2: int, v1: int, v2: int) -> tuple[float, float]:
    x1, x2 = 2.0 * v1 / N1, 2.0 * v2 / N2
    if x1 + x2 == 0:
        raise InvalidParameterError("no special vertices")
    return x1 / (x1 + x2), x2 / (x1 + x2)


def closed_form_bipartite(N1: int, N2: int, v1: int, v2: int, n: int) -> np.ndarray:
    """Approximate (w21, w22, w23) amplitudes after ``n`` double steps from the set-2 start."""
    th = bipartite_theta(N1, N2, v1, v2)
    f1, f2 = bipartite_split(N1, N2, v1, v2)
    return np.array([
        -math.sqrt(f1) * math.sin(n * th),
        math.sqrt(f2) * math.sin(n * th),
        math.cos(n * th),
    ])


def mpartite_angle(M: int, N: int) -> float:
    return math.acos(1.0 - 1.0 / (M * N))


def mpartite_step_count(M: int, N: int) -> int:
    return round((math.pi / 2) / mpartite_angle(M, N))


def closed_form_mpartite(M: int, N: int, n: int) -> np.ndarray:
    """Approximate (w1..w5) amplitudes after n steps for large M, N at phi = pi."""
    a = mpartite_angle(M, N)
    return np.array([math.sin(n * a), -math.sin(n * a), 0.0, 0.0, math.sqrt(2) * math.cos(n * a)]) / math.sqrt(2)


MODEL_BUILDERS: dict[str, Callable[..., CollapsedModel]] = {
    "complete": complete_model,
    "bipartite": bipartite_model,
    "mpartite": mpartite_model,
}
