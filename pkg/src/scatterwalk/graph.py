"""Graph families and the canonical directed-edge basis.

Vertices are 0-based contiguous integers. Special vertices are always placed
first within their set, so vertex ``k`` here is vertex ``k + 1`` in 1-based
numbering. The directed-edge basis is sorted lexicographically by
``(tail, head)`` and every module indexes walk states through it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Union

import numpy as np

from .errors import InvalidArgumentError, InvalidGraphError, InvalidParameterError, UnsupportedError

DirectedEdge = tuple[int, int]


@dataclass(frozen=True)
class Complete:
    N: int
    v: int


@dataclass(frozen=True)
class Bipartite:
    N1: int
    N2: int
    v1: int
    v2: int

    @property
    def p1(self) -> int:
        return self.N1 - self.v1

    @property
    def p2(self) -> int:
        return self.N2 - self.v2


@dataclass(frozen=True)
class MPartite:
    M: int
    N: int
    v: int = 1


Family = Union[Complete, Bipartite, MPartite]

_FAMILY_NAMES = {Complete: "complete", Bipartite: "bipartite", MPartite: "mpartite"}
_FAMILY_TYPES = {name: cls for cls, name in _FAMILY_NAMES.items()}


class EdgeIndex:
    """Lexicographically ordered list of directed edges with O(log E) lookup.

    Attributes
    ----------
    tails, heads : ndarray of int
        ``tails[i] -> heads[i]`` is the directed edge at position ``i``.
    reverse : ndarray of int
        ``reverse[i]`` is the position of the opposite orientation of edge ``i``.
    tail_starts : ndarray of int
        Start offsets of each vertex's block of outgoing edges (the basis is
        grouped by tail because of the sort order).
    """

    def __init__(self, n_vertices: int, edges: Iterable[tuple[int, int]]):
        pairs = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
        both = np.concatenate([pairs, pairs[:, ::-1]], axis=0)
        codes = both[:, 0] * n_vertices + both[:, 1]
        order = np.argsort(codes, kind="stable")
        self.n_vertices = n_vertices
        self.tails = both[order, 0]
        self.heads = both[order, 1]
        self._codes = codes[order]
        self.reverse = self.positions(self.heads, self.tails)
        self.tail_starts = np.searchsorted(self.tails, np.arange(n_vertices))

    def __len__(self) -> int:
        return len(self.tails)

    def __getitem__(self, pos: int) -> DirectedEdge:
        return int(self.tails[pos]), int(self.heads[pos])

    def __iter__(self):
        return zip(self.tails.tolist(), self.heads.tolist())

    def position(self, tail: int, head: int) -> int:
        code = tail * self.n_vertices + head
        pos = int(np.searchsorted(self._codes, code))
        if pos >= len(self._codes) or self._codes[pos] != code:
            raise KeyError((tail, head))
        return pos

    def positions(self, tails, heads) -> np.ndarray:
        codes = np.asarray(tails, dtype=np.int64) * self.n_vertices + np.asarray(heads, dtype=np.int64)
        pos = np.searchsorted(self._codes, codes)
        pos = np.minimum(pos, len(self._codes) - 1)
        if not np.array_equal(self._codes[pos], codes):
            raise KeyError("one or more directed edges are not in the graph")
        return pos


@dataclass(frozen=True, eq=True)
class Graph:
    """Simple undirected graph with a set of special (marked) vertices.

    Two graphs compare equal when their vertex count, edge set and special set
    agree; the family tag is informational only.
    """

    n_vertices: int
    edges: frozenset
    specials: frozenset
    family: Optional[Family] = field(default=None, compare=False)

    def __post_init__(self):
        for e in self.edges:
            a, b = e
            if a == b:
                raise InvalidGraphError(f"self-loop at vertex {a}")
            if not (0 <= a < b < self.n_vertices):
                raise InvalidGraphError(f"edge {e} is not a normalized pair of valid vertex ids")
        for s in self.specials:
            if not (0 <= s < self.n_vertices):
                raise InvalidGraphError(f"special vertex {s} out of range")

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[tuple[int, int]], specials: Iterable[int] = (),
                   family: Optional[Family] = None) -> "Graph":
        """Build a graph from possibly unnormalized pairs; duplicates are rejected."""
        norm = []
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                raise InvalidGraphError(f"self-loop at vertex {a}")
            norm.append((min(a, b), max(a, b)))
        if len(set(norm)) != len(norm):
            raise InvalidGraphError("duplicate edge")
        return cls(int(n_vertices), frozenset(norm), frozenset(int(s) for s in specials), family)

    @cached_property
    def index(self) -> EdgeIndex:
        return EdgeIndex(self.n_vertices, self.edges)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.index.tails, minlength=self.n_vertices)

    @cached_property
    def special_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[list(self.specials)] = True
        return mask

    @property
    def dim(self) -> int:
        """Dimension of the edge-state space, ``2|E|``."""
        return 2 * len(self.edges)

    def part_of(self, vertex: int) -> int:
        """0-based set number of ``vertex`` for the multipartite families."""
        fam = self.family
        if isinstance(fam, Bipartite):
            return 0 if vertex < fam.N1 else 1
        if isinstance(fam, MPartite):
            return vertex // fam.N
        raise InvalidArgumentError("part_of is only defined for bipartite and M-partite graphs")

    def to_dict(self) -> dict:
        fam = None
        if self.family is not None:
            fam = {"type": _FAMILY_NAMES[type(self.family)], **self.family.__dict__}
        return {
            "n": self.n_vertices,
            "edges": [list(e) for e in sorted(self.edges)],
            "specials": sorted(self.specials),
            "family": fam,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        fam = data.get("family")
        family = None
        if fam:
            fam = dict(fam)
            family = _FAMILY_TYPES[fam.pop("type")](**fam)
        return cls.from_edges(data["n"], data["edges"], data.get("specials", ()), family)

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        return cls.from_dict(json.loads(text))


@lru_cache(maxsize=32)
def complete_graph(N: int, v: int) -> Graph:
    """Complete graph on ``N`` vertices with vertices ``0..v-1`` special."""
    if N < 2 or not (1 <= v <= N):
        raise InvalidParameterError(f"complete_graph needs N >= 2 and 1 <= v <= N, got N={N}, v={v}")
    edges = frozenset((a, b) for a in range(N) for b in range(a + 1, N))
    return Graph(N, edges, frozenset(range(v)), Complete(N, v))


@lru_cache(maxsize=32)
def bipartite_graph(N1: int, N2: int, v1: int, v2: int) -> Graph:
    """Complete bipartite graph.

    Set 1 is ``0..N1-1`` and set 2 is ``N1..N1+N2-1``; the first ``v1`` and
    ``v2`` vertices of each set are special.
    """
    if N1 < 1 or N2 < 1 or not (0 <= v1 <= N1) or not (0 <= v2 <= N2):
        raise InvalidParameterError(f"invalid bipartite sizes N1={N1}, N2={N2}, v1={v1}, v2={v2}")
    if v1 + v2 < 1:
        raise InvalidParameterError("bipartite graph needs at least one special vertex")
    edges = frozenset((a, N1 + b) for a in range(N1) for b in range(N2))
    specials = frozenset(range(v1)) | frozenset(N1 + j for j in range(v2))
    return Graph(N1 + N2, edges, specials, Bipartite(N1, N2, v1, v2))


@lru_cache(maxsize=32)
def mpartite_graph(M: int, N: int, v: int = 1) -> Graph:
    """Complete M-partite graph with ``M`` sets of ``N`` vertices.

    Vertex ``(m, n)`` (0-based set ``m``, member ``n``) has id ``m * N + n``;
    the single special vertex is ``(0, 0)``.
    """
    if M < 2 or N < 1:
        raise InvalidParameterError(f"mpartite_graph needs M >= 2 and N >= 1, got M={M}, N={N}")
    if v != 1:
        raise UnsupportedError("only a single special vertex is supported for the M-partite family")
    edges = frozenset(
        (m1 * N + a, m2 * N + b)
        for m1 in range(M) for m2 in range(m1 + 1, M)
        for a in range(N) for b in range(N)
    )
    return Graph(M * N, edges, frozenset({0}), MPartite(M, N, v))


def neighbors(g: Graph, l: int) -> frozenset:
    idx = g.index
    lo = idx.tail_starts[l]
    hi = idx.tail_starts[l + 1] if l + 1 < g.n_vertices else len(idx)
    return frozenset(idx.heads[lo:hi].tolist())


def neighbors_excluding(g: Graph, l: int, k: int) -> frozenset:
    nb = neighbors(g, l)
    if k not in nb:
        raise InvalidArgumentError(f"{k} is not a neighbor of {l}")
    return nb - {k}


def validate_graph(g: Graph) -> None:
    """Check the generic invariants and, when tagged, the family invariants."""
    if not all(0 <= s < g.n_vertices for s in g.specials):
        raise InvalidGraphError("special vertex out of range")
    fam = g.family
    n_edges = len(g.edges)
    if isinstance(fam, Complete):
        if n_edges != fam.N * (fam.N - 1) // 2:
            raise InvalidGraphError("complete graph has the wrong edge count")
    elif isinstance(fam, Bipartite):
        if n_edges != fam.N1 * fam.N2:
            raise InvalidGraphError("bipartite graph has the wrong edge count")
        if any(g.part_of(a) == g.part_of(b) for a, b in g.edges):
            raise InvalidGraphError("bipartite graph has an intra-set edge")
    elif isinstance(fam, MPartite):
        if n_edges != fam.N * fam.N * fam.M * (fam.M - 1) // 2:
            raise InvalidGraphError("M-partite graph has the wrong edge count")
        if any(g.part_of(a) == g.part_of(b) for a, b in g.edges):
            raise InvalidGraphError("M-partite graph has an intra-set edge")
