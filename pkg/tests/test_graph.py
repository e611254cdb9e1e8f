import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatterwalk.errors import InvalidArgumentError, InvalidGraphError, InvalidParameterError, UnsupportedError
from scatterwalk.graph import (
    Bipartite,
    Complete,
    Graph,
    MPartite,
    bipartite_graph,
    complete_graph,
    mpartite_graph,
    neighbors,
    neighbors_excluding,
    validate_graph,
)


def test_complete_graph_counts():
    g = complete_graph(7, 2)
    assert len(g.edges) == 21
    assert g.dim == 42
    assert g.specials == {0, 1}
    assert g.family == Complete(7, 2)


def test_smallest_complete_graph():
    g = complete_graph(2, 1)
    assert g.edges == {(0, 1)}
    assert g.dim == 2


def test_complete_dim_matches_enumeration():
    N = 5
    directed = [(a, b) for a in range(N) for b in range(N) if a != b]
    g = complete_graph(N, 1)
    assert list(g.index) == sorted(directed)
    assert g.dim == 20


@pytest.mark.parametrize("N,v", [(1, 1), (4, 5), (4, 0)])
def test_complete_graph_rejects_bad_parameters(N, v):
    with pytest.raises(InvalidParameterError):
        complete_graph(N, v)


def test_bipartite_counts_and_specials():
    g = bipartite_graph(3, 4, 1, 1)
    assert len(g.edges) == 12 and g.dim == 24
    assert g.specials == {0, 3}
    assert all(a < 3 <= b for a, b in g.edges)
    assert len(bipartite_graph(1, 1, 1, 0).edges) == 1
    assert len(bipartite_graph(64, 64, 1, 1).edges) == 4096


def test_bipartite_needs_a_special_vertex():
    with pytest.raises(InvalidParameterError):
        bipartite_graph(3, 3, 0, 0)


def test_mpartite_counts():
    assert len(mpartite_graph(3, 2).edges) == 12
    with pytest.raises(UnsupportedError):
        mpartite_graph(3, 2, v=2)
    with pytest.raises(InvalidParameterError):
        mpartite_graph(1, 4)


def test_mpartite_degenerate_cases():
    assert mpartite_graph(2, 3) == bipartite_graph(3, 3, 1, 0)
    assert mpartite_graph(3, 1) == complete_graph(3, 1)
    for N in range(1, 6):
        assert mpartite_graph(2, N).edges == bipartite_graph(N, N, 1, 0).edges
    for M in range(2, 8):
        assert mpartite_graph(M, 1) == complete_graph(M, 1)


def test_neighbors():
    assert len(neighbors(complete_graph(5, 1), 2)) == 4
    g = bipartite_graph(3, 4, 1, 1)
    assert len(neighbors(g, 0)) == 4
    assert len(neighbors(g, 5)) == 3
    assert neighbors_excluding(g, 0, 4) == neighbors(g, 0) - {4}
    with pytest.raises(InvalidArgumentError):
        neighbors_excluding(g, 0, 1)


@pytest.mark.parametrize("g", [complete_graph(6, 2), bipartite_graph(3, 5, 1, 2), mpartite_graph(4, 3)])
def test_index_round_trip(g):
    idx = g.index
    for pos in range(len(idx)):
        assert idx.position(*idx[pos]) == pos
    assert np.array_equal(idx.reverse[idx.reverse], np.arange(len(idx)))
    assert np.array_equal(idx.tails[idx.reverse], idx.heads)
    codes = idx.tails * g.n_vertices + idx.heads
    assert np.all(np.diff(codes) > 0)
    with pytest.raises(KeyError):
        idx.position(0, 0)


def test_validator_over_family_grid():
    for N in range(2, 13):
        for v in (1, N // 2, N):
            if v >= 1:
                validate_graph(complete_graph(N, v))
    for N1, N2 in itertools.product(range(1, 7), repeat=2):
        validate_graph(bipartite_graph(N1, N2, 1, 0))
    for M in range(2, 6):
        for N in range(1, 5):
            validate_graph(mpartite_graph(M, N))


def test_validator_catches_wrong_family_tag():
    g = Graph(4, frozenset({(0, 1), (1, 2)}), frozenset({0}), Complete(4, 1))
    with pytest.raises(InvalidGraphError):
        validate_graph(g)
    g = Graph(4, frozenset({(0, 1), (2, 3)}), frozenset({0}), Bipartite(2, 2, 1, 0))
    with pytest.raises(InvalidGraphError):
        validate_graph(g)
    g = Graph(2, frozenset({(0, 1)}), frozenset({0}), MPartite(2, 1))
    validate_graph(g)


def test_graph_rejects_bad_edges():
    with pytest.raises(InvalidGraphError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(InvalidGraphError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InvalidGraphError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(InvalidGraphError):
        Graph.from_edges(3, [(0, 1)], specials=[5])


@pytest.mark.parametrize("g", [complete_graph(4, 2), bipartite_graph(2, 3, 1, 1), mpartite_graph(3, 2)])
def test_json_round_trip(g):
    data = json.loads(g.to_json())
    assert set(data) == {"n", "edges", "specials", "family"}
    back = Graph.from_json(g.to_json())
    assert back == g and back.family == g.family


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
                        min_size=1))))
def test_arbitrary_graph_index_is_consistent(case):
    n, pairs = case
    edges = {(min(a, b), max(a, b)) for a, b in pairs}
    g = Graph.from_edges(n, edges)
    assert g.dim == 2 * len(edges)
    assert g.degrees.sum() == g.dim
    for a, b in edges:
        assert g.index.reverse[g.index.position(a, b)] == g.index.position(b, a)
