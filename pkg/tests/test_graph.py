from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ufmatch.graph import (MINUS, PLUS, BipartiteMultigraph, Digraph, GraphError, VertexId,
                           cross_edges, degree, induced_edges)


@pytest.fixture
def k22():
    return BipartiteMultigraph.complete(2, 2)


@pytest.fixture
def path():
    # u1 - v1 - u2
    return BipartiteMultigraph.from_pairs(2, 1, [(0, 0), (1, 0)])


def test_induced_whole_graph(k22):
    assert induced_edges(k22, k22.vertices) == set(k22.edges)


def test_induced_one_side_is_empty(k22):
    assert induced_edges(k22, [k22.plus[0]]) == set()


def test_induced_on_path(path):
    u1, u2 = path.plus
    (v1,) = path.minus
    assert induced_edges(path, {u1, v1}) == {0}


def test_cross_edges_examples(k22, path):
    F = set(k22.edges)
    assert cross_edges(k22, F, k22.plus, k22.minus) == F
    assert cross_edges(k22, F, k22.plus, []) == set()
    u1, u2 = path.plus
    assert cross_edges(path, set(path.edges), {u1}, {u2}) == set()


def test_cross_edges_rejects_overlap(k22):
    with pytest.raises(GraphError):
        cross_edges(k22, set(), k22.plus, k22.plus)


def test_degree_examples(k22):
    assert degree(k22, set(), k22.plus[0]) == 0
    assert all(degree(k22, set(k22.edges), v) == 2 for v in k22.vertices)
    g = BipartiteMultigraph.from_pairs(1, 1, [(0, 0), (0, 0)])
    assert degree(g, {0, 1}, g.plus[0]) == 2


def test_unknown_vertex_is_rejected(k22):
    with pytest.raises(GraphError):
        induced_edges(k22, [VertexId(PLUS, 9)])
    with pytest.raises(GraphError):
        degree(k22, set(), VertexId(MINUS, 7))


def test_edge_must_join_sides():
    g = BipartiteMultigraph()
    a = g.add_vertex(PLUS)
    b = g.add_vertex(PLUS)
    with pytest.raises(GraphError):
        g.add_edge(a, b)


def test_minus_plus_order_is_normalized():
    g = BipartiteMultigraph()
    a = g.add_vertex(PLUS)
    b = g.add_vertex(MINUS)
    e = g.add_edge(b, a, 3)
    assert (e.plus, e.minus, e.weight) == (a, b, Fraction(3))


def test_float_weights_are_refused():
    g = BipartiteMultigraph.from_pairs(1, 1, [])
    with pytest.raises(TypeError):
        g.add_edge(g.plus[0], g.minus[0], 0.5)


def test_with_weights_keeps_ids():
    g = BipartiteMultigraph.complete(2, 3)
    h = g.with_weights({eid: eid * 2 for eid in g.edges})
    assert sorted(h.edges) == sorted(g.edges)
    assert h.weight(4) == 8
    assert g.weight(4) == 0


def test_digraph_rejects_unknown_endpoint():
    D = Digraph(2)
    D.add_arc(0, 1)
    with pytest.raises(GraphError):
        D.add_arc(0, 2)


pairs = st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=14)


@settings(max_examples=60, deadline=None)
@given(pairs, st.data())
def test_degree_sum_is_twice_size(edges, data):
    g = BipartiteMultigraph.from_pairs(4, 4, edges)
    F = data.draw(st.sets(st.sampled_from(sorted(g.edges)))) if g.edges else set()
    assert sum(degree(g, F, v) for v in g.vertices) == 2 * len(F)
    assert sum(degree(g, F, v) for v in g.plus) == len(F)


@settings(max_examples=60, deadline=None)
@given(pairs, st.data())
def test_induced_is_monotone_and_splits(edges, data):
    g = BipartiteMultigraph.from_pairs(4, 4, edges)
    X = data.draw(st.sets(st.sampled_from(g.vertices)))
    Y = data.draw(st.sets(st.sampled_from(g.vertices)))
    assert induced_edges(g, X) <= induced_edges(g, X | Y)
    Y -= X
    everything = set(g.edges)
    assert induced_edges(g, X | Y) == (induced_edges(g, X) | induced_edges(g, Y)
                                      | cross_edges(g, everything, X, Y))
