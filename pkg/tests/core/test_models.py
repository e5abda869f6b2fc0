#!/usr/bin/env python3
"""Pytest tests for models.py"""

import pytest

from bulk_reach.core.errors import GraphError
from bulk_reach.core.models import (
    BulkChange,
    Certification,
    Graph,
    TreeDecomposition,
    WeightAssignment,
)

# Graph Tests


def test_graph_basic_creation():
    """Test basic Graph creation with defaults"""
    g = Graph(3)
    assert g.n == 3
    assert g.edges == frozenset()
    assert g.directed is True


@pytest.mark.parametrize("edges,description", [
    ({(0, 0)}, "self-loop"),
    ({(0, 3)}, "node out of range"),
    ({(-1, 1)}, "negative node"),
])
def test_graph_rejects_bad_edges(edges, description):
    """Test that Graph enforces its invariants"""
    with pytest.raises(GraphError):
        Graph(3, frozenset(edges))


def test_undirected_graph_stores_both_orientations():
    g = Graph.undirected(3, [(0, 1), (2, 1)])
    assert g.edges == {(0, 1), (1, 0), (1, 2), (2, 1)}
    assert g.undirected_pairs() == [(0, 1), (1, 2)]
    assert g.directed is False


def test_undirected_graph_must_be_symmetric():
    with pytest.raises(GraphError):
        Graph(2, frozenset({(0, 1)}), directed=False)


def test_successors_sorted():
    g = Graph(4, frozenset({(0, 3), (0, 1), (2, 0)}))
    assert g.successors(0) == (1, 3)
    assert g.successors(1) == ()


def test_bidirected_extension():
    g = Graph(3, frozenset({(0, 1), (1, 2)}))
    assert g.bidirected().edges == {(0, 1), (1, 0), (1, 2), (2, 1)}


def test_max_degree_uses_underlying_undirected_graph():
    g = Graph(4, frozenset({(0, 1), (1, 0), (0, 2), (3, 0)}))
    assert g.max_degree() == 3


# BulkChange Tests


def test_bulk_change_size_counts_distinct_edges():
    c = BulkChange.of([(0, 1), (1, 2)], [(1, 2), (2, 3)])
    assert c.size == 3
    assert not c.is_empty


def test_bulk_change_rejects_self_loop():
    with pytest.raises(GraphError):
        BulkChange.of([(1, 1)])


def test_empty_bulk_change():
    assert BulkChange().is_empty


# TreeDecomposition Tests


@pytest.fixture
def star_decomposition():
    """Root 0 with three children; bag 3 has a child 4."""
    return TreeDecomposition(
        parent={0: None, 1: 0, 2: 0, 3: 0, 4: 3},
        bags={0: {0, 1}, 1: {1, 2}, 2: {0, 3}, 3: {0, 4}, 4: {4, 5}},
    )


def test_decomposition_measures(star_decomposition):
    t = star_decomposition
    assert t.root == 0
    assert t.children(0) == (1, 2, 3)
    assert t.preorder == (0, 1, 2, 3, 4)
    assert t.depth == 2
    assert t.width == 1
    assert t.max_degree == 3
    assert not t.is_binary


def test_heights_and_levels(star_decomposition):
    t = star_decomposition
    assert t.height(4) == 1
    assert t.height(3) == 2
    assert t.height(0) == 3
    assert t.level(4) == 2


def test_highest_bag(star_decomposition):
    t = star_decomposition
    assert t.highest_bag(0) == 0
    assert t.highest_bag(5) == 4
    assert t.node_height(5) == 1
    assert t.is_ancestor(0, 4)
    assert not t.is_ancestor(1, 4)


@pytest.mark.parametrize("parent,bags", [
    ({0: None, 1: None}, {0: set(), 1: set()}),
    ({0: 1, 1: 0}, {0: set(), 1: set()}),
    ({0: None, 1: 5}, {0: set(), 1: set()}),
    ({0: None}, {0: set(), 1: set()}),
])
def test_decomposition_rejects_non_trees(parent, bags):
    with pytest.raises(GraphError):
        TreeDecomposition(parent=parent, bags=bags)


# WeightAssignment Tests


def test_weight_assignment_access():
    w = WeightAssignment({(0, 1): 5, (1, 0): -5})
    assert w[(0, 1)] == 5
    assert (1, 0) in w
    assert w.get((2, 3)) == 0
    assert w.max_abs() == 5
    assert w.min_value() == -5
    assert w.skew_violations() == []
    assert list(w) == [(0, 1), (1, 0)]


def test_skew_violations():
    w = WeightAssignment({(0, 1): 5, (1, 0): 4, (1, 2): 1})
    assert w.skew_violations() == [(0, 1), (1, 0), (1, 2)]


def test_restricted_to_keeps_metadata():
    w = WeightAssignment({(0, 1): 2, (1, 2): 3}, bound_exponent=1, certification=Certification.ISOLATING)
    r = w.restricted_to([(1, 2)])
    assert r.weights == {(1, 2): 3}
    assert r.certification == Certification.ISOLATING
    assert r.bound_exponent == 1


def test_certified_returns_copy():
    w = WeightAssignment({(0, 1): 2})
    assert w.certified(Certification.ISOLATING).certification == Certification.ISOLATING
    assert w.certification == Certification.NONE


def test_is_positive_on():
    w = WeightAssignment({(0, 1): 2, (1, 2): 0})
    assert w.is_positive_on([(0, 1)])
    assert not w.is_positive_on([(1, 2)])
    assert not w.is_positive_on([(2, 0)])
