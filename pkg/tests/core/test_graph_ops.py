"""Tests for change normalization and application."""

import pytest
from hypothesis import given

from bulk_reach.core.errors import ChangeError
from bulk_reach.core.graph_ops import affected_nodes, apply_change, normalize_change
from bulk_reach.core.models import BulkChange, Graph
from bulk_reach.core.validator import validate_normalized
from tests.strategies import directed_graphs


class TestNormalizeChange:
    def test_drops_no_op_parts(self):
        g = Graph(3, frozenset({(0, 1)}))
        c = BulkChange.of([(0, 1), (1, 2)], [(2, 0), (0, 1)])
        assert normalize_change(g, c) == BulkChange.of([(1, 2)], [(0, 1)])

    def test_edge_in_both_sets_nets_absent(self):
        present = Graph(2, frozenset({(0, 1)}))
        absent = Graph(2)
        c = BulkChange.of([(0, 1)], [(0, 1)])
        assert normalize_change(present, c) == BulkChange.of([], [(0, 1)])
        assert normalize_change(absent, c) == BulkChange()

    def test_undirected_pairs_are_canonical(self):
        g = Graph.undirected(3, [(0, 1)])
        c = BulkChange.of([(2, 1)], [(1, 0)])
        assert normalize_change(g, c) == BulkChange.of([(1, 2)], [(0, 1)])

    @given(directed_graphs(max_nodes=5), directed_graphs(max_nodes=5))
    def test_result_is_normalized(self, g, other):
        edges = [(u, v) for u, v in other.edges if u < g.n and v < g.n]
        c = BulkChange.of(edges[::2], edges[1::2] + edges[:1])
        assert validate_normalized(g, normalize_change(g, c))[0]


class TestApplyChange:
    def test_insert_then_delete(self):
        g = Graph(3, frozenset({(0, 1), (1, 2)}))
        changed = apply_change(g, BulkChange.of([(2, 0)], [(0, 1)]))
        assert changed.edges == {(1, 2), (2, 0)}

    def test_undirected_changes_both_orientations(self):
        g = Graph.undirected(3, [(0, 1)])
        changed = apply_change(g, BulkChange.of([(1, 2)], [(0, 1)]))
        assert changed.edges == {(1, 2), (2, 1)}
        assert not changed.directed

    def test_rejects_unnormalized_change(self):
        g = Graph(2, frozenset({(0, 1)}))
        with pytest.raises(ChangeError):
            apply_change(g, BulkChange.of([(0, 1)]))


def test_affected_nodes():
    c = BulkChange.of([(0, 4)], [(4, 2)])
    assert affected_nodes(c) == {0, 2, 4}
    assert affected_nodes(BulkChange()) == frozenset()
