"""Tests for tree decomposition validation and binarization."""

import pytest

from bulk_reach.core.decomposition import (
    binarize_decomposition,
    path_decomposition,
    validate_tree_decomposition,
)
from bulk_reach.core.models import Graph, TreeDecomposition
from bulk_reach.harness.generators import partial_k_tree


def path_graph(n):
    return Graph.undirected(n, [(i, i + 1) for i in range(n - 1)])


class TestValidateTreeDecomposition:
    def test_path_decomposition_is_valid(self):
        report = validate_tree_decomposition(path_graph(5), path_decomposition(5))
        assert report.is_valid
        assert report.width == 1
        assert report.depth == 3
        assert report.is_binary

    def test_uncovered_node(self):
        t = TreeDecomposition(parent={0: None}, bags={0: {0, 1}})
        report = validate_tree_decomposition(Graph(3), t)
        assert not report.is_valid
        assert any("node 2" in v for v in report.violations)

    def test_uncovered_edge(self):
        t = TreeDecomposition(parent={0: None, 1: 0}, bags={0: {0, 1}, 1: {1, 2}})
        g = Graph.undirected(3, [(0, 2)])
        report = validate_tree_decomposition(g, t)
        assert report.violations == ["edge (0,2) is not covered by any bag"]

    def test_disconnected_occurrences(self):
        t = TreeDecomposition(
            parent={0: None, 1: 0, 2: 1},
            bags={0: {0, 1}, 1: {1, 2}, 2: {0, 2}},
        )
        report = validate_tree_decomposition(Graph(3), t)
        assert report.violations == ["bags containing node 0 are disconnected (2 components)"]

    @pytest.mark.parametrize("seed", range(5))
    def test_generated_partial_two_tree(self, seed):
        g, t = partial_k_tree(2, 12, seed)
        report = validate_tree_decomposition(g, t)
        assert report.is_valid, report.violations
        assert report.width <= 2


class TestBinarize:
    def test_node_with_four_children(self):
        t = TreeDecomposition(
            parent={0: None, 1: 0, 2: 0, 3: 0, 4: 0},
            bags={0: {0}, 1: {0, 1}, 2: {0, 2}, 3: {0, 3}, 4: {0, 4}},
        )
        g = Graph.undirected(5, [(0, i) for i in range(1, 5)])
        b = binarize_decomposition(t)
        assert b.is_binary
        assert b.width == t.width
        assert len(b.parent) == 7
        assert validate_tree_decomposition(g, b).is_valid
        spines = [i for i in b.parent if i not in t.parent]
        assert all(b.bags[i] == t.bags[0] for i in spines)

    def test_binary_input_is_returned_unchanged(self):
        t = path_decomposition(4)
        assert binarize_decomposition(t) is t


def test_single_node_path_decomposition():
    t = path_decomposition(1)
    assert t.bags == {0: frozenset({0})}
    assert validate_tree_decomposition(Graph(1), t).is_valid
