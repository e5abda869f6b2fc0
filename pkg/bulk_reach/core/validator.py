"""Input validation functions

This module provides the small yes/no checks used before data enters an
engine: node ranges, graph invariants for file-loaded graphs, and change
normalization against a graph.
"""

from collections.abc import Iterable

from bulk_reach.core.models import BulkChange, Edge, Graph

ValidationResult = tuple[bool, str]


def validate_node(n: int, node: int) -> ValidationResult:
    """Validate that a node id lies in 0..n-1.

    Args:
        n: Node count of the graph.
        node: The node id to check.

    Returns:
        Tuple of (is_valid, error_message). If valid, error_message is empty string.
    """
    if not isinstance(node, int) or isinstance(node, bool):
        return False, f"Node id {node!r} is not an integer."
    if not 0 <= node < n:
        return False, f"Node {node} is outside 0..{n - 1}."
    return True, ""


def validate_edges(n: int, edges: Iterable[Edge]) -> ValidationResult:
    """Validate raw edge pairs before building a Graph or BulkChange.

    Args:
        n: Node count of the graph.
        edges: Ordered pairs to check.

    Returns:
        Tuple of (is_valid, error_message). If valid, error_message is empty string.
    """
    for u, v in edges:
        for node in (u, v):
            ok, msg = validate_node(n, node)
            if not ok:
                return False, f"Edge ({u},{v}): {msg}"
        if u == v:
            return False, f"Edge ({u},{v}) is a self-loop."
    return True, ""


def validate_graph(g: Graph) -> ValidationResult:
    """Validate graph invariants (useful after reading a file).

    Args:
        g: The graph to check.

    Returns:
        Tuple of (is_valid, error_message). If valid, error_message is empty string.
    """
    if g.n < 1:
        return False, "Graph must have at least one node."
    ok, msg = validate_edges(g.n, g.edges)
    if not ok:
        return False, msg
    if not g.directed:
        missing = [(u, v) for u, v in g.edges if (v, u) not in g.edges]
        if missing:
            u, v = min(missing)
            return False, f"Undirected graph lacks reverse of ({u},{v})."
    return True, ""


def validate_normalized(g: Graph, c: BulkChange) -> ValidationResult:
    """Check that a change is normalized against a graph.

    Normalized means E+ is disjoint from the current edges, E- is contained
    in them, and E+ and E- are disjoint.

    Args:
        g: The current graph.
        c: The change to check.

    Returns:
        Tuple of (is_valid, error_message). If valid, error_message is empty string.
    """
    ok, msg = validate_edges(g.n, c.inserted | c.deleted)
    if not ok:
        return False, msg
    both = c.inserted & c.deleted
    if both:
        u, v = min(both)
        return False, f"Edge ({u},{v}) is both inserted and deleted."
    present = sorted(e for e in c.inserted if e in g.edges)
    if present:
        u, v = present[0]
        return False, f"Cannot insert ({u},{v}): edge already present."
    absent = sorted(e for e in c.deleted if e not in g.edges)
    if absent:
        u, v = absent[0]
        return False, f"Cannot delete ({u},{v}): edge not present."
    return True, ""
