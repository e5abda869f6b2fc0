"""Change application and normalization.

A change is applied insert-first: E+ is added, then E- is removed. For
undirected graphs change edges are unordered pairs; they are canonicalized
to (min, max) and applied in both orientations.
"""

from collections.abc import Iterable

from loguru import logger

from bulk_reach.core.errors import ChangeError
from bulk_reach.core.models import BulkChange, Edge, Graph
from bulk_reach.core.validator import validate_normalized


def _canonical(edges: Iterable[Edge]) -> frozenset[Edge]:
    return frozenset((min(u, v), max(u, v)) for u, v in edges)


def _both_ways(edges: Iterable[Edge]) -> frozenset[Edge]:
    out: set[Edge] = set()
    for u, v in edges:
        out.add((u, v))
        out.add((v, u))
    return frozenset(out)


def normalize_change(g: Graph, c: BulkChange) -> BulkChange:
    """Drop no-op parts of a change relative to g.

    Inserts of present edges and deletes of absent edges are dropped. An edge
    listed in both sets nets to absent: it leaves E+ and stays in E- only if
    it is currently present.

    Args:
        g: The current graph.
        c: Any change.

    Returns:
        A change that passes validate_normalized against g.
    """
    inserted, deleted = c.inserted, c.deleted
    if not g.directed:
        inserted, deleted = _canonical(inserted), _canonical(deleted)
    both = inserted & deleted
    normalized = BulkChange(
        inserted=frozenset(e for e in inserted - both if e not in g.edges),
        deleted=frozenset(e for e in deleted if e in g.edges),
    )
    if normalized != c:
        logger.debug(
            f"Normalized change: +{len(c.inserted)}/-{len(c.deleted)} "
            f"-> +{len(normalized.inserted)}/-{len(normalized.deleted)}"
        )
    return normalized


def apply_change(g: Graph, c: BulkChange) -> Graph:
    """Apply a normalized change: add E+, then remove E-.

    Args:
        g: The current graph.
        c: A change normalized against g.

    Returns:
        The changed graph (undirected graphs change both orientations).

    Raises:
        ChangeError: If c is not normalized against g.
    """
    ok, msg = validate_normalized(g, c)
    if not ok:
        raise ChangeError(msg)
    inserted, deleted = c.inserted, c.deleted
    if not g.directed:
        inserted, deleted = _both_ways(inserted), _both_ways(deleted)
    return g.with_edges((g.edges | inserted) - deleted)


def affected_nodes(c: BulkChange) -> frozenset[int]:
    """All endpoints of edges in E+ ∪ E-."""
    return frozenset(x for e in c.inserted | c.deleted for x in e)
