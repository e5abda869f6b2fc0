"""Transitive closure under bulk edge insertions.

The only auxiliary data is the closure Ans itself. Inserting E+ touches the
affected nodes V_aff (endpoints of E+). A new path s ⇝ t splits into an old
prefix s ⇝ x1, a middle part between affected nodes x1 ⇝ x2 that may mix old
and new edges, and an old suffix x2 ⇝ t. The middle parts are exactly the
closure of the small graph H on V_aff whose edges are E+ plus the old
reachability between affected nodes, so

    Ans'(s, t) = Ans(s, t) or exists x1, x2 in V_aff:
                 Ans=(s, x1) and TC_H(x1, x2) and Ans=(x2, t)

where Ans= is Ans made reflexive.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any

from loguru import logger

from bulk_reach.core.errors import ChangeError
from bulk_reach.core.graph_ops import affected_nodes
from bulk_reach.core.models import BulkChange, Edge, Graph
from bulk_reach.core.oracle import transitive_closure
from bulk_reach.core.validator import validate_edges
from bulk_reach.engines.engine_base import (
    Pair,
    ReachabilityEngine,
    check_domain,
    check_nodes,
)


@dataclass(frozen=True)
class TCState:
    """Current directed graph and its irreflexive transitive closure.

    Attributes:
        graph: The current graph.
        ans: Pairs (u, v), u != v, with a path u ⇝ v.
    """

    graph: Graph
    ans: frozenset[Pair] = field(default_factory=frozenset)


@dataclass
class InsertStats:
    """Sizes of the compressed graph built for one insertion."""

    h_nodes: int = 0
    h_edges: int = 0
    new_pairs: int = 0


def init_empty(n: int) -> TCState:
    """Edgeless graph on n nodes with empty closure.

    Raises:
        NodeRangeError: If n < 1.
    """
    check_domain(n)
    return TCState(Graph(n))


def _compressed_graph(ans: frozenset[Pair], eplus: frozenset[Edge]) -> tuple[list[int], Graph]:
    nodes = sorted(affected_nodes(BulkChange(inserted=eplus)))
    local = {v: i for i, v in enumerate(nodes)}
    edges = {(local[u], local[v]) for u, v in eplus}
    edges |= {
        (local[u], local[v]) for u in nodes for v in nodes if u != v and (u, v) in ans
    }
    return nodes, Graph(len(nodes), frozenset(edges))


def bulk_insert(
    s: TCState, eplus: Iterable[Edge], stats: InsertStats | None = None
) -> TCState:
    """Insert a set of new edges and update the closure.

    Args:
        s: Current state.
        eplus: Edges to insert; none may be present already.
        stats: Filled with the size of H when given.

    Returns:
        The state of the changed graph.

    Raises:
        ChangeError: If an edge is invalid or already present.
    """
    eplus = frozenset(eplus)
    ok, msg = validate_edges(s.graph.n, eplus)
    if not ok:
        raise ChangeError(msg)
    present = sorted(eplus & s.graph.edges)
    if present:
        raise ChangeError(f"Cannot insert {present[0]}: edge already present.")
    if not eplus:
        return s

    nodes, h = _compressed_graph(s.ans, eplus)
    tc_h = transitive_closure(h)

    n = s.graph.n
    # reflexive views of Ans around each affected node
    reaching = {x: {x} | {u for u in range(n) if (u, x) in s.ans} for x in nodes}
    reached = {x: {x} | {v for v in range(n) if (x, v) in s.ans} for x in nodes}

    ans = set(s.ans)
    for i, j in tc_h:
        x1, x2 = nodes[i], nodes[j]
        for u in reaching[x1]:
            for v in reached[x2]:
                if u != v:
                    ans.add((u, v))

    if stats is not None:
        stats.h_nodes = h.n
        stats.h_edges = len(h.edges)
        stats.new_pairs = len(ans) - len(s.ans)
    logger.debug(f"tc-insert: |E+|={len(eplus)}, H={h.n} nodes/{len(h.edges)} edges, +{len(ans) - len(s.ans)} pairs")
    return TCState(s.graph.with_edges(s.graph.edges | eplus), frozenset(ans))


def query(s: TCState, a: int, b: int) -> bool:
    """True iff a == b or (a, b) is in the closure.

    Raises:
        NodeRangeError: If a or b is not a node.
    """
    check_nodes(s.graph.n, a, b)
    return a == b or (a, b) in s.ans


class TCInsertEngine(ReachabilityEngine):
    """Insertion-only directed reachability."""

    name = "tc-insert"
    directed = True
    supports_deletions = False

    def __init__(self, n: int) -> None:
        self.state = init_empty(n)
        self._stats = InsertStats()

    @property
    def graph(self) -> Graph:
        return self.state.graph

    def apply(self, change: BulkChange) -> None:
        if change.deleted:
            raise ChangeError("tc-insert engine cannot delete edges.")
        self._stats = InsertStats()
        self.state = bulk_insert(self.state, change.inserted, self._stats)

    def query(self, a: int, b: int) -> bool:
        return query(self.state, a, b)

    def reach_pairs(self) -> frozenset[Pair]:
        return self.state.ans

    def stats(self) -> dict[str, Any]:
        return {"h_nodes": self._stats.h_nodes, "h_edges": self._stats.h_edges}
