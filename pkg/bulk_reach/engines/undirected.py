"""Undirected connectivity under bulk insertions and deletions.

The state is a rooted spanning forest S of the current graph, oriented
child -> parent with every root the smallest node of its component, plus
the forest's ancestor closure TC_S. Two nodes are connected iff they have
the same root, which TC_S gives directly.

Both updates shrink the problem to a graph H with one node per touched
piece of the forest. On insertion the pieces are the old components that
contain an affected node; on deletion they are the pieces the deleted tree
edges cut the forest into. H joins two pieces when some (new or surviving)
edge does. A spanning forest of H says which pieces to glue, and every glue
step uses the lexicographically smallest edge between the two pieces,
hanging the child piece from it after rerooting the piece at its endpoint.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

from loguru import logger

from bulk_reach.core.errors import ChangeError
from bulk_reach.core.models import BulkChange, Edge, Graph
from bulk_reach.core.oracle import spanning_forest
from bulk_reach.core.validator import validate_edges
from bulk_reach.engines.engine_base import (
    Pair,
    ReachabilityEngine,
    check_domain,
    check_nodes,
)


@dataclass(frozen=True)
class ForestState:
    """Undirected graph, its rooted spanning forest and the ancestor closure.

    Attributes:
        graph: The current undirected graph.
        parent: The forest S as child -> parent.
        tc: Pairs (u, v) with v a proper ancestor of u in S.
    """

    graph: Graph
    parent: Mapping[int, int] = field(default_factory=dict)
    tc: frozenset[Pair] = field(default_factory=frozenset)

    @property
    def forest_edges(self) -> frozenset[Edge]:
        return frozenset(self.parent.items())

    @cached_property
    def roots(self) -> dict[int, int]:
        """Root of every node, read off TC_S."""
        root = {v: v for v in self.graph.nodes()}
        for u, v in self.tc:
            if v not in self.parent:
                root[u] = v
        return root


@dataclass
class ForestStats:
    """Sizes of the piece graph H and the number of promoted edges."""

    h_nodes: int = 0
    h_edges: int = 0
    promoted: int = 0


def init_empty(n: int) -> ForestState:
    """Edgeless undirected graph; every node is its own root.

    Raises:
        NodeRangeError: If n < 1.
    """
    check_domain(n)
    return ForestState(Graph(n, directed=False))


def _canonical(edges: Iterable[Edge]) -> frozenset[Edge]:
    return frozenset((min(u, v), max(u, v)) for u, v in edges)


def _closure(parent: Mapping[int, int]) -> frozenset[Pair]:
    pairs = set()
    for u in parent:
        v = parent[u]
        while True:
            pairs.add((u, v))
            if v not in parent:
                break
            v = parent[v]
    return frozenset(pairs)


def _root_of(parent: Mapping[int, int], v: int) -> int:
    while v in parent:
        v = parent[v]
    return v


def _reroot(parent: dict[int, int], v: int) -> None:
    """Make v the root of its tree by reversing the path from v to the old root."""
    path = [v]
    while path[-1] in parent:
        path.append(parent[path[-1]])
    for x in path[:-1]:
        del parent[x]
    for child, up in zip(path[1:], path[:-1], strict=True):
        parent[child] = up


def _minimize_roots(parent: dict[int, int], n: int) -> None:
    trees: dict[int, int] = {}
    for v in range(n):
        r = _root_of(parent, v)
        trees[r] = min(trees.get(r, v), v)
    for root, smallest in trees.items():
        if root != smallest:
            _reroot(parent, smallest)


def _glue(
    parent: dict[int, int],
    piece_of: Mapping[int, int],
    reps: list[int],
    candidates: Iterable[Edge],
    stats: ForestStats,
) -> None:
    """Connect pieces along a spanning forest of the piece graph H.

    Args:
        parent: Forest being updated in place.
        piece_of: Node -> piece id (only nodes of touched pieces).
        reps: Representative node of every touched piece, ascending; the
            local H id of a piece is its position here.
        candidates: Edges that may join pieces, as canonical pairs.
        stats: Receives the size of H and the number of glued edges.
    """
    local = {piece: i for i, piece in enumerate(reps)}
    realizing: dict[Pair, Edge] = {}
    for x, y in sorted(candidates):
        px, py = piece_of.get(x), piece_of.get(y)
        if px is None or py is None or px == py:
            continue
        key = (min(local[px], local[py]), max(local[px], local[py]))
        realizing.setdefault(key, (x, y))

    h = Graph.undirected(len(reps), realizing)
    stats.h_nodes, stats.h_edges = h.n, len(realizing)
    forest = spanning_forest(h)

    for child, up in sorted(forest.parent.items()):
        x, y = realizing[(min(child, up), max(child, up))]
        low, high = (x, y) if local[piece_of[x]] == child else (y, x)
        _reroot(parent, low)
        parent[low] = high
        stats.promoted += 1


def bulk_insert(
    s: ForestState, eplus: Iterable[Edge], stats: ForestStats | None = None
) -> ForestState:
    """Insert undirected edges and merge the components they join.

    Pieces are the old components containing an affected node, each
    represented by its smallest affected node.

    Raises:
        ChangeError: If an edge is invalid or already present.
    """
    stats = stats if stats is not None else ForestStats()
    eplus = _canonical(eplus)
    ok, msg = validate_edges(s.graph.n, eplus)
    if not ok:
        raise ChangeError(msg)
    present = sorted(e for e in eplus if e in s.graph.edges)
    if present:
        raise ChangeError(f"Cannot insert {present[0]}: edge already present.")
    if not eplus:
        return s

    roots = s.roots
    affected = sorted({x for e in eplus for x in e})
    rep: dict[int, int] = {}
    for v in affected:
        rep.setdefault(roots[v], v)
    piece_of = {v: rep[roots[v]] for v in s.graph.nodes() if roots[v] in rep}

    parent = dict(s.parent)
    _glue(parent, piece_of, sorted(rep.values()), eplus, stats)
    _minimize_roots(parent, s.graph.n)

    both_ways = eplus | {(v, u) for u, v in eplus}
    logger.debug(f"undirected insert: |E+|={len(eplus)}, H={stats.h_nodes}, promoted {stats.promoted}")
    return ForestState(s.graph.with_edges(s.graph.edges | both_ways), parent, _closure(parent))


def bulk_delete(
    s: ForestState, eminus: Iterable[Edge], stats: ForestStats | None = None
) -> ForestState:
    """Delete undirected edges and reconnect the forest where possible.

    Deleted tree edges cut S into S'. Its ancestor closure is TC_S minus the
    pairs whose path used a deleted tree edge. Pieces are the S'-trees that
    contain an affected node, each represented by its smallest affected node;
    surviving edges between pieces become candidate replacements.

    Raises:
        ChangeError: If an edge is invalid or not present.
    """
    stats = stats if stats is not None else ForestStats()
    eminus = _canonical(eminus)
    ok, msg = validate_edges(s.graph.n, eminus)
    if not ok:
        raise ChangeError(msg)
    absent = sorted(e for e in eminus if e not in s.graph.edges)
    if absent:
        raise ChangeError(f"Cannot delete {absent[0]}: edge not present.")
    if not eminus:
        return s

    cut = [(c, p) for c, p in s.parent.items() if (min(c, p), max(c, p)) in eminus]
    parent = {c: p for c, p in s.parent.items() if (c, p) not in cut}

    def uses_cut(u: int, v: int) -> bool:
        return any(
            (u == c or (u, c) in s.tc) and (p == v or (p, v) in s.tc) for c, p in cut
        )

    tc_cut = frozenset(pair for pair in s.tc if not uses_cut(*pair))
    root = {v: v for v in s.graph.nodes()}
    for u, v in tc_cut:
        if v not in parent:
            root[u] = v

    affected = sorted({x for e in eminus for x in e})
    rep: dict[int, int] = {}
    for v in affected:
        rep.setdefault(root[v], v)
    piece_of = {v: rep[root[v]] for v in s.graph.nodes() if root[v] in rep}

    both_ways = eminus | {(v, u) for u, v in eminus}
    graph = s.graph.with_edges(s.graph.edges - both_ways)
    _glue(parent, piece_of, sorted(rep.values()), graph.undirected_pairs(), stats)
    _minimize_roots(parent, s.graph.n)

    logger.debug(
        f"undirected delete: |E-|={len(eminus)}, cut {len(cut)} tree edge(s), "
        f"H={stats.h_nodes}, promoted {stats.promoted}"
    )
    return ForestState(graph, parent, _closure(parent))


def query(s: ForestState, a: int, b: int) -> bool:
    """True iff a == b or a and b share a root.

    Raises:
        NodeRangeError: If a or b is not a node.
    """
    check_nodes(s.graph.n, a, b)
    return a == b or s.roots[a] == s.roots[b]


def forest_violations(s: ForestState) -> list[str]:
    """Check the forest invariants; an empty list means all hold."""
    violations = []
    for c, p in s.parent.items():
        if (c, p) not in s.graph.edges:
            violations.append(f"tree edge {c}->{p} is not a graph edge")
    for v in s.graph.nodes():
        seen = {v}
        x = v
        while x in s.parent:
            x = s.parent[x]
            if x in seen:
                violations.append(f"cycle through node {v}")
                break
            seen.add(x)
    if violations:
        return violations
    if s.tc != _closure(s.parent):
        violations.append("TC_S differs from the ancestor closure of S")
    forest_of = {v: _root_of(s.parent, v) for v in s.graph.nodes()}
    for u, v in s.graph.edges:
        if forest_of[u] != forest_of[v]:
            violations.append(f"edge ({u},{v}) joins two trees")
    for v in s.graph.nodes():
        if forest_of[v] > v:
            violations.append(f"root {forest_of[v]} is not the minimum of its tree")
    return violations


class UndirectedEngine(ReachabilityEngine):
    """Connectivity of an undirected graph under insertions and deletions."""

    name = "undirected"
    directed = False
    supports_deletions = True

    def __init__(self, n: int) -> None:
        self.state = init_empty(n)
        self._stats: dict[str, Any] = {}

    @property
    def graph(self) -> Graph:
        return self.state.graph

    def apply(self, change: BulkChange) -> None:
        inserted, deleted = ForestStats(), ForestStats()
        self.state = bulk_insert(self.state, change.inserted, inserted)
        self.state = bulk_delete(self.state, change.deleted, deleted)
        self._stats = {
            "h_nodes": inserted.h_nodes + deleted.h_nodes,
            "promoted": inserted.promoted + deleted.promoted,
            "tree_edges": len(self.state.parent),
        }

    def query(self, a: int, b: int) -> bool:
        return query(self.state, a, b)

    def stats(self) -> dict[str, Any]:
        return dict(self._stats)
