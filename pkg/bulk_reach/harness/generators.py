"""Seeded instance and change-script generators.

Every generator owns a private random.Random, so the same arguments always
produce the same graph, decomposition and script.
"""

from __future__ import annotations

import random

from loguru import logger

from bulk_reach.core.errors import GraphError
from bulk_reach.core.graph_ops import apply_change
from bulk_reach.core.models import BulkChange, Edge, Graph, TreeDecomposition


def random_gnp(n: int, p: float, seed: int, directed: bool = True) -> Graph:
    """G(n, p): every ordered pair (unordered when undirected) is an edge with probability p.

    Raises:
        GraphError: If n < 1 or p is outside [0, 1].
    """
    if n < 1:
        raise GraphError(f"random-gnp needs n >= 1, got {n}.")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"random-gnp needs 0 <= p <= 1, got {p}.")
    rng = random.Random(seed)
    if directed:
        edges = [(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < p]
        return Graph(n, frozenset(edges))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.undirected(n, pairs)


def path_union(q: int, length: int, directed: bool = True) -> Graph:
    """q disjoint paths of `length` nodes each; path i covers i*length .. (i+1)*length - 1.

    Raises:
        GraphError: If q or length is below 1.
    """
    if q < 1 or length < 1:
        raise GraphError(f"path-union needs q >= 1 and length >= 1, got q={q}, length={length}.")
    edges = [
        (i * length + j, i * length + j + 1) for i in range(q) for j in range(length - 1)
    ]
    if directed:
        return Graph(q * length, frozenset(edges))
    return Graph.undirected(q * length, edges)


def partial_k_tree(
    k: int, n: int, seed: int, max_degree: int | None = None, p: float = 0.7
) -> tuple[Graph, TreeDecomposition]:
    """An undirected graph of treewidth at most k with a binary decomposition.

    The decomposition is built top-down: each bag takes the middle node of
    its interval plus a boundary of at most k nodes inherited from the parent
    bag, and the two halves of the interval become the children. Depth is
    therefore about log2(n). New nodes connect to boundary nodes with
    probability p, never pushing a degree past max_degree.

    Raises:
        GraphError: If k < 0, n < 1, max_degree < 1 or p is outside [0, 1].
    """
    if k < 0 or n < 1:
        raise GraphError(f"partial-k-tree needs k >= 0 and n >= 1, got k={k}, n={n}.")
    if max_degree is not None and max_degree < 1:
        raise GraphError(f"max_degree must be >= 1, got {max_degree}.")
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"partial-k-tree needs 0 <= p <= 1, got {p}.")

    rng = random.Random(seed)
    degree = [0] * n
    pairs: list[Edge] = []
    parent: dict[int, int | None] = {}
    bags: dict[int, frozenset[int]] = {}

    def build(lo: int, hi: int, boundary: tuple[int, ...], up: int | None) -> None:
        mid = (lo + hi) // 2
        bag_id = len(bags)
        parent[bag_id] = up
        bags[bag_id] = frozenset((*boundary, mid))
        for b in boundary:
            room = max_degree is None or (degree[b] < max_degree and degree[mid] < max_degree)
            if room and rng.random() < p:
                pairs.append((min(b, mid), max(b, mid)))
                degree[b] += 1
                degree[mid] += 1
        inherited = list(sorted(bags[bag_id]))
        while len(inherited) > k:
            inherited.pop(rng.randrange(len(inherited)))
        if lo < mid:
            build(lo, mid, tuple(inherited), bag_id)
        if mid + 1 < hi:
            build(mid + 1, hi, tuple(inherited), bag_id)

    build(0, n, (), None)
    g = Graph.undirected(n, pairs)
    t = TreeDecomposition(parent=parent, bags=bags)
    logger.debug(f"partial-{k}-tree: n={n}, |E|={len(pairs)}, depth {t.depth}")
    return g, t


def oriented(g: Graph, seed: int, both_ways: float = 0.2) -> Graph:
    """Directed version of an undirected graph.

    Each pair keeps a random orientation, or both with probability both_ways.
    """
    rng = random.Random(seed)
    edges: set[Edge] = set()
    for u, v in g.undirected_pairs():
        if rng.random() < both_ways:
            edges |= {(u, v), (v, u)}
        else:
            edges.add((u, v) if rng.random() < 0.5 else (v, u))
    return Graph(g.n, frozenset(edges))


def change_script(
    g: Graph, steps: int, batch_size: int, seed: int, insert_only: bool = False
) -> list[BulkChange]:
    """Random changes, each normalized against the graph the previous ones produce.

    A step deletes up to half its batch from the present edges (never with
    insert_only) and inserts the rest from the absent ones. Undirected
    changes use (min, max) pairs.

    Raises:
        GraphError: If steps < 0 or batch_size < 1.
    """
    if steps < 0 or batch_size < 1:
        raise GraphError(f"Scripts need steps >= 0 and batch_size >= 1, got {steps}, {batch_size}.")
    rng = random.Random(seed)
    if g.directed:
        universe = [(u, v) for u in range(g.n) for v in range(g.n) if u != v]
    else:
        universe = [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]

    changes: list[BulkChange] = []
    current = g
    for _ in range(steps):
        present = [e for e in universe if e in current.edges]
        absent = [e for e in universe if e not in current.edges]
        n_delete = 0
        if not insert_only and present:
            n_delete = rng.randint(0, min(batch_size // 2, len(present)))
        n_insert = min(batch_size - n_delete, len(absent))
        change = BulkChange.of(rng.sample(absent, n_insert), rng.sample(present, n_delete))
        changes.append(change)
        current = apply_change(current, change)
    return changes
