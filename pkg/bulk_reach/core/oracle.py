"""Brute-force reference computations.

Every engine is checked against these functions. They favour directness
over speed: closures are per-source BFS, isolation and circulation checks
enumerate simple paths and cycles exhaustively, and walk parities come from
a plain dynamic program over (node, accumulated weight). The exhaustive
enumerators refuse inputs above ORACLE_NODE_LIMIT nodes.
"""

from __future__ import annotations

import heapq
from collections import deque
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field

from bulk_reach.core.constants import (
    MIN_CYCLE_NODES,
    ORACLE_NODE_LIMIT,
    WALK_DP_CELL_LIMIT,
)
from bulk_reach.core.errors import GraphError, GuardExceededError, WeightError
from bulk_reach.core.models import Edge, Graph, WeightAssignment

Pair = tuple[int, int]


def _guard_nodes(g: Graph, what: str) -> None:
    if g.n > ORACLE_NODE_LIMIT:
        raise GuardExceededError(
            f"{what} enumerates exhaustively and is limited to "
            f"{ORACLE_NODE_LIMIT} nodes, got {g.n}."
        )


# Reachability


def reachable_from(g: Graph, s: int) -> set[int]:
    """Nodes reachable from s by a path of length >= 1."""
    seen: set[int] = set()
    queue = deque(g.successors(s))
    while queue:
        v = queue.popleft()
        if v in seen:
            continue
        seen.add(v)
        queue.extend(x for x in g.successors(v) if x not in seen)
    seen.discard(s)
    return seen


def transitive_closure(g: Graph) -> frozenset[Pair]:
    """All pairs (u, v), u != v, with a directed path u ⇝ v (per-source BFS)."""
    return frozenset((s, t) for s in g.nodes() for t in reachable_from(g, s))


def warshall_closure(g: Graph) -> frozenset[Pair]:
    """Irreflexive closure by Warshall's algorithm, on row bitsets."""
    rows = [0] * g.n
    for u, v in g.edges:
        rows[u] |= 1 << v
    for k in range(g.n):
        bit = 1 << k
        row_k = rows[k]
        for i in range(g.n):
            if rows[i] & bit:
                rows[i] |= row_k
    return frozenset(
        (i, j) for i in range(g.n) for j in range(g.n) if i != j and rows[i] >> j & 1
    )


def connected_components(g: Graph) -> dict[int, int]:
    """Map every node to the minimum node id of its component.

    Raises:
        GraphError: If g is directed.
    """
    if g.directed:
        raise GraphError("connected_components needs an undirected graph.")
    rep: dict[int, int] = {}
    for s in g.nodes():
        if s in rep:
            continue
        rep[s] = s
        for t in reachable_from(g, s):
            rep[t] = s
    return rep


@dataclass
class SpanningForest:
    """A rooted spanning forest with edges oriented child -> parent.

    Attributes:
        parent: Maps every non-root node to its parent.
        roots: Component roots (minimum node of each component), ascending.
    """

    parent: dict[int, int] = field(default_factory=dict)
    roots: list[int] = field(default_factory=list)

    def edges(self) -> frozenset[Edge]:
        return frozenset(self.parent.items())


def spanning_forest(g: Graph) -> SpanningForest:
    """Breadth-first spanning forest rooted at each component's minimum node.

    Nodes of the next BFS layer take the smallest neighbour in the current
    layer as parent.

    Raises:
        GraphError: If g is directed.
    """
    if g.directed:
        raise GraphError("spanning_forest needs an undirected graph.")
    forest = SpanningForest()
    visited: set[int] = set()
    for root in g.nodes():
        if root in visited:
            continue
        forest.roots.append(root)
        visited.add(root)
        layer = [root]
        while layer:
            found: dict[int, int] = {}
            for u in sorted(layer):
                for v in g.successors(u):
                    if v not in visited and v not in found:
                        found[v] = u
            visited.update(found)
            forest.parent.update(found)
            layer = list(found)
    return forest


# Isolation


@dataclass(frozen=True)
class PairStats:
    """Minimum path weight and number of distinct minimum-weight simple paths."""

    min_weight: int
    count: int


@dataclass
class IsolationReport:
    """Per-pair minimum-weight path statistics for a positive weighting.

    Attributes:
        pairs: (s, t) -> PairStats for every reachable pair with s != t.
    """

    pairs: dict[Pair, PairStats]

    def reachable(self, s: int, t: int) -> bool:
        return (s, t) in self.pairs

    @property
    def is_isolating(self) -> bool:
        return all(p.count == 1 for p in self.pairs.values())

    @property
    def is_strongly_isolating(self) -> bool:
        minima = [p.min_weight for p in self.pairs.values()]
        return self.is_isolating and len(set(minima)) == len(minima)

    def ambiguous_pairs(self) -> list[Pair]:
        return sorted(pair for pair, p in self.pairs.items() if p.count > 1)


def _check_positive(g: Graph, w: WeightAssignment) -> None:
    for e in g.sorted_edges():
        if e not in w:
            raise WeightError(f"Edge {e} has no weight.")
        if w[e] <= 0:
            raise WeightError(f"Edge {e} has non-positive weight {w[e]}.")


def _simple_paths(g: Graph, w: WeightAssignment, s: int) -> Iterator[tuple[int, int]]:
    """Yield (target, weight) for every simple path starting at s."""
    on_path = [False] * g.n
    on_path[s] = True
    stack: list[tuple[int, int, Iterator[int]]] = [(s, 0, iter(g.successors(s)))]
    while stack:
        u, weight, succ = stack[-1]
        v = next(succ, None)
        if v is None:
            stack.pop()
            on_path[u] = False
            continue
        if on_path[v]:
            continue
        total = weight + w[(u, v)]
        yield v, total
        on_path[v] = True
        stack.append((v, total, iter(g.successors(v))))


def min_weight_paths(g: Graph, w: WeightAssignment, s: int) -> dict[int, PairStats]:
    # Positive weights make every minimum-weight walk a simple path, so
    # shortest-path counting counts minimum-weight simple paths.
    dist: dict[int, int] = {s: 0}
    count: dict[int, int] = {s: 1}
    done: set[int] = set()
    heap = [(0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v in g.successors(u):
            nd = d + w[(u, v)]
            if v not in dist or nd < dist[v]:
                dist[v], count[v] = nd, count[u]
                heapq.heappush(heap, (nd, v))
            elif nd == dist[v]:
                count[v] += count[u]
    return {t: PairStats(dist[t], count[t]) for t in dist if t != s}


def isolation_report(
    g: Graph, w: WeightAssignment, *, exhaustive: bool = True
) -> IsolationReport:
    """Minimum-weight path multiplicities for every ordered pair.

    Args:
        g: Directed graph.
        w: Weights, positive on every edge of g.
        exhaustive: Enumerate all simple paths (guarded). When False, use
            shortest-path counting, which is exact for positive weights and
            has no node guard.

    Raises:
        WeightError: If some edge weight is missing or non-positive.
        GuardExceededError: If exhaustive and g exceeds the node guard.
    """
    _check_positive(g, w)
    pairs: dict[Pair, PairStats] = {}
    if not exhaustive:
        for s in g.nodes():
            for t, stats in min_weight_paths(g, w, s).items():
                pairs[(s, t)] = stats
        return IsolationReport(pairs)

    _guard_nodes(g, "isolation_report")
    for s in g.nodes():
        best: dict[int, list[int]] = {}
        for t, weight in _simple_paths(g, w, s):
            entry = best.get(t)
            if entry is None or weight < entry[0]:
                best[t] = [weight, 1]
            elif weight == entry[0]:
                entry[1] += 1
        for t, (weight, n_paths) in best.items():
            pairs[(s, t)] = PairStats(weight, n_paths)
    return IsolationReport(pairs)


# Circulation


@dataclass
class CirculationReport:
    """Weights of all simple directed cycles (>= 3 nodes) of a bidirected graph.

    Attributes:
        cycles: (node sequence, weight) per cycle; the sequence closes back to
            its first node implicitly.
    """

    cycles: list[tuple[tuple[int, ...], int]]

    @property
    def has_nonzero_circulation(self) -> bool:
        return all(weight != 0 for _, weight in self.cycles)

    def zero_cycles(self) -> list[tuple[int, ...]]:
        return [nodes for nodes, weight in self.cycles if weight == 0]


def cycle_edges(nodes: Sequence[int]) -> list[Edge]:
    return [(nodes[i], nodes[(i + 1) % len(nodes)]) for i in range(len(nodes))]


def simple_cycles(g: Graph, min_nodes: int = MIN_CYCLE_NODES) -> Iterator[tuple[int, ...]]:
    """Yield each simple directed cycle once, starting at its smallest node."""
    for s in g.nodes():
        path = [s]
        on_path = {s}
        stack: list[Iterator[int]] = [iter(g.successors(s))]
        while stack:
            v = next(stack[-1], None)
            if v is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if v == s:
                if len(path) >= min_nodes:
                    yield tuple(path)
                continue
            if v < s or v in on_path:
                continue
            path.append(v)
            on_path.add(v)
            stack.append(iter(g.successors(v)))


def circulation_report(g: Graph, w: WeightAssignment) -> CirculationReport:
    """Enumerate simple cycles of the bidirected view and their weights.

    Cycles on two nodes are skipped: under skew-symmetry they always weigh 0.

    Raises:
        WeightError: If w is missing a bidirected edge or is not skew-symmetric on it.
        GuardExceededError: If g exceeds the node guard.
    """
    _guard_nodes(g, "circulation_report")
    view = g.bidirected()
    for u, v in view.sorted_edges():
        if (u, v) not in w:
            raise WeightError(f"Edge ({u},{v}) has no weight.")
        if w[(u, v)] != -w.get((v, u), 0):
            raise WeightError(f"Weights are not skew-symmetric on ({u},{v}).")
    cycles = [
        (nodes, sum(w[e] for e in cycle_edges(nodes))) for nodes in simple_cycles(view)
    ]
    return CirculationReport(cycles)


def cycle_dominance_holds(nodes: Sequence[int], w: WeightAssignment) -> bool:
    """Whether the heaviest edge of a cycle outweighs all others together."""
    weights = [w[e] for e in cycle_edges(nodes)]
    top = max(range(len(weights)), key=lambda i: abs(weights[i]))
    rest = sum(weights) - weights[top]
    return abs(weights[top]) > abs(rest)


# Walk parities


def count_weighted_walks_mod2(
    g: Graph, w: WeightAssignment, b: int
) -> list[list[int]]:
    """Parity of the number of s -> t walks of each total weight up to b.

    Args:
        g: Directed graph.
        w: Positive weights on g's edges.
        b: Degree bound.

    Returns:
        table[s][t] as a bitmask: bit i is the parity of the number of s -> t
        walks of weight exactly i. Bit 0 of table[s][s] is 1.

    Raises:
        WeightError: If a weight is missing or non-positive.
        GuardExceededError: If n * n * (b + 1) exceeds the DP cell guard.
    """
    _check_positive(g, w)
    if g.n * g.n * (b + 1) > WALK_DP_CELL_LIMIT:
        raise GuardExceededError(
            f"Walk DP needs {g.n * g.n * (b + 1)} cells, limit {WALK_DP_CELL_LIMIT}."
        )
    incoming: list[list[tuple[int, int]]] = [[] for _ in g.nodes()]
    for u, v in g.sorted_edges():
        incoming[v].append((u, w[(u, v)]))

    table: list[list[int]] = []
    for s in g.nodes():
        # bits[t][i]: parity of s -> t walks of weight i
        bits = [[0] * (b + 1) for _ in g.nodes()]
        bits[s][0] = 1
        for i in range(1, b + 1):
            for t in g.nodes():
                parity = 0
                for u, weight in incoming[t]:
                    if weight <= i:
                        parity ^= bits[u][i - weight]
                bits[t][i] = parity
        table.append(
            [sum(bit << i for i, bit in enumerate(row)) for row in bits]
        )
    return table
