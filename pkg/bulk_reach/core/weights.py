"""Weight constructions for bounded-treewidth graphs.

Skew-symmetric weights with non-zero circulation come from a tree
decomposition: every bidirected edge is charged to the highest bag holding
one of its endpoints and gets weight base^h * 3^l, where h is that bag's
height and l the edge's position among the bag's edges. Graphs of unbounded
degree go through a copy graph with one node per (node, bag) incidence,
whose degree is bounded by the width, and the copy weights are summed back
along copy paths.

Positive isolating weights follow by adding n^(k+2) to every directed edge.
"""

from __future__ import annotations

import random
from collections.abc import Iterable

from loguru import logger

from bulk_reach.core.decomposition import (
    binarize_decomposition,
    validate_tree_decomposition,
)
from bulk_reach.core.errors import GraphError, RetriesExhaustedError, WeightError
from bulk_reach.core.models import (
    Certification,
    Edge,
    Graph,
    TreeDecomposition,
    WeightAssignment,
)
from bulk_reach.core.oracle import isolation_report


def bound_exponent(w: WeightAssignment, n: int) -> int:
    """Smallest k >= 0 with |w(e)| <= n^k for every stored edge.

    Raises:
        WeightError: If n <= 1 and some |w(e)| > 1, so no k exists.
    """
    top = w.max_abs()
    if n <= 1:
        if top > 1:
            raise WeightError(f"No power of {n} bounds weight {top}.")
        return 0
    k, power = 0, 1
    while power < top:
        k += 1
        power *= n
    return k


def _exponent(weights: dict[Edge, int], n: int) -> int | None:
    try:
        return bound_exponent(WeightAssignment(weights), n)
    except WeightError:
        return None


def shift_to_isolating(
    w: WeightAssignment, n: int, k: int, edges: Iterable[Edge] | None = None
) -> WeightAssignment:
    """Turn non-zero circulation weights into positive isolating ones.

    Every edge of the graph gets w(e) + n^(k+2); the result is no longer
    skew-symmetric.

    Args:
        w: Skew-symmetric weights certified to have non-zero circulation.
        n: Node count.
        k: Exponent with |w(e)| <= n^k.
        edges: The graph's directed edges; every stored orientation when None.

    Raises:
        WeightError: If w is uncertified, not skew-symmetric, exceeds n^k, or
            misses one of the edges.
    """
    if w.certification != Certification.NONZERO_CIRCULATION or not w.skew_symmetric:
        raise WeightError("shift_to_isolating needs skew-symmetric non-zero circulation weights.")
    if w.max_abs() > n**k:
        raise WeightError(f"Weight {w.max_abs()} exceeds the bound {n}^{k}.")
    kept = dict(w.weights)
    if edges is not None:
        edges = set(edges)
        missing = sorted(edges - kept.keys())
        if missing:
            raise WeightError(f"Edge {missing[0]} has no weight.")
        kept = {e: kept[e] for e in edges}
    offset = n ** (k + 2)
    weights = {e: x + offset for e, x in kept.items()}
    return WeightAssignment(
        weights,
        bound_exponent=_exponent(weights, n),
        certification=Certification.ISOLATING,
    )


def zero_deleted_weights(u: WeightAssignment, eminus: Iterable[Edge]) -> WeightAssignment:
    """Set the weight of every deleted edge, in both orientations, to 0.

    The surviving graph keeps its non-zero circulation, so the
    certification carries over.
    """
    weights = dict(u.weights)
    for a, b in eminus:
        for e in ((a, b), (b, a)):
            if e in weights:
                weights[e] = 0
    return WeightAssignment(
        weights,
        skew_symmetric=u.skew_symmetric,
        bound_exponent=u.bound_exponent,
        certification=u.certification,
    )


def _charge_bag(t: TreeDecomposition, u: int, v: int) -> int:
    bu, bv = t.highest_bag(u), t.highest_bag(v)
    return bu if t.level(bu) <= t.level(bv) else bv


def btw_bounded_degree_weights(
    g: Graph, t: TreeDecomposition, d: int, k: int
) -> WeightAssignment:
    """Skew-symmetric non-zero circulation weights for bounded degree and width.

    With beta = 2d(k+1) and base = 4 * beta * 3^beta + 2, the edge (u, v),
    u < v, charged to bag B at height h as the l-th edge of B (lexicographic,
    1-based) gets base^h * 3^l; the reverse edge gets the negation.

    Args:
        g: The graph; read as undirected.
        t: A valid binary decomposition of g.
        d: Degree bound of g.
        k: Width bound of t.

    Raises:
        GraphError: If t is not a valid decomposition of g.
        WeightError: If t is not binary or the degree or width bound fails.
    """
    report = validate_tree_decomposition(g, t)
    if not report.is_valid:
        raise GraphError(f"Invalid tree decomposition: {report.violations[0]}")
    if not t.is_binary:
        raise WeightError("Tree decomposition must be binary.")
    if g.max_degree() > d:
        raise WeightError(f"Graph degree {g.max_degree()} exceeds d={d}.")
    if t.width > k:
        raise WeightError(f"Decomposition width {t.width} exceeds k={k}.")

    beta = 2 * d * (k + 1)
    base = 4 * beta * 3**beta + 2

    charged: dict[int, list[Edge]] = {}
    for u, v in g.undirected_pairs():
        charged.setdefault(_charge_bag(t, u, v), []).append((u, v))

    weights: dict[Edge, int] = {}
    for bag, pairs in charged.items():
        height = t.height(bag)
        for index, (u, v) in enumerate(sorted(pairs), start=1):
            x = base**height * 3**index
            weights[(u, v)] = x
            weights[(v, u)] = -x

    return WeightAssignment(
        weights,
        skew_symmetric=True,
        bound_exponent=_exponent(weights, g.n),
        certification=Certification.NONZERO_CIRCULATION,
    )


class _CopyGraph:
    """One copy v_B per (node v, bag B) incidence, with copy-chain and bag edges."""

    def __init__(self, g: Graph, t: TreeDecomposition) -> None:
        self.t = t
        self.index: dict[tuple[int, int], int] = {}
        for bag in t.preorder:
            for v in sorted(t.bags[bag]):
                self.index[(v, bag)] = len(self.index)

        pairs: set[Edge] = set()
        for bag in t.preorder:
            up = t.parent[bag]
            if up is None:
                continue
            for v in t.bags[bag] & t.bags[up]:
                pairs.add((self.index[(v, bag)], self.index[(v, up)]))

        self.meeting: dict[Edge, int] = {}
        for u, v in g.undirected_pairs():
            # highest common bag: the lower of the two highest bags
            bu, bv = t.highest_bag(u), t.highest_bag(v)
            meet = bu if t.level(bu) >= t.level(bv) else bv
            self.meeting[(u, v)] = meet
            pairs.add((self.index[(u, meet)], self.index[(v, meet)]))
        self.graph = Graph.undirected(len(self.index), pairs)

        widened: dict[int, frozenset[int]] = {}
        for bag in t.preorder:
            members = {self.index[(v, bag)] for v in t.bags[bag]}
            up = t.parent[bag]
            if up is not None:
                members |= {self.index[(v, up)] for v in t.bags[bag] & t.bags[up]}
            widened[bag] = frozenset(members)
        self.decomposition = TreeDecomposition(parent=t.parent, bags=widened)

    def chain_weight(self, w: WeightAssignment, v: int, low: int, high: int) -> int:
        """Weight of the copy chain v_low -> ... -> v_high, high an ancestor of low."""
        total = 0
        bag = low
        while bag != high:
            up = self.t.parent[bag]
            total += w[(self.index[(v, bag)], self.index[(v, up)])]
            bag = up
        return total

    def path_weight(self, w: WeightAssignment, u: int, v: int) -> int:
        """Weight of the copy path from u_B(u) to v_B(v)."""
        meet = self.meeting[(min(u, v), max(u, v))]
        bu, bv = self.t.highest_bag(u), self.t.highest_bag(v)
        down = -self.chain_weight(w, u, meet, bu)
        across = w[(self.index[(u, meet)], self.index[(v, meet)])]
        up = self.chain_weight(w, v, meet, bv)
        return down + across + up


def btw_weights(g: Graph, t: TreeDecomposition) -> WeightAssignment:
    """Non-zero circulation weights for bounded treewidth and any degree.

    Builds the copy graph and its widened decomposition, weights it with
    btw_bounded_degree_weights, and gives every original edge the total
    weight of its copy path.

    Raises:
        GraphError: If t is not a valid decomposition of g.
    """
    report = validate_tree_decomposition(g, t)
    if not report.is_valid:
        raise GraphError(f"Invalid tree decomposition: {report.violations[0]}")
    t = binarize_decomposition(t)
    copy = _CopyGraph(g, t)
    w_copy = btw_bounded_degree_weights(
        copy.graph,
        copy.decomposition,
        max(copy.graph.max_degree(), 1),
        max(copy.decomposition.width, 0),
    )
    logger.debug(
        f"Copy graph: {copy.graph.n} nodes, degree {copy.graph.max_degree()}, "
        f"width {copy.decomposition.width}"
    )

    weights: dict[Edge, int] = {}
    for u, v in g.undirected_pairs():
        x = copy.path_weight(w_copy, u, v)
        weights[(u, v)] = x
        weights[(v, u)] = -x
    return WeightAssignment(
        weights,
        skew_symmetric=True,
        bound_exponent=_exponent(weights, g.n),
        certification=Certification.NONZERO_CIRCULATION,
    )


def default_weight_cap(g: Graph) -> int:
    """2 * m * n, at least 2."""
    return max(2, 2 * len(g.edges) * g.n)


def random_isolating_weights(
    g: Graph, seed: int, weight_cap: int | None = None, retries: int = 32
) -> WeightAssignment:
    """Uniform weights in [1, weight_cap], redrawn until isolating.

    Args:
        g: Directed graph.
        seed: Seed of the private random generator.
        weight_cap: Largest weight; 0 or None means 2 * m * n.
        retries: Number of draws before giving up.

    Raises:
        RetriesExhaustedError: If no draw was isolating.
    """
    cap = weight_cap or default_weight_cap(g)
    rng = random.Random(seed)
    edges = g.sorted_edges()
    for attempt in range(1, retries + 1):
        w = WeightAssignment({e: rng.randint(1, cap) for e in edges})
        if isolation_report(g, w, exhaustive=False).is_isolating:
            if attempt > 1:
                logger.debug(f"Isolating weights found on draw {attempt}")
            return WeightAssignment(
                w.weights,
                bound_exponent=_exponent(w.weights, g.n),
                certification=Certification.ISOLATING,
            )
    raise RetriesExhaustedError(
        f"No isolating weights in [1, {cap}] after {retries} draws."
    )
