"""Weights for inserted edges that keep the changed graph isolating.

The inserted edges E+ and the old reachability relation form an adorned
graph H on the affected nodes: E+ are its real edges, and a fictitious edge
(u, v) records that u already reached v. A path through the changed graph
that uses new edges is, seen from H, a sequence of real edges glued together
by fictitious ones. If H's real edges are weighted so that every node pair
has a unique lightest set of real edges, and pairs with different lightest
edge sets get different weights, then scaling those weights by n^(k+2) on top
of an isolating weighting of the old graph isolates the changed graph.

H's weights are built from w0(u, v) = 2^((N+1)u + v) reduced modulo a few
primes, one radix-N^beta digit per prime. Primes are picked greedily, level
by level: level i must separate all sequences with at most 2^i real edges.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field

from loguru import logger
from sympy import primerange

from bulk_reach.core.constants import ADORNED_REAL_EDGE_LIMIT, DEFAULT_PRIME_BIT_BUDGET
from bulk_reach.core.errors import (
    ChangeError,
    GuardExceededError,
    PrimeSearchError,
    RetriesExhaustedError,
    WeightError,
)
from bulk_reach.core.models import Certification, Edge, Graph, WeightAssignment
from bulk_reach.core.oracle import isolation_report
from bulk_reach.core.weights import bound_exponent, default_weight_cap

Pair = tuple[int, int]


def find_separating_prime(
    values: Iterable[int], bit_budget: int = DEFAULT_PRIME_BIT_BUDGET
) -> int:
    """Smallest prime p under which the given integers stay pairwise distinct.

    Raises:
        WeightError: If fewer than two distinct values are given.
        PrimeSearchError: If no prime below 2^bit_budget separates them.
    """
    distinct = set(values)
    if len(distinct) < 2:
        raise WeightError("Need at least two distinct values to separate.")
    largest = 0
    for p in primerange(2, 1 << bit_budget):
        largest = p
        if len({x % p for x in distinct}) == len(distinct):
            return p
    raise PrimeSearchError(
        f"No prime below 2^{bit_budget} separates {len(distinct)} values.",
        largest_prime_tried=largest,
    )


@dataclass(frozen=True)
class AdornedGraph:
    """Affected nodes, renumbered 1..N by ascending original id.

    Attributes:
        nodes: Original node ids, ascending; local id i+1 is nodes[i].
        real: Real edges in local ids, sorted.
        fictitious: Fictitious edges in local ids.
    """

    nodes: tuple[int, ...]
    real: tuple[Edge, ...]
    fictitious: frozenset[Edge]

    @classmethod
    def from_change(
        cls, g: Graph, reach: Iterable[Pair], eplus: Iterable[Edge]
    ) -> AdornedGraph:
        """H on the endpoints of E+: real edges E+, fictitious edges from reach."""
        eplus = sorted(set(eplus))
        nodes = tuple(sorted({x for e in eplus for x in e}))
        local = {v: i + 1 for i, v in enumerate(nodes)}
        real = tuple(sorted((local[u], local[v]) for u, v in eplus))
        fictitious = frozenset(
            (local[u], local[v])
            for u, v in reach
            if u != v and u in local and v in local
        )
        return cls(nodes, real, fictitious)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def original(self, e: Edge) -> Edge:
        return self.nodes[e[0] - 1], self.nodes[e[1] - 1]

    def base_weight(self, e: Edge) -> int:
        """w0(u, v) = 2^((N+1)u + v) on local ids."""
        u, v = e
        return 1 << ((self.size + 1) * u + v)

    def _joins(self, x: int, y: int) -> bool:
        return x == y or (x, y) in self.fictitious

    def sources(self, e: Edge) -> set[int]:
        """Nodes from which a sequence may enter e: its tail or a fictitious predecessor."""
        return {x for x in range(1, self.size + 1) if self._joins(x, e[0])}

    def targets(self, e: Edge) -> set[int]:
        return {y for y in range(1, self.size + 1) if self._joins(e[1], y)}

    def follows(self, e: Edge, f: Edge) -> bool:
        """Whether real edge f may come right after e in a sequence."""
        return self._joins(e[1], f[0])


@dataclass
class SequenceStats:
    """Lightest real sequences of one node pair.

    Sequences are compared by the set of real edges they use: orderings of
    the same edges always weigh the same, so only edge sets can be told apart.

    Attributes:
        weight: Minimum sequence weight.
        masks: Edge sets (bitmasks over h.real) of the sequences of that weight.
    """

    weight: int
    masks: set[int]

    @property
    def count(self) -> int:
        return len(self.masks)


@dataclass
class StrongIsolationReport:
    """Outcome of checking strong real isolation on an adorned graph.

    Attributes:
        pairs: (s, t) -> SequenceStats in local ids, s != t.
    """

    pairs: dict[Pair, SequenceStats] = field(default_factory=dict)

    def ambiguous_pairs(self) -> list[Pair]:
        return sorted(p for p, s in self.pairs.items() if s.count > 1)

    def weight_collisions(self) -> list[tuple[Pair, Pair]]:
        """Pairs of node pairs whose lightest sequences use different edges but weigh the same."""
        by_weight: dict[int, list[tuple[Pair, frozenset[int]]]] = {}
        for pair, stats in sorted(self.pairs.items()):
            by_weight.setdefault(stats.weight, []).append((pair, frozenset(stats.masks)))
        collisions = []
        for group in by_weight.values():
            for i, (p, mp) in enumerate(group):
                for q, mq in group[i + 1 :]:
                    if mp != mq:
                        collisions.append((p, q))
        return collisions

    @property
    def ok(self) -> bool:
        return not self.ambiguous_pairs() and not self.weight_collisions()


def _real_sequences(h: AdornedGraph, max_real_edges: int) -> Iterator[tuple[int, int, int]]:
    """Yield (first, mask, last) for every edge-distinct real sequence shape.

    A shape stands for all orderings of `mask` that start with `first`, end
    with `last` and chain through `follows`.
    """
    m = len(h.real)
    succ = [[j for j in range(m) if j != i and h.follows(h.real[i], h.real[j])] for i in range(m)]
    for first in range(m):
        layer: set[tuple[int, int]] = {(1 << first, first)}
        length = 1
        while layer:
            for mask, last in sorted(layer):
                yield first, mask, last
            if length == max_real_edges:
                break
            layer = {
                (mask | 1 << nxt, nxt)
                for mask, last in layer
                for nxt in succ[last]
                if not mask >> nxt & 1
            }
            length += 1


def strongly_real_isolates(
    h: AdornedGraph, weights: dict[Edge, int], max_real_edges: int | None = None
) -> StrongIsolationReport:
    """Check strong real isolation over sequences of up to max_real_edges real edges.

    Each pair needs a unique lightest edge set, and two pairs whose lightest
    edge sets differ need different minimum weights. An edge set shared by
    two pairs is fine.

    Args:
        h: The adorned graph.
        weights: Positive weights on h.real (local ids).
        max_real_edges: Longest sequence considered; all of h.real when None.

    Raises:
        GuardExceededError: If h has more than ADORNED_REAL_EDGE_LIMIT real edges.
        WeightError: If a real edge has a non-positive or missing weight.
    """
    if len(h.real) > ADORNED_REAL_EDGE_LIMIT:
        raise GuardExceededError(
            f"Sequence enumeration is limited to {ADORNED_REAL_EDGE_LIMIT} real edges, "
            f"got {len(h.real)}."
        )
    edge_weights = []
    for e in h.real:
        if weights.get(e, 0) <= 0:
            raise WeightError(f"Real edge {e} needs a positive weight.")
        edge_weights.append(weights[e])
    limit = len(h.real) if max_real_edges is None else min(max_real_edges, len(h.real))

    sources = [h.sources(e) for e in h.real]
    targets = [h.targets(e) for e in h.real]
    report = StrongIsolationReport()
    for first, mask, last in _real_sequences(h, limit):
        weight = sum(x for i, x in enumerate(edge_weights) if mask >> i & 1)
        for s in sources[first]:
            for t in targets[last]:
                if s == t:
                    continue
                stats = report.pairs.get((s, t))
                if stats is None or weight < stats.weight:
                    report.pairs[(s, t)] = SequenceStats(weight, {mask})
                elif weight == stats.weight:
                    stats.masks.add(mask)
    return report


def radix_exponent(n_nodes: int, largest_prime: int) -> int:
    """Smallest beta with largest_prime < N^(beta-2).

    A sequence uses fewer than N^2 real edges, so its weight per prime digit
    stays below N^beta and the digits of different primes never carry into
    each other.
    """
    if n_nodes < 2:
        raise WeightError("An adorned graph needs at least two nodes.")
    extra, power = 0, 1
    while power <= largest_prime:
        extra += 1
        power *= n_nodes
    return extra + 2


def digit_weights(h: AdornedGraph, primes: tuple[int, ...], beta: int) -> dict[Edge, int]:
    """sum_j N^(beta(L-j)) (w0(e) mod p_j) over the L given primes."""
    n_levels = len(primes)
    radix = h.size**beta
    return {
        e: sum(
            radix ** (n_levels - j) * (h.base_weight(e) % p)
            for j, p in enumerate(primes, start=1)
        )
        for e in h.real
    }


def level_count(n_nodes: int) -> int:
    """max(1, ceil(log2 N))."""
    return max(1, (n_nodes - 1).bit_length())


@dataclass(frozen=True)
class FamilyMember:
    """One candidate weighting of the changed graph.

    Attributes:
        weights: Base weights on E and scaled H weights on E+.
        primes: The prime sequence it was built from (empty for random members).
    """

    weights: WeightAssignment
    primes: tuple[int, ...] = ()


@dataclass
class WeightFamily:
    """Candidate weightings for one insertion; all agree on the old edges."""

    members: list[FamilyMember]
    base: WeightAssignment
    inserted: frozenset[Edge]

    def __len__(self) -> int:
        return len(self.members)

    def agrees_with_base(self) -> bool:
        return all(
            m.weights[e] == x
            for m in self.members
            for e, x in self.base.items()
            if e not in self.inserted
        )


def _passing_primes(
    h: AdornedGraph,
    prefix: tuple[int, ...],
    beta: int,
    max_real_edges: int | None,
    start: int,
    bit_budget: int,
) -> Iterator[int]:
    for p in primerange(max(start, 3), 1 << bit_budget):
        weights = digit_weights(h, (*prefix, p), beta)
        if strongly_real_isolates(h, weights, max_real_edges).ok:
            yield p


def select_primes(
    h: AdornedGraph, prime_bit_budget: int = DEFAULT_PRIME_BIT_BUDGET, sibling_width: int = 1
) -> list[tuple[int, ...]]:
    """Greedy prime sequences for h: the main sequence first, then siblings.

    Level i (1-based) accepts the smallest prime for which the digits so far
    strongly isolate sequences of at most 2^i real edges; the last level
    checks all sequences. A sibling replaces
    one level's prime by one of the next passing primes at that level, and is
    kept when the full sequence still passes the final check.

    Raises:
        PrimeSearchError: If some level has no passing prime within the budget.
    """
    # digits are carry-free, so checking at the budget radix matches every
    # sequence drawn from primes below the budget
    beta = radix_exponent(h.size, (1 << prime_bit_budget) - 1)
    levels = level_count(h.size)
    start = 3
    if len(h.real) >= 2:
        start = find_separating_prime((h.base_weight(e) for e in h.real), prime_bit_budget)

    chosen: list[int] = []
    for level in range(1, levels + 1):
        # the last level covers every sequence
        limit = None if level == levels else 1 << level
        first = start if level == 1 else 3
        p = next(_passing_primes(h, tuple(chosen), beta, limit, first, prime_bit_budget), None)
        if p is None:
            raise PrimeSearchError(
                f"No prime below 2^{prime_bit_budget} passes level {level}.",
                largest_prime_tried=(1 << prime_bit_budget) - 1,
                level=level,
            )
        chosen.append(p)
    main = tuple(chosen)
    sequences = [main]

    if sibling_width > 1:
        for level in range(1, levels + 1):
            prefix = main[: level - 1]
            limit = None if level == levels else 1 << level
            alternatives = _passing_primes(
                h, prefix, beta, limit, main[level - 1] + 1, prime_bit_budget
            )
            for _, q in zip(range(sibling_width - 1), alternatives, strict=False):
                candidate = (*prefix, q, *main[level:])
                if strongly_real_isolates(h, digit_weights(h, candidate, beta)).ok:
                    sequences.append(candidate)
    logger.debug(f"Adorned graph N={h.size}: {len(sequences)} prime sequence(s), main {main}")
    return sequences


def _check_insertion(g: Graph, eplus: Iterable[Edge]) -> frozenset[Edge]:
    eplus = frozenset(eplus)
    clash = sorted(eplus & g.edges)
    if clash:
        raise ChangeError(f"Inserted edge {clash[0]} is already present.")
    return eplus


def insertion_weight_family(
    g: Graph,
    reach: Iterable[Pair],
    eplus: Iterable[Edge],
    w: WeightAssignment,
    *,
    k: int | None = None,
    prime_bit_budget: int = DEFAULT_PRIME_BIT_BUDGET,
    sibling_width: int = 1,
    max_members: int = 8,
) -> WeightFamily:
    """The family of weightings for inserting eplus into g.

    Every member keeps w on g's edges and gives e in E+ the weight
    n^(k+2) * w_p(e) for its prime sequence p.

    Args:
        g: The graph before insertion.
        reach: Its transitive closure.
        eplus: Edges to insert, disjoint from g's edges.
        w: Isolating weights on g with |w(e)| <= n^k.
        k: Bound exponent of w; derived from w when None.
        prime_bit_budget: Soft bit budget for each prime.
        sibling_width: Passing primes tried per level (1 = greedy only).
        max_members: Cap on the family size.

    Raises:
        ChangeError: If an inserted edge is already present.
        PrimeSearchError: If the greedy search fails at some level.
    """
    eplus = _check_insertion(g, eplus)
    if k is None:
        k = w.bound_exponent if w.bound_exponent is not None else bound_exponent(w, g.n)
    scale = g.n ** (k + 2)
    base = w.restricted_to(g.edges)
    if not eplus:
        return WeightFamily([FamilyMember(base)], base, eplus)

    h = AdornedGraph.from_change(g, reach, eplus)
    members = []
    for primes in select_primes(h, prime_bit_budget, sibling_width)[:max_members]:
        beta = radix_exponent(h.size, max(primes))
        weights = dict(base.weights)
        for e, x in digit_weights(h, primes, beta).items():
            weights[h.original(e)] = scale * x
        members.append(FamilyMember(WeightAssignment(weights), primes))
    return WeightFamily(members, base, eplus)


def random_insertion_family(
    g: Graph,
    eplus: Iterable[Edge],
    w: WeightAssignment,
    seed: int,
    *,
    weight_cap: int | None = None,
    retries: int = 32,
) -> WeightFamily:
    """One random member: w on g's edges, fresh uniform weights on E+.

    The member is kept only once the changed graph is isolating under it.

    Raises:
        ChangeError: If an inserted edge is already present.
        RetriesExhaustedError: If no draw isolates the changed graph.
    """
    eplus = _check_insertion(g, eplus)
    base = w.restricted_to(g.edges)
    changed = g.with_edges(g.edges | eplus)
    cap = weight_cap or default_weight_cap(changed)
    rng = random.Random(seed)
    for _ in range(retries):
        weights = dict(base.weights)
        weights.update({e: rng.randint(1, cap) for e in sorted(eplus)})
        candidate = WeightAssignment(weights)
        if isolation_report(changed, candidate, exhaustive=False).is_isolating:
            member = FamilyMember(candidate.certified(Certification.ISOLATING))
            return WeightFamily([member], base, eplus)
    raise RetriesExhaustedError(
        f"No isolating weights for {len(eplus)} inserted edge(s) after {retries} draws."
    )
