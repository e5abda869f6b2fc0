"""Reachability from walk-parity power series.

For positive weights w, entry (s, t) of (I - A(x))^-1 over GF(2)[[x]], with
A(x)[u][v] = x^w(u,v), counts s -> t walks of each total weight mod 2. Any
nonzero coefficient witnesses a walk, and when w is isolating the
coefficient at the minimum path weight is 1, so reachability is exactly
"the entry is nonzero". The engine keeps these matrices truncated above
degree b = n * max weight, which covers every minimum path weight.

A change alters few entries of I - A, so the stored inverse is updated with
the Sherman-Morrison-Woodbury identity instead of being recomputed.
Deletions keep the weights of surviving edges. Insertions need new weights
that keep the graph isolating; they come from a family of candidates, each
kept as its own member with its own matrix.

Modes:
    faithful: keep the whole candidate family, capped at max_members. The
        isolation check runs only after deletions, and the members are
        rebuilt when none of them isolates the surviving graph.
    verified: keep one member whose weights pass the isolation check after
        every change, rebuilding the weights when none does.

Weight schemes:
    derandomized ("paper"): tree-decomposition weights shifted to isolating
        ones, and the prime-based insertion family. Every insertion scales the
        new weights above the old ones, so once the degree bound would exceed
        the coefficient budget the members are rebuilt as if the whole edge
        set had been inserted into the empty graph.
    random: small uniform weights, redrawn until isolating.
"""

from __future__ import annotations

import asyncio
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from loguru import logger

from bulk_reach.core.async_executor import AsyncExecutor
from bulk_reach.core.constants import WEIGHT_SCHEME_ALIASES
from bulk_reach.core.errors import (
    ChangeError,
    GuardExceededError,
    WeightError,
)
from bulk_reach.core.file_formats import format_weights, write_weights
from bulk_reach.core.models import BulkChange, Certification, Edge, Graph, WeightAssignment
from bulk_reach.core.oracle import isolation_report, transitive_closure
from bulk_reach.core.polymat import (
    PolyMatrix,
    TruncatedPoly,
    UBVDecomposition,
    decompose_delta,
    mat_add,
    mat_mul,
    smw_update,
)
from bulk_reach.core.settings_manager import EngineSettings
from bulk_reach.core.validator import validate_edges
from bulk_reach.core.weight_family import (
    FamilyMember,
    WeightFamily,
    insertion_weight_family,
    random_insertion_family,
)
from bulk_reach.core.weights import (
    bound_exponent,
    random_isolating_weights,
    shift_to_isolating,
    zero_deleted_weights,
)
from bulk_reach.engines.engine_base import (
    Pair,
    ReachabilityEngine,
    check_domain,
    check_nodes,
)

FAITHFUL = "faithful"
VERIFIED = "verified"
DERANDOMIZED = "derandomized"
RANDOM = "random"


@dataclass(frozen=True)
class AlgebraicConfig:
    """Knobs of the algebraic engine (see EngineSettings for meanings)."""

    seed: int = 0
    weight_cap: int = 0
    retries: int = 32
    sibling_width: int = 2
    max_members: int = 8
    prime_bit_budget: int = 16
    coefficient_budget: int = 1 << 20
    parallel_members: bool = False

    @classmethod
    def from_settings(cls, settings: EngineSettings, seed: int | None = None) -> AlgebraicConfig:
        return cls(
            seed=settings.default_seed if seed is None else seed,
            weight_cap=settings.random_weight_cap,
            retries=settings.isolation_retries,
            sibling_width=settings.sibling_width,
            max_members=settings.max_members,
            prime_bit_budget=settings.prime_bit_budget,
            coefficient_budget=settings.coefficient_budget,
            parallel_members=settings.parallel_members,
        )


@dataclass(frozen=True)
class AlgebraicMember:
    """One weighting and its truncated inverse.

    Attributes:
        weights: Positive weights on the current edges.
        matrix: (I - A(x))^-1 over GF(2), truncated at the state's bound.
        primes: Prime sequence of a derandomized-scheme insertion, else empty.
    """

    weights: WeightAssignment
    matrix: PolyMatrix
    primes: tuple[int, ...] = ()


@dataclass(frozen=True)
class AlgebraicState:
    """Current graph with one or more members sharing the degree bound.

    Attributes:
        graph: The current graph.
        members: Member records; the first one seeds the next insertion.
        bound: Degree bound b shared by all matrices.
        mode: "faithful" or "verified".
        scheme: "derandomized" or "random".
        base: Non-zero circulation weights the derandomized scheme started from.
        config: Engine knobs.
        draws: Random draws made so far (keeps reseeding deterministic).
    """

    graph: Graph
    members: tuple[AlgebraicMember, ...]
    bound: int
    mode: str = VERIFIED
    scheme: str = RANDOM
    base: WeightAssignment | None = None
    config: AlgebraicConfig = field(default_factory=AlgebraicConfig)
    draws: int = 0

    @property
    def primary(self) -> AlgebraicMember:
        return self.members[0]


def degree_bound(n: int, wmax: int) -> int:
    """b = n * wmax: every simple path has fewer than n edges.

    Raises:
        WeightError: If wmax < 1.
    """
    if wmax < 1:
        raise WeightError(f"Maximum weight must be >= 1, got {wmax}.")
    return n * wmax


def _check_budget(bound: int, config: AlgebraicConfig) -> None:
    if bound > config.coefficient_budget:
        raise GuardExceededError(
            f"Degree bound {bound} exceeds the coefficient budget {config.coefficient_budget}."
        )


def walk_matrix(g: Graph, w: WeightAssignment, bound: int) -> PolyMatrix:
    """(I - A(x))^-1 truncated at `bound`, by geometric doubling.

    D_0 = I and D_(j+1) = D_j + A^(2^j) D_j, until A^(2^j) vanishes below
    the bound because every walk of 2^j edges weighs at least 2^j * min w.
    """
    edge_weights = {e: w[e] for e in g.edges}
    identity = PolyMatrix.identity(g.n, bound)
    if not edge_weights:
        return identity
    power = PolyMatrix.from_edges(g.n, edge_weights, bound)
    lightest = min(edge_weights.values())
    series = identity
    j = 0
    while (1 << j) * lightest <= bound:
        series = mat_add(series, mat_mul(power, series))
        power = mat_mul(power, power)
        j += 1
    return series


def _member_delta(
    w: WeightAssignment, edges: Iterable[Edge], n: int, bound: int
) -> UBVDecomposition:
    # Over GF(2) inserting and deleting an edge both add x^w to I - A.
    entries = [(u, v, TruncatedPoly.monomial(w[(u, v)], bound)) for u, v in sorted(edges)]
    return decompose_delta(entries, n, bound)


def update_members(updates: Sequence[tuple[PolyMatrix, UBVDecomposition]]) -> list[PolyMatrix]:
    """Apply one SMW update per member, in member order."""
    return [smw_update(c, d) for c, d in updates]


async def update_members_async(
    updates: Sequence[tuple[PolyMatrix, UBVDecomposition]],
) -> list[PolyMatrix]:
    """Same as update_members, with members updated concurrently in the thread pool."""
    return await AsyncExecutor.gather([(smw_update, (c, d)) for c, d in updates])


def _run_updates(
    updates: Sequence[tuple[PolyMatrix, UBVDecomposition]], config: AlgebraicConfig
) -> list[PolyMatrix]:
    # engine updates run in a worker thread, which has no event loop of its own
    if config.parallel_members and len(updates) > 1:
        return asyncio.run(update_members_async(updates))
    return update_members(updates)


def _fresh_members(
    g: Graph, weightings: Sequence[FamilyMember], config: AlgebraicConfig, bound: int | None = None
) -> tuple[tuple[AlgebraicMember, ...], int]:
    wmax = max(max((m.weights.max_abs() for m in weightings), default=1), 1)
    b = max(bound or 0, degree_bound(g.n, wmax))
    _check_budget(b, config)
    members = tuple(
        AlgebraicMember(m.weights, walk_matrix(g, m.weights, b), m.primes) for m in weightings
    )
    return members, b


def _draw_seed(config: AlgebraicConfig, draws: int) -> int:
    return random.Random(f"{config.seed}:{draws}").getrandbits(32)


def init(
    g: Graph,
    u: WeightAssignment | None = None,
    k: int | None = None,
    mode: str = VERIFIED,
    *,
    weights: WeightAssignment | None = None,
    config: AlgebraicConfig | None = None,
) -> AlgebraicState:
    """Build the single-member state for g.

    Exactly one weight source is used: `weights` (already isolating, the
    test mode), else `u` (non-zero circulation weights, shifted to isolating
    with exponent k), else random isolating weights drawn from config.seed.

    Raises:
        NodeRangeError: If g has no nodes.
        WeightError: If u is not certified, or weights are not isolating.
        GuardExceededError: If the degree bound exceeds the coefficient budget.
    """
    check_domain(g.n)
    config = config or AlgebraicConfig()
    base = None
    draws = 0
    if weights is not None:
        if weights.certification not in (Certification.ISOLATING, Certification.STRONGLY_REAL_ISOLATING):
            raise WeightError("Supplied weights must be certified isolating.")
        if not weights.is_positive_on(g.edges):
            raise WeightError("Supplied weights must be positive on every edge.")
        w, scheme = weights.restricted_to(g.edges), RANDOM
    elif u is not None:
        if u.certification != Certification.NONZERO_CIRCULATION:
            raise WeightError("Base weights must be certified non-zero circulation.")
        if k is None:
            k = u.bound_exponent if u.bound_exponent is not None else bound_exponent(u, g.n)
        w, scheme, base = shift_to_isolating(u, g.n, k, g.edges), DERANDOMIZED, u
    else:
        w = random_isolating_weights(
            g, _draw_seed(config, 0), config.weight_cap or None, config.retries
        )
        scheme, draws = RANDOM, 1

    members, b = _fresh_members(g, [FamilyMember(w)], config)
    logger.debug(f"algebraic init: n={g.n}, |E|={len(g.edges)}, b={b}, scheme={scheme}")
    return AlgebraicState(g, members, b, mode, scheme, base, config, draws)


def _is_isolating(g: Graph, w: WeightAssignment) -> bool:
    return isolation_report(g, w, exhaustive=False).is_isolating


def _reweighted(s: AlgebraicState, g: Graph) -> AlgebraicState:
    """Single member with freshly drawn random isolating weights for g."""
    w = random_isolating_weights(
        g, _draw_seed(s.config, s.draws), s.config.weight_cap or None, s.config.retries
    )
    members, b = _fresh_members(g, [FamilyMember(w)], s.config)
    logger.info(f"Drew replacement isolating weights for {len(g.edges)} edges (b={b})")
    return replace(s, graph=g, members=members, bound=b, draws=s.draws + 1)


def _rebuilt(s: AlgebraicState, g: Graph) -> AlgebraicState:
    """Fresh members for g, with weights chosen from scratch.

    The derandomized scheme treats g as one insertion of all its edges into
    the empty graph on the same nodes, which starts again from the smallest
    scale. The random scheme draws new weights.

    Raises:
        GuardExceededError: If even the fresh weights exceed the coefficient budget.
    """
    if s.scheme == RANDOM:
        return _reweighted(s, g)
    family = insertion_weight_family(
        Graph(g.n),
        frozenset(),
        g.edges,
        WeightAssignment({}),
        k=0,
        prime_bit_budget=s.config.prime_bit_budget,
        sibling_width=s.config.sibling_width if s.mode == FAITHFUL else 1,
        max_members=max(1, s.config.max_members),
    )
    weightings = list(family.members)
    if s.mode == VERIFIED:
        weightings = [m for m in weightings if _is_isolating(g, m.weights)][:1]
        if not weightings:
            return _reweighted(s, g)
    members, b = _fresh_members(g, weightings, s.config)
    logger.info(f"Rebuilt {len(members)} member(s) for {len(g.edges)} edges (b={b})")
    return replace(s, graph=g, members=members, bound=b, base=None)


def _recertified(s: AlgebraicState) -> AlgebraicState:
    """Keep the first isolating member, or rebuild when none is."""
    for member in s.members:
        if _is_isolating(s.graph, member.weights):
            return replace(s, members=(member,))
    return _rebuilt(s, s.graph)


def delete_edges(s: AlgebraicState, eminus: Iterable[Edge]) -> AlgebraicState:
    """Remove edges; every member keeps its weights on the surviving edges.

    Surviving weights need not isolate the smaller graph once they include
    weights from earlier insertions, so the members are checked afterwards.
    Faithful mode keeps the family while one member isolates; verified mode
    keeps the first such member. Otherwise the members are rebuilt.

    Raises:
        ChangeError: If an edge is invalid or not present.
    """
    eminus = frozenset(eminus)
    ok, msg = validate_edges(s.graph.n, eminus)
    if not ok:
        raise ChangeError(msg)
    absent = sorted(eminus - s.graph.edges)
    if absent:
        raise ChangeError(f"Cannot delete {absent[0]}: edge not present.")
    if not eminus:
        return s

    g = s.graph.with_edges(s.graph.edges - eminus)
    updates = [(m.matrix, _member_delta(m.weights, eminus, g.n, s.bound)) for m in s.members]
    matrices = _run_updates(updates, s.config)
    members = tuple(
        AlgebraicMember(m.weights.restricted_to(g.edges), c, m.primes)
        for m, c in zip(s.members, matrices, strict=True)
    )
    base = zero_deleted_weights(s.base, eminus) if s.base is not None else None
    state = replace(s, graph=g, members=members, base=base)
    if s.mode == VERIFIED:
        return _recertified(state)
    return _recheck_all(state)


def _recheck_all(s: AlgebraicState) -> AlgebraicState:
    # faithful: keep the family while it can still witness every path
    if any(_is_isolating(s.graph, m.weights) for m in s.members):
        return s
    logger.info("No member isolates the graph after deletion; rebuilding")
    return _rebuilt(s, s.graph)


def _family(s: AlgebraicState, eplus: frozenset[Edge], reach: frozenset[Pair]) -> list[WeightFamily]:
    sources = s.members if s.mode == FAITHFUL else s.members[:1]
    families = []
    for index, member in enumerate(sources):
        if s.scheme == DERANDOMIZED:
            families.append(
                insertion_weight_family(
                    s.graph,
                    reach,
                    eplus,
                    member.weights,
                    prime_bit_budget=s.config.prime_bit_budget,
                    sibling_width=s.config.sibling_width if s.mode == FAITHFUL else 1,
                    max_members=s.config.max_members,
                )
            )
        else:
            families.append(
                random_insertion_family(
                    s.graph,
                    eplus,
                    member.weights,
                    _draw_seed(s.config, s.draws + index),
                    weight_cap=s.config.weight_cap or None,
                    retries=s.config.retries,
                )
            )
    return families


def insert_edges(s: AlgebraicState, eplus: Iterable[Edge]) -> AlgebraicState:
    """Add edges, building one member per candidate weighting.

    The old reachability relation for the insertion family is read off the
    current matrices. When the new weights need a larger degree bound, the
    members are recomputed from scratch at that bound instead.

    Raises:
        ChangeError: If an edge is invalid or already present.
        PrimeSearchError: If the derandomized-scheme family cannot be built.
        GuardExceededError: If the degree bound exceeds the coefficient budget.
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

    reach = reach_pairs(s)
    families = _family(s, eplus, reach)
    g = s.graph.with_edges(s.graph.edges | eplus)

    candidates: list[tuple[AlgebraicMember, FamilyMember]] = []
    for old, family in zip(s.members, families, strict=False):
        for fm in family.members:
            candidates.append((old, fm))
    candidates = candidates[: max(1, s.config.max_members)]
    draws = s.draws + (len(families) if s.scheme == RANDOM else 0)

    if s.mode == VERIFIED:
        passing = [(old, fm) for old, fm in candidates if _is_isolating(g, fm.weights)]
        if not passing:
            logger.info("No insertion candidate is isolating; rebuilding")
            return _rebuilt(replace(s, draws=draws), g)
        candidates = passing[:1]

    wmax = max(max(fm.weights.max_abs() for _, fm in candidates), 1)
    needed = degree_bound(g.n, wmax)
    if needed > s.config.coefficient_budget:
        logger.info(f"Degree bound {needed} exceeds the coefficient budget; rebuilding")
        return _rebuilt(replace(s, draws=draws), g)
    if needed > s.bound:
        members, b = _fresh_members(g, [fm for _, fm in candidates], s.config, needed)
        logger.debug(f"algebraic insert: degree bound {s.bound} -> {b}, members rebuilt")
        return replace(s, graph=g, members=members, bound=b, draws=draws)

    updates = [(old.matrix, _member_delta(fm.weights, eplus, g.n, s.bound)) for old, fm in candidates]
    matrices = _run_updates(updates, s.config)
    members = tuple(
        AlgebraicMember(fm.weights.restricted_to(g.edges), c, fm.primes)
        for (_, fm), c in zip(candidates, matrices, strict=True)
    )
    logger.debug(f"algebraic insert: |E+|={len(eplus)}, {len(members)} member(s), b={s.bound}")
    return replace(s, graph=g, members=members, draws=draws)


def query(s: AlgebraicState, a: int, b: int) -> bool:
    """True iff a == b or some member's (a, b) entry is nonzero.

    Raises:
        NodeRangeError: If a or b is not a node.
    """
    check_nodes(s.graph.n, a, b)
    return a == b or any(m.matrix.bits(a, b) for m in s.members)


def reach_pairs(s: AlgebraicState) -> frozenset[Pair]:
    """Off-diagonal pairs with a nonzero entry in some member."""
    pairs: set[Pair] = set()
    for m in s.members:
        pairs.update((i, j) for i, j in m.matrix.nonzero_entries() if i != j)
    return frozenset(pairs)


def soundness_violations(s: AlgebraicState) -> list[tuple[int, Pair]]:
    """(member index, pair) for every nonzero entry without a real path."""
    closure = transitive_closure(s.graph)
    return [
        (index, (i, j))
        for index, m in enumerate(s.members)
        for i, j in m.matrix.nonzero_entries()
        if i != j and (i, j) not in closure
    ]


def state_dump(s: AlgebraicState) -> str:
    """Weights file and matrix dump of every member."""
    parts = [f"# bound {s.bound} mode {s.mode} scheme {s.scheme}\n"]
    for index, m in enumerate(s.members):
        primes = " ".join(map(str, m.primes)) or "-"
        parts.append(f"# member {index} primes {primes}\n")
        parts.append(format_weights(m.weights))
        parts.append(f"# matrix {index}\n")
        parts.append(m.matrix.dump())
    return "".join(parts)


def write_state(s: AlgebraicState, directory: Path) -> list[Path]:
    """Write state.txt plus member<i>.weights and member<i>.matrix per member.

    Returns:
        The written paths, state.txt first.
    """
    directory.mkdir(parents=True, exist_ok=True)
    summary = directory / "state.txt"
    summary.write_text(state_dump(s), encoding="utf-8")
    written = [summary]
    for index, m in enumerate(s.members):
        weights = directory / f"member{index}.weights"
        write_weights(weights, m.weights)
        matrix = directory / f"member{index}.matrix"
        matrix.write_text(m.matrix.dump(), encoding="utf-8")
        written += [weights, matrix]
    logger.debug(f"Wrote {len(s.members)} member(s) to {directory}")
    return written


def resolve_scheme(scheme: str) -> str:
    """Canonical scheme name; "paper" is the derandomized scheme.

    Raises:
        WeightError: If the scheme is unknown.
    """
    scheme = WEIGHT_SCHEME_ALIASES.get(scheme, scheme)
    if scheme not in (DERANDOMIZED, RANDOM):
        raise WeightError(f"Unknown weight scheme '{scheme}'.")
    return scheme


class AlgebraicEngine(ReachabilityEngine):
    """Directed reachability through truncated walk-parity matrices."""

    name = "algebraic"
    directed = True
    supports_deletions = True

    def __init__(
        self,
        n: int,
        *,
        mode: str = VERIFIED,
        scheme: str = RANDOM,
        config: AlgebraicConfig | None = None,
    ) -> None:
        g = Graph(n)
        if resolve_scheme(scheme) == DERANDOMIZED:
            u = WeightAssignment({}, skew_symmetric=True, certification=Certification.NONZERO_CIRCULATION)
            self.state = init(g, u, 0, mode, config=config)
        else:
            self.state = init(g, mode=mode, config=config)

    @property
    def graph(self) -> Graph:
        return self.state.graph

    def apply(self, change: BulkChange) -> None:
        self.state = insert_edges(self.state, change.inserted)
        self.state = delete_edges(self.state, change.deleted)

    def query(self, a: int, b: int) -> bool:
        return query(self.state, a, b)

    def reach_pairs(self) -> frozenset[Pair]:
        return reach_pairs(self.state)

    def stats(self) -> dict[str, Any]:
        return {"bound": self.state.bound, "members": len(self.state.members)}

    def dump_state(self, directory: Path) -> list[Path]:
        return write_state(self.state, directory)
