"""Data models for bulk-reach.

This module defines the core data structures shared by every engine:
graphs, bulk changes, tree decompositions and weight assignments, together
with the report dataclasses returned by validation.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from functools import cached_property

from bulk_reach.core.errors import GraphError

try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str(self.value)


Edge = tuple[int, int]


def _reverse(edges: Iterable[Edge]) -> set[Edge]:
    return {(v, u) for u, v in edges}


@dataclass(frozen=True)
class Graph:
    """A graph on the dense node set 0..n-1.

    Undirected graphs keep both orientations of every edge, so one directed
    edge set serves every engine.

    Attributes:
        n: Number of nodes.
        edges: Ordered pairs (u, v) with u != v.
        directed: False when the edge set is symmetric by construction.
    """

    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)
    directed: bool = True

    def __post_init__(self) -> None:
        if self.n < 0:
            raise GraphError(f"Node count must be non-negative, got {self.n}.")
        object.__setattr__(self, "edges", frozenset(self.edges))
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"Self-loop ({u},{v}) is not allowed.")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"Edge ({u},{v}) leaves node range 0..{self.n - 1}.")
        if not self.directed and _reverse(self.edges) != self.edges:
            raise GraphError("Undirected graph must contain both orientations.")

    @classmethod
    def undirected(cls, n: int, pairs: Iterable[Edge] = ()) -> Graph:
        """Build an undirected graph from unordered pairs."""
        pairs = set(pairs)
        return cls(n, frozenset(pairs | _reverse(pairs)), directed=False)

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        succ: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            succ[u].append(v)
        return tuple(tuple(sorted(s)) for s in succ)

    def successors(self, u: int) -> tuple[int, ...]:
        """Return the out-neighbours of u in ascending order."""
        return self._adjacency[u]

    def nodes(self) -> range:
        return range(self.n)

    def bidirected(self) -> Graph:
        """Return the bidirected extension (both orientations of every edge)."""
        if not self.directed:
            return self
        return Graph(self.n, self.edges | frozenset(_reverse(self.edges)), directed=False)

    def undirected_pairs(self) -> list[Edge]:
        """Return each underlying undirected edge once, as (min, max), sorted."""
        return sorted({(min(u, v), max(u, v)) for u, v in self.edges})

    def max_degree(self) -> int:
        """Maximum degree of the underlying undirected graph."""
        degree = [0] * self.n
        for u, v in self.undirected_pairs():
            degree[u] += 1
            degree[v] += 1
        return max(degree, default=0)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def with_edges(self, edges: Iterable[Edge]) -> Graph:
        """Return a copy with a replaced edge set."""
        return replace(self, edges=frozenset(edges))


@dataclass(frozen=True)
class BulkChange:
    """One change step: a set of inserted and a set of deleted edges.

    Attributes:
        inserted: The edge set E+.
        deleted: The edge set E-.
    """

    inserted: frozenset[Edge] = field(default_factory=frozenset)
    deleted: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "inserted", frozenset(self.inserted))
        object.__setattr__(self, "deleted", frozenset(self.deleted))
        for u, v in self.inserted | self.deleted:
            if u == v:
                raise GraphError(f"Changed edge ({u},{v}) must have distinct endpoints.")

    @classmethod
    def of(cls, inserted: Iterable[Edge] = (), deleted: Iterable[Edge] = ()) -> BulkChange:
        return cls(frozenset(inserted), frozenset(deleted))

    @property
    def size(self) -> int:
        """Number of distinct changed edges, |E+ ∪ E-|."""
        return len(self.inserted | self.deleted)

    @property
    def is_empty(self) -> bool:
        return not self.inserted and not self.deleted


@dataclass(frozen=True, eq=False)
class TreeDecomposition:
    """A rooted tree of bags over the nodes of a graph.

    Attributes:
        parent: Maps every tree node id to its parent id, or None for the root.
        bags: Maps every tree node id to its bag of graph nodes.
    """

    parent: Mapping[int, int | None]
    bags: Mapping[int, frozenset[int]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(
            self, "bags", {i: frozenset(b) for i, b in self.bags.items()}
        )
        if set(self.parent) != set(self.bags):
            raise GraphError("Every tree node needs exactly one parent entry and one bag.")
        roots = [i for i, p in self.parent.items() if p is None]
        if len(roots) != 1:
            raise GraphError(f"Tree decomposition needs exactly one root, found {len(roots)}.")
        for i, p in self.parent.items():
            if p is not None and p not in self.parent:
                raise GraphError(f"Tree node {i} has unknown parent {p}.")
        if len(self.preorder) != len(self.parent):
            raise GraphError("Parent map does not form a tree rooted at the root.")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TreeDecomposition):
            return NotImplemented
        return self.parent == other.parent and self.bags == other.bags

    @cached_property
    def root(self) -> int:
        return next(i for i, p in self.parent.items() if p is None)

    @cached_property
    def _children(self) -> dict[int, tuple[int, ...]]:
        kids: dict[int, list[int]] = {i: [] for i in self.parent}
        for i, p in self.parent.items():
            if p is not None:
                kids[p].append(i)
        return {i: tuple(sorted(c)) for i, c in kids.items()}

    def children(self, i: int) -> tuple[int, ...]:
        return self._children[i]

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        """Tree nodes root first, children in ascending id order."""
        order: list[int] = []
        stack = [self.root]
        seen: set[int] = set()
        while stack:
            i = stack.pop()
            if i in seen:
                break
            seen.add(i)
            order.append(i)
            stack.extend(reversed(self._children.get(i, ())))
        return tuple(order)

    @cached_property
    def _heights(self) -> dict[int, int]:
        heights: dict[int, int] = {}
        for i in reversed(self.preorder):
            kids = self._children[i]
            heights[i] = 1 + max((heights[c] for c in kids), default=0)
        return heights

    def height(self, i: int) -> int:
        """h(leaf) = 1, h(i) = 1 + max child height."""
        return self._heights[i]

    @cached_property
    def _depths(self) -> dict[int, int]:
        depths = {self.root: 0}
        for i in self.preorder[1:]:
            depths[i] = depths[self.parent[i]] + 1
        return depths

    def level(self, i: int) -> int:
        """Distance of tree node i from the root."""
        return self._depths[i]

    @property
    def depth(self) -> int:
        """Number of edges on a longest root-to-leaf path."""
        return self.height(self.root) - 1

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    @property
    def max_degree(self) -> int:
        """Maximum number of children of any tree node."""
        return max((len(c) for c in self._children.values()), default=0)

    @property
    def is_binary(self) -> bool:
        return self.max_degree <= 2

    @cached_property
    def _highest(self) -> dict[int, int]:
        highest: dict[int, int] = {}
        for i in self.preorder:
            for v in self.bags[i]:
                highest.setdefault(v, i)
        return highest

    def highest_bag(self, v: int) -> int:
        """B(v): the tree node closest to the root whose bag contains v."""
        return self._highest[v]

    def node_height(self, v: int) -> int:
        """h(v) = h(B(v))."""
        return self.height(self.highest_bag(v))

    def covered_nodes(self) -> set[int]:
        return set(self._highest)

    def is_ancestor(self, a: int, d: int) -> bool:
        """True when tree node a is d or an ancestor of d."""
        while d is not None:
            if d == a:
                return True
            d = self.parent[d]
        return False


@dataclass
class DecompositionReport:
    """Result of validating a tree decomposition against a graph.

    Attributes:
        violations: Human-readable violation entries, empty when valid.
        width: Maximum bag size minus one.
        depth: Edges on a longest root-to-leaf path.
        max_degree: Maximum number of children of a tree node.
        is_binary: Whether every tree node has at most two children.
    """

    violations: list[str]
    width: int
    depth: int
    max_degree: int
    is_binary: bool

    @property
    def is_valid(self) -> bool:
        return not self.violations


class Certification(StrEnum):
    """What has been established about a weight assignment."""

    NONE = "none"
    NONZERO_CIRCULATION = "nonzero_circulation"
    ISOLATING = "isolating"
    STRONGLY_REAL_ISOLATING = "strongly_real_isolating"


@dataclass(frozen=True, eq=False)
class WeightAssignment:
    """Integer weights on directed edges plus what is known about them.

    Attributes:
        weights: Edge -> integer weight (arbitrary precision).
        skew_symmetric: Whether w(u,v) = -w(v,u) holds on all stored pairs.
        bound_exponent: k such that all |w(e)| <= n^k, when known.
        certification: Property established for the assignment.
    """

    weights: Mapping[Edge, int]
    skew_symmetric: bool = False
    bound_exponent: int | None = None
    certification: Certification = Certification.NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", dict(self.weights))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightAssignment):
            return NotImplemented
        return (
            self.weights == other.weights
            and self.skew_symmetric == other.skew_symmetric
            and self.certification == other.certification
        )

    def __getitem__(self, edge: Edge) -> int:
        return self.weights[edge]

    def __contains__(self, edge: object) -> bool:
        return edge in self.weights

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.weights))

    def __len__(self) -> int:
        return len(self.weights)

    def get(self, edge: Edge, default: int = 0) -> int:
        return self.weights.get(edge, default)

    def items(self) -> list[tuple[Edge, int]]:
        return sorted(self.weights.items())

    def max_abs(self) -> int:
        return max((abs(x) for x in self.weights.values()), default=0)

    def min_value(self) -> int:
        return min(self.weights.values(), default=0)

    def is_positive_on(self, edges: Iterable[Edge]) -> bool:
        return all(self.weights.get(e, 0) > 0 for e in edges)

    def skew_violations(self) -> list[Edge]:
        """Stored pairs whose reverse is missing or not the negation."""
        return sorted(
            (u, v)
            for (u, v), x in self.weights.items()
            if self.weights.get((v, u)) != -x
        )

    def certified(self, certification: Certification) -> WeightAssignment:
        return replace(self, certification=certification)

    def restricted_to(self, edges: Iterable[Edge]) -> WeightAssignment:
        """Keep only the given edges, preserving metadata."""
        keep = set(edges)
        return replace(
            self, weights={e: x for e, x in self.weights.items() if e in keep}
        )
