"""Common surface of the dynamic engines.

The replay harness drives every engine through ReachabilityEngine: apply a
BulkChange, then answer reachability queries. The functional cores live in
the engine modules as pure functions over frozen state dataclasses; the
classes here only hold the current state.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

from bulk_reach.core.errors import NodeRangeError
from bulk_reach.core.models import BulkChange, Graph
from bulk_reach.core.validator import validate_node

Pair = tuple[int, int]


def check_domain(n: int) -> None:
    """Reject an empty node domain."""
    if n < 1:
        raise NodeRangeError(f"Node domain must be non-empty, got n={n}.")


def check_nodes(n: int, *nodes: int) -> None:
    """Raise NodeRangeError for the first node outside 0..n-1."""
    for node in nodes:
        ok, msg = validate_node(n, node)
        if not ok:
            raise NodeRangeError(msg)


class ReachabilityEngine(ABC):
    """A dynamic engine answering reachability after each bulk change.

    Attributes:
        name: Engine selector used on the command line.
        directed: Whether the engine works on directed graphs.
        supports_deletions: Whether changes may delete edges.
    """

    name: str = ""
    directed: bool = True
    supports_deletions: bool = True

    @property
    @abstractmethod
    def graph(self) -> Graph:
        """The current graph."""

    @abstractmethod
    def apply(self, change: BulkChange) -> None:
        """Apply one normalized change."""

    @abstractmethod
    def query(self, a: int, b: int) -> bool:
        """Whether b is reachable from a (a == b is always reachable)."""

    def reach_pairs(self) -> frozenset[Pair]:
        """All ordered pairs (a, b), a != b, the engine reports reachable."""
        n = self.graph.n
        return frozenset(
            (a, b) for a in range(n) for b in range(n) if a != b and self.query(a, b)
        )

    def stats(self) -> dict[str, Any]:
        """Engine-specific numbers for the last change."""
        return {}

    def dump_state(self, directory: Path) -> list[Path]:
        """Write the engine internals under directory; returns the written files."""
        return []
