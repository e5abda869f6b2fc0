"""Change-script replay with oracle cross-checking.

A replay loads the initial graph into a fresh engine, then applies every
block of the script as one normalized BulkChange. After each step the engine
answers a set of queries (all ordered pairs on small graphs, a seeded sample
otherwise) which are compared with the BFS closure of the changed graph.
Engine update and oracle closure of a step run concurrently in the thread
pool; steps stay sequential.
"""

from __future__ import annotations

import asyncio
import json
import math
import random
import time
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, TypeVar

from loguru import logger

from bulk_reach.core.async_executor import AsyncExecutor
from bulk_reach.core.errors import ChangeError
from bulk_reach.core.graph_ops import affected_nodes, apply_change, normalize_change
from bulk_reach.core.models import BulkChange, Graph
from bulk_reach.core.oracle import transitive_closure
from bulk_reach.core.settings_manager import EngineSettings
from bulk_reach.engines import ReachabilityEngine, create_engine
from bulk_reach.engines.engine_base import Pair

T = TypeVar("T")

MISMATCHES_KEPT = 5


def budget_bound(n: int, c: int) -> int:
    """ceil(log2(n)^c), the change size the complexity bounds are stated for."""
    if n <= 1:
        return 0
    return math.ceil(math.log2(n) ** c)


def budget_check(n: int, size: int, c: int) -> bool:
    """True iff a change of `size` edges is within ceil(log2(n)^c)."""
    return size <= budget_bound(n, c)


@dataclass
class ReplayStep:
    """One record of the replay report."""

    step: int
    inserted: int
    deleted: int
    affected: int
    within_budget: bool
    elapsed_engine: float
    elapsed_oracle: float | None = None
    agrees: bool | None = None
    queries: int = 0
    mismatches: list[Pair] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> dict[str, Any]:
        record = asdict(self)
        record["mismatches"] = [list(p) for p in self.mismatches]
        return record


@dataclass
class ReplayReport:
    """Per-step records plus a pass/fail summary.

    Attributes:
        engine: Engine name.
        n: Node count.
        oracle_check: Whether steps were cross-checked.
        budget: The change-size budget ceil(log2(n)^c).
        load_agrees: Oracle agreement right after loading the initial graph.
        steps: One record per script block.
    """

    engine: str
    n: int
    oracle_check: bool
    budget: int
    load_agrees: bool | None = None
    steps: list[ReplayStep] = field(default_factory=list)

    @property
    def disagreements(self) -> int:
        return sum(1 for s in self.steps if s.agrees is False)

    @property
    def passed(self) -> bool:
        return self.load_agrees is not False and self.disagreements == 0

    def summary(self) -> dict[str, Any]:
        return {
            "summary": True,
            "engine": self.engine,
            "n": self.n,
            "oracle_check": self.oracle_check,
            "budget": self.budget,
            "load_agrees": self.load_agrees,
            "steps": len(self.steps),
            "disagreements": self.disagreements,
            "over_budget": sum(1 for s in self.steps if not s.within_budget),
            "passed": self.passed,
        }

    def to_jsonl(self) -> str:
        """One JSON object per step, then the summary; keys sorted."""
        records = [s.to_record() for s in self.steps] + [self.summary()]
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def _timed(func: Callable[..., T], *args: Any) -> tuple[T, float]:
    start = time.perf_counter()
    result = func(*args)
    return result, time.perf_counter() - start


def query_pairs(n: int, rng: random.Random, threshold: int, sample_size: int) -> list[Pair]:
    """All ordered pairs up to `threshold` nodes, otherwise a seeded sample."""
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    if n <= threshold or len(pairs) <= sample_size:
        return pairs
    return sorted(rng.sample(pairs, sample_size))


def _compare(
    engine: ReachabilityEngine, closure: frozenset[Pair] | None, pairs: Sequence[Pair]
) -> tuple[bool | None, list[Pair]]:
    answers = [(p, engine.query(*p)) for p in pairs]
    if closure is None:
        return None, []
    mismatches = [p for p, got in answers if got != (p in closure)]
    return not mismatches, mismatches[:MISMATCHES_KEPT]


def check_supported(engine: ReachabilityEngine, g: Graph, changes: Sequence[BulkChange]) -> None:
    """Reject scripts the engine cannot run.

    Raises:
        ChangeError: On a directedness mismatch or deletions for an
            insertion-only engine.
    """
    if engine.directed != g.directed:
        kind = "directed" if engine.directed else "undirected"
        raise ChangeError(f"The {engine.name} engine needs {kind} graphs.")
    if not engine.supports_deletions:
        for index, c in enumerate(changes, start=1):
            if c.deleted:
                raise ChangeError(f"Step {index}: the {engine.name} engine cannot delete edges.")


async def replay_async(
    g: Graph,
    changes: Sequence[BulkChange],
    engine_name: str,
    settings: EngineSettings | None = None,
    *,
    oracle_check: bool | None = None,
    budget_c: int | None = None,
    seed: int | None = None,
    mode: str | None = None,
    weight_scheme: str | None = None,
    dump_dir: Path | None = None,
) -> ReplayReport:
    """Replay a change script on one engine.

    Flags left as None take their value from settings. With dump_dir set,
    the engine writes its final internal state there.

    Raises:
        ChangeError: If the engine cannot run the script.
        BulkReachError: Whatever the engine raises while applying a step.
    """
    settings = settings or EngineSettings()
    check = settings.oracle_check_default if oracle_check is None else oracle_check
    c = settings.budget_c if budget_c is None else budget_c
    seed = settings.default_seed if seed is None else seed
    rng = random.Random(seed)

    engine = create_engine(
        engine_name, g.n, settings, seed=seed, mode=mode, weight_scheme=weight_scheme
    )
    check_supported(engine, g, changes)
    report = ReplayReport(engine.name, g.n, check, budget_bound(g.n, c))

    current = Graph(g.n, directed=g.directed)
    load = BulkChange.of(g.undirected_pairs() if not g.directed else g.edges)
    if not load.is_empty:
        current = apply_change(current, load)
        await AsyncExecutor.run(engine.apply, load)
        closure = transitive_closure(current) if check else None
        pairs = query_pairs(g.n, rng, settings.all_pairs_threshold, settings.query_sample_size)
        report.load_agrees, _ = _compare(engine, closure, pairs)

    for index, change in enumerate(changes, start=1):
        normalized = normalize_change(current, change)
        current = apply_change(current, normalized)
        calls: list[tuple[Callable[..., Any], tuple[Any, ...]]] = [(_timed, (engine.apply, normalized))]
        if check:
            calls.append((_timed, (transitive_closure, current)))
        results = await AsyncExecutor.gather(calls)
        (_, elapsed_engine) = results[0]
        closure, elapsed_oracle = results[1] if check else (None, None)

        pairs = query_pairs(g.n, rng, settings.all_pairs_threshold, settings.query_sample_size)
        agrees, mismatches = _compare(engine, closure, pairs)
        within = budget_check(g.n, normalized.size, c)
        if not within:
            logger.warning(
                f"Step {index}: |change| = {normalized.size} exceeds the budget {report.budget}"
            )
        if agrees is False:
            logger.error(f"Step {index}: {engine.name} disagrees with the oracle on {mismatches}")
        report.steps.append(
            ReplayStep(
                step=index,
                inserted=len(normalized.inserted),
                deleted=len(normalized.deleted),
                affected=len(affected_nodes(normalized)),
                within_budget=within,
                elapsed_engine=elapsed_engine,
                elapsed_oracle=elapsed_oracle,
                agrees=agrees,
                queries=len(pairs),
                mismatches=mismatches,
                stats=engine.stats(),
            )
        )
        logger.debug(f"Step {index} done in {elapsed_engine:.4f}s")

    if dump_dir is not None:
        written = engine.dump_state(dump_dir)
        if written:
            logger.info(f"Wrote {len(written)} state file(s) to {dump_dir}")
        else:
            logger.warning(f"The {engine.name} engine has no state to dump")

    logger.info(
        f"Replayed {len(changes)} step(s) on {engine.name}: "
        f"{'pass' if report.passed else 'FAIL'}"
    )
    return report


def replay(g: Graph, changes: Sequence[BulkChange], engine_name: str, **kwargs: Any) -> ReplayReport:
    """Synchronous wrapper around replay_async."""
    return asyncio.run(replay_async(g, changes, engine_name, **kwargs))
