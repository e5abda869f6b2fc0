"""Timing sweeps over generated instances.

Each (engine, n, batch) cell starts from an empty graph and replays a
generated script without oracle checks; the record holds the median
per-step engine time.
"""

from __future__ import annotations

import statistics
from collections.abc import Iterable
from dataclasses import replace
from typing import Any

from loguru import logger

from bulk_reach.core.models import Graph
from bulk_reach.core.settings_manager import EngineSettings
from bulk_reach.engines import create_engine
from bulk_reach.harness.generators import change_script
from bulk_reach.harness.replay import replay


def bench(
    engines: Iterable[str],
    sizes: Iterable[int],
    batch_sizes: Iterable[int],
    steps: int = 5,
    seed: int = 0,
    settings: EngineSettings | None = None,
) -> list[dict[str, Any]]:
    """One record per (engine, n, batch) with the median elapsed engine time.

    Raises:
        ChangeError: If an engine name is unknown.
    """
    settings = replace(settings or EngineSettings(), all_pairs_threshold=0, query_sample_size=16)
    records = []
    for name in engines:
        prototype = create_engine(name, 1, settings, seed=seed)
        for n in sizes:
            g = Graph(n, directed=prototype.directed)
            for batch in batch_sizes:
                script = change_script(
                    g, steps, batch, seed, insert_only=not prototype.supports_deletions
                )
                report = replay(g, script, name, settings=settings, oracle_check=False, seed=seed)
                elapsed = [s.elapsed_engine for s in report.steps]
                records.append(
                    {
                        "engine": name,
                        "n": n,
                        "batch": batch,
                        "steps": len(elapsed),
                        "elapsed_median": statistics.median(elapsed) if elapsed else 0.0,
                        "elapsed_total": sum(elapsed),
                    }
                )
                logger.debug(f"bench {name} n={n} batch={batch}: {records[-1]['elapsed_median']:.4f}s")
    return records
