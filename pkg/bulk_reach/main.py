"""Command-line entry point for bulk-reach.

Subcommands:
    generate  write a seeded instance (and optionally a change script)
    replay    replay a change script on one engine, cross-checked by the oracle
    weights   compute tree-decomposition weights and verify them
    bench     time engines on generated instances

Exit codes: 0 pass, 1 disagreement or failed verification, 2 usage or
input error.
"""

import json
from pathlib import Path
from typing import Annotated

import typer
from loguru import logger

from bulk_reach.core.constants import (
    APP_NAME,
    APP_VERSION,
    ENGINE_MODES,
    ENGINES,
    EXIT_DISAGREEMENT,
    EXIT_PASS,
    EXIT_USAGE,
    GENERATOR_KINDS,
    ORACLE_NODE_LIMIT,
    WEIGHT_SCHEMES,
)
from bulk_reach.core.decomposition import binarize_decomposition
from bulk_reach.core.errors import BulkReachError
from bulk_reach.core.file_formats import (
    format_weights,
    read_change_script,
    read_decomposition,
    read_graph,
    read_weights,
    write_change_script,
    write_decomposition,
    write_graph,
)
from bulk_reach.core.logging_config import setup_logging
from bulk_reach.core.models import Graph, WeightAssignment
from bulk_reach.core.oracle import circulation_report, isolation_report
from bulk_reach.core.settings_manager import load_settings
from bulk_reach.core.validator import validate_graph
from bulk_reach.core.weights import (
    btw_bounded_degree_weights,
    btw_weights,
    shift_to_isolating,
)
from bulk_reach.harness.bench import bench as run_bench
from bulk_reach.harness.generators import (
    change_script,
    partial_k_tree,
    path_union,
    random_gnp,
)
from bulk_reach.harness.replay import replay as run_replay

app = typer.Typer(help=f"{APP_NAME} {APP_VERSION}: dynamic reachability under bulk changes.")


def _fail(e: Exception) -> typer.Exit:
    logger.error(str(e))
    return typer.Exit(code=EXIT_USAGE)


def _check_choice(value: str | None, allowed: tuple[str, ...], flag: str) -> None:
    if value is not None and value not in allowed:
        raise typer.BadParameter(f"must be one of {', '.join(allowed)}", param_hint=flag)


@app.callback()
def main(
    log_level: Annotated[str, typer.Option(help="Console log level.")] = "",
    log_to_file: Annotated[bool, typer.Option(help="Also write log files.")] = False,
) -> None:
    """Configure logging from the saved settings, overridden by flags."""
    settings = load_settings()
    setup_logging(log_level or settings.log_level, log_to_file or settings.log_to_file)


@app.command()
def generate(
    kind: Annotated[str, typer.Argument(help=f"One of {', '.join(GENERATOR_KINDS)}.")],
    out: Annotated[Path, typer.Option(help="Graph file to write.")],
    n: Annotated[int, typer.Option(help="Node count (random-gnp, partial-k-tree).")] = 10,
    p: Annotated[float, typer.Option(help="Edge probability.")] = 0.3,
    q: Annotated[int, typer.Option(help="Number of paths (path-union).")] = 3,
    length: Annotated[int, typer.Option(help="Nodes per path (path-union).")] = 4,
    k: Annotated[int, typer.Option(help="Width bound (partial-k-tree).")] = 2,
    max_degree: Annotated[int | None, typer.Option(help="Degree bound (partial-k-tree).")] = None,
    directed: Annotated[bool, typer.Option(help="Directed graph (random-gnp, path-union).")] = True,
    seed: Annotated[int, typer.Option(help="Generator seed.")] = 0,
    decomposition: Annotated[Path | None, typer.Option(help="Decomposition file (partial-k-tree).")] = None,
    script: Annotated[Path | None, typer.Option(help="Also write a change script here.")] = None,
    steps: Annotated[int, typer.Option(help="Script steps.")] = 10,
    batch_size: Annotated[int, typer.Option(help="Edges per script step.")] = 4,
    insert_only: Annotated[bool, typer.Option(help="Script without deletions.")] = False,
) -> None:
    """Write a seeded instance."""
    _check_choice(kind, GENERATOR_KINDS, "KIND")
    try:
        if kind == "random-gnp":
            g = random_gnp(n, p, seed, directed)
        elif kind == "path-union":
            g = path_union(q, length, directed)
        else:
            g, t = partial_k_tree(k, n, seed, max_degree, p)
            if decomposition is not None:
                write_decomposition(decomposition, t)
        write_graph(out, g)
        if script is not None:
            write_change_script(script, change_script(g, steps, batch_size, seed, insert_only))
    except (BulkReachError, OSError) as e:
        raise _fail(e) from e
    logger.info(f"Wrote {kind} graph with {g.n} nodes and {len(g.edges)} directed edges to {out}")


@app.command()
def replay(
    graph: Annotated[Path, typer.Argument(help="Initial graph file.")],
    script: Annotated[Path, typer.Argument(help="Change script file.")],
    engine: Annotated[str, typer.Option(help=f"One of {', '.join(ENGINES)}.")] = "tc-insert",
    oracle_check: Annotated[bool | None, typer.Option(help="Cross-check every step.")] = None,
    budget_c: Annotated[int | None, typer.Option(help="Exponent c of the size budget.")] = None,
    seed: Annotated[int | None, typer.Option(help="Seed for weights and sampled queries.")] = None,
    mode: Annotated[str | None, typer.Option(help=f"One of {', '.join(ENGINE_MODES)}.")] = None,
    weight_scheme: Annotated[str | None, typer.Option(help=f"One of {', '.join(WEIGHT_SCHEMES)}.")] = None,
    report: Annotated[Path | None, typer.Option(help="Write the JSON Lines report here.")] = None,
    dump_state: Annotated[Path | None, typer.Option(help="Write the final engine state to this directory.")] = None,
) -> None:
    """Replay a change script and report per-step oracle agreement."""
    _check_choice(engine, ENGINES, "--engine")
    _check_choice(mode, ENGINE_MODES, "--mode")
    _check_choice(weight_scheme, WEIGHT_SCHEMES, "--weight-scheme")
    settings = load_settings()
    try:
        g = read_graph(graph)
        ok, msg = validate_graph(g)
        if not ok:
            raise _fail(BulkReachError(msg))
        changes = read_change_script(script, g.n)
        result = run_replay(
            g,
            changes,
            engine,
            settings=settings,
            oracle_check=oracle_check,
            budget_c=budget_c,
            seed=seed,
            mode=mode,
            weight_scheme=weight_scheme,
            dump_dir=dump_state,
        )
    except (BulkReachError, OSError) as e:
        raise _fail(e) from e

    text = result.to_jsonl()
    if report is None:
        typer.echo(text, nl=False)
    else:
        report.write_text(text, encoding="utf-8")
    raise typer.Exit(code=EXIT_PASS if result.passed else EXIT_DISAGREEMENT)


def _verify_weights(
    g: Graph, bound: int | None, u: WeightAssignment | None, w: WeightAssignment | None
) -> bool:
    """Report non-zero circulation of u and isolation of w on stderr."""
    verification: dict[str, object] = {"n": g.n, "bound_exponent": bound}
    if g.n > ORACLE_NODE_LIMIT:
        verification["verified"] = False
        logger.info(f"Skipping verification: n={g.n} exceeds {ORACLE_NODE_LIMIT}")
        typer.echo(json.dumps(verification, sort_keys=True), err=True)
        return True
    verification["verified"] = True
    passed = True
    if u is not None:
        circulation = circulation_report(g, u)
        verification.update(
            cycles=len(circulation.cycles),
            nonzero_circulation=circulation.has_nonzero_circulation,
        )
        passed = circulation.has_nonzero_circulation
    if w is not None:
        verification["isolating"] = isolation_report(g.bidirected(), w).is_isolating
        passed = passed and bool(verification["isolating"])
    typer.echo(json.dumps(verification, sort_keys=True), err=True)
    return passed


@app.command()
def weights(
    graph: Annotated[Path, typer.Argument(help="Graph file (read as undirected).")],
    decomposition: Annotated[Path | None, typer.Argument(help="Tree decomposition file.")] = None,
    out: Annotated[Path | None, typer.Option(help="Weight file to write.")] = None,
    isolating: Annotated[bool, typer.Option(help="Shift to positive isolating weights.")] = False,
    bounded_degree: Annotated[bool, typer.Option(help="Weight the graph directly, without copies.")] = False,
    check: Annotated[Path | None, typer.Option(help="Verify this weight file instead of computing one.")] = None,
) -> None:
    """Compute non-zero circulation (or isolating) weights and verify them."""
    if decomposition is None and check is None:
        raise typer.BadParameter("a decomposition is needed unless --check is given", param_hint="DECOMPOSITION")
    try:
        g = read_graph(graph)
        if check is not None:
            checked = read_weights(check, skew_symmetric=not isolating)
            bound = None
            u, w = (None, checked) if isolating else (checked, None)
        else:
            t = read_decomposition(decomposition)
            if bounded_degree:
                t = binarize_decomposition(t)
                u = btw_bounded_degree_weights(g, t, max(g.max_degree(), 1), max(t.width, 0))
            else:
                u = btw_weights(g, t)
            bound = u.bound_exponent
            w = shift_to_isolating(u, g.n, bound or 0, g.bidirected().edges) if isolating else None
        passed = _verify_weights(g, bound, u, w)
    except (BulkReachError, OSError) as e:
        raise _fail(e) from e

    if check is None:
        text = format_weights(w if w is not None else u)
        if out is None:
            typer.echo(text, nl=False)
        else:
            out.write_text(text, encoding="utf-8")
    if not passed:
        raise typer.Exit(code=EXIT_DISAGREEMENT)


@app.command()
def bench(
    engine: Annotated[list[str] | None, typer.Option(help="Engines to time (repeatable).")] = None,
    sizes: Annotated[list[int] | None, typer.Option("--n", help="Node counts (repeatable).")] = None,
    batch: Annotated[list[int] | None, typer.Option(help="Batch sizes (repeatable).")] = None,
    steps: Annotated[int, typer.Option(help="Steps per instance.")] = 5,
    seed: Annotated[int, typer.Option(help="Generator and weight seed.")] = 0,
) -> None:
    """Print one JSON record per (engine, n, batch) with median step time."""
    engines = engine or ["tc-insert", "undirected"]
    for name in engines:
        _check_choice(name, ENGINES, "--engine")
    try:
        records = run_bench(engines, sizes or [8, 16, 32], batch or [1, 4, 16], steps, seed, load_settings())
    except (BulkReachError, OSError) as e:
        raise _fail(e) from e
    for record in records:
        typer.echo(json.dumps(record, sort_keys=True))


def run() -> None:
    """Entry point for the bulk-reach console script."""
    try:
        app()
    except Exception as e:
        logger.error(f"Application error: {e}")
        logger.exception("Full traceback:")
        raise


if __name__ == "__main__":
    run()
