"""Dynamic reachability engines and the factory the harness selects them with."""

from bulk_reach.core.errors import ChangeError
from bulk_reach.core.settings_manager import EngineSettings
from bulk_reach.engines.algebraic import AlgebraicConfig, AlgebraicEngine
from bulk_reach.engines.engine_base import ReachabilityEngine
from bulk_reach.engines.tc_insert import TCInsertEngine
from bulk_reach.engines.undirected import UndirectedEngine

__all__ = [
    "AlgebraicEngine",
    "ReachabilityEngine",
    "TCInsertEngine",
    "UndirectedEngine",
    "create_engine",
]


def create_engine(
    name: str,
    n: int,
    settings: EngineSettings | None = None,
    *,
    seed: int | None = None,
    mode: str | None = None,
    weight_scheme: str | None = None,
) -> ReachabilityEngine:
    """Build an engine by its command-line name.

    Args:
        name: "tc-insert", "undirected" or "algebraic".
        n: Node count.
        settings: Defaults for the algebraic engine.
        seed: Overrides settings.default_seed.
        mode: Overrides settings.mode.
        weight_scheme: Overrides settings.weight_scheme.

    Raises:
        ChangeError: If the engine name is unknown.
    """
    settings = settings or EngineSettings()
    if name == TCInsertEngine.name:
        return TCInsertEngine(n)
    if name == UndirectedEngine.name:
        return UndirectedEngine(n)
    if name == AlgebraicEngine.name:
        return AlgebraicEngine(
            n,
            mode=mode or settings.mode,
            scheme=weight_scheme or settings.weight_scheme,
            config=AlgebraicConfig.from_settings(settings, seed),
        )
    raise ChangeError(f"Unknown engine '{name}'.")
