"""User settings management for bulk-reach.

Handles loading and saving engine defaults to a JSON file in the
platform-appropriate data directory. Command-line flags override these
values per invocation.
"""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from bulk_reach.core.constants import DATA_DIR, DEFAULT_PRIME_BIT_BUDGET

SETTINGS_DIR = DATA_DIR
SETTINGS_FILE = SETTINGS_DIR / "settings.json"


@dataclass
class EngineSettings:
    """User-configurable defaults for replays and weight construction.

    Attributes:
        default_seed: Seed used when no --seed flag is given.
        oracle_check_default: Whether replays cross-check against the oracle.
        budget_c: Exponent c of the change-size budget ceil(log2(n))^c.
        all_pairs_threshold: Query all ordered pairs up to this many nodes.
        query_sample_size: Sampled pairs per step above the threshold.
        mode: Algebraic engine mode, "faithful" or "verified".
        weight_scheme: Algebraic engine weights, "paper" (alias "derandomized") or "random".
        sibling_width: Passing primes tried per level in faithful mode.
        max_members: Cap on the weight family size per change.
        prime_bit_budget: Soft bit budget of each prime.
        random_weight_cap: Largest random weight; 0 derives 2 * m * n.
        isolation_retries: Draws before a random construction gives up.
        coefficient_budget: Largest degree bound b the algebraic engine accepts.
        parallel_members: Update the algebraic members concurrently in a thread pool.
        log_level: Console log level.
        log_to_file: Whether to also write log files.
    """

    default_seed: int = 0
    oracle_check_default: bool = True
    budget_c: int = 2
    all_pairs_threshold: int = 64
    query_sample_size: int = 256
    mode: str = "verified"
    weight_scheme: str = "random"
    sibling_width: int = 2
    max_members: int = 8
    prime_bit_budget: int = DEFAULT_PRIME_BIT_BUDGET
    random_weight_cap: int = 0
    isolation_retries: int = 32
    coefficient_budget: int = 1 << 20
    parallel_members: bool = True
    log_level: str = "INFO"
    log_to_file: bool = False


def load_settings(path: Path | None = None) -> EngineSettings:
    """Load settings from disk, using defaults for any missing keys.

    If the default settings file doesn't exist, returns defaults and writes
    them to disk for next time. An explicit path is never created.

    Args:
        path: Settings file to read; SETTINGS_FILE when None.

    Returns:
        EngineSettings populated from the saved file or defaults.
    """
    target = path or SETTINGS_FILE
    if not target.exists():
        settings = EngineSettings()
        if path is None:
            save_settings(settings)
        return settings

    try:
        data = json.loads(target.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, OSError):
        return EngineSettings()
    if not isinstance(data, dict):
        return EngineSettings()

    # Forward-compatible: only use keys that exist as fields
    valid_keys = {f.name for f in fields(EngineSettings)}
    filtered = {k: v for k, v in data.items() if k in valid_keys}
    return EngineSettings(**filtered)


def save_settings(settings: EngineSettings, path: Path | None = None) -> None:
    """Write settings to disk as JSON.

    Creates the parent directory if it doesn't exist.

    Args:
        settings: The EngineSettings instance to persist.
        path: Destination; SETTINGS_FILE when None.
    """
    target = path or SETTINGS_FILE
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(
        json.dumps(asdict(settings), indent=2) + "\n",
        encoding="utf-8",
    )
