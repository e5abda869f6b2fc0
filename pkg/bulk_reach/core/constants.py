"""Application constants and default values.

This module centralizes the constant values used throughout the package,
including engine names, oracle size guards, file-format keywords and
default paths.
"""

from pathlib import Path

import platformdirs

APP_NAME = "bulk-reach"
APP_VERSION = "0.1.0"

# Engines selectable from the command line
ENGINES = ("tc-insert", "undirected", "algebraic")
ENGINE_MODES = ("faithful", "verified")
WEIGHT_SCHEMES = ("paper", "derandomized", "random")
# "paper" names the derandomized prime-based construction
WEIGHT_SCHEME_ALIASES = {"paper": "derandomized"}

# Generator kinds for `bulk-reach generate`
GENERATOR_KINDS = ("random-gnp", "path-union", "partial-k-tree")

# Exhaustive enumerators refuse graphs larger than this
ORACLE_NODE_LIMIT = 12

# The walk-parity DP allocates n * n * (b + 1) coefficient cells
WALK_DP_CELL_LIMIT = 4_000_000

# Edge-distinct sequence DP over an adorned graph is exponential in |E_H|
ADORNED_REAL_EDGE_LIMIT = 12

# Largest prime tried by find_separating_prime when no budget is given
DEFAULT_PRIME_BIT_BUDGET = 16

# Cycles on two nodes have weight 0 under skew-symmetry and are never checked
MIN_CYCLE_NODES = 3

# Exit codes of the command-line front end
EXIT_PASS = 0
EXIT_DISAGREEMENT = 1
EXIT_USAGE = 2

# Text-format keywords
GRAPH_HEADER = "n"
GRAPH_EDGE = "e"
TREE_NODE = "t"
TREE_BAG = "b"
WEIGHT_LINE = "w"
SCRIPT_BEGIN = "change"
SCRIPT_END = "end"
SCRIPT_INSERT = "+"
SCRIPT_DELETE = "-"
DIRECTED = "directed"
UNDIRECTED = "undirected"

# Configuration paths
DATA_DIR = Path(platformdirs.user_data_dir(APP_NAME))
LOG_DIR = DATA_DIR / "logs"
