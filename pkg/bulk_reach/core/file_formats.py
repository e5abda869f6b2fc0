"""Text formats for graphs, decompositions, change scripts and weights.

All formats are line based. Blank lines and lines starting with ``#`` are
ignored. Parse errors raise FormatError carrying the 1-based line number.

Graph::

    n <count> <directed|undirected>
    e <u> <v>

Tree decomposition::

    t <id> <parent-id|-1>
    b <id> <v1> <v2> ...

Change script (one BulkChange per block)::

    change
    + <u> <v>
    - <u> <v>
    end

Weights (forward edges; skew completion is implied for skew-symmetric files)::

    w <u> <v> <integer>
"""

from collections.abc import Iterator
from pathlib import Path

from bulk_reach.core.constants import (
    DIRECTED,
    GRAPH_EDGE,
    GRAPH_HEADER,
    SCRIPT_BEGIN,
    SCRIPT_DELETE,
    SCRIPT_END,
    SCRIPT_INSERT,
    TREE_BAG,
    TREE_NODE,
    UNDIRECTED,
    WEIGHT_LINE,
)
from bulk_reach.core.errors import FormatError, GraphError
from bulk_reach.core.models import (
    BulkChange,
    Edge,
    Graph,
    TreeDecomposition,
    WeightAssignment,
)


def _lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield number, line.split()


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"{path} is not UTF-8 text (byte {e.start})") from e


def _ints(tokens: list[str], number: int) -> list[int]:
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(tokens)!r}", number) from None


# Graphs


def parse_graph(text: str) -> Graph:
    """Parse the graph format.

    Raises:
        FormatError: On a missing/duplicate header, unknown keyword, bad
            integers or an edge that violates graph invariants.
    """
    n: int | None = None
    directed = True
    edges: set[Edge] = set()
    for number, tokens in _lines(text):
        key = tokens[0]
        if key == GRAPH_HEADER:
            if n is not None:
                raise FormatError("duplicate header", number)
            if len(tokens) != 3 or tokens[2] not in (DIRECTED, UNDIRECTED):
                raise FormatError("header must be 'n <count> <directed|undirected>'", number)
            (n,) = _ints(tokens[1:2], number)
            directed = tokens[2] == DIRECTED
        elif key == GRAPH_EDGE:
            if n is None:
                raise FormatError("edge before header", number)
            if len(tokens) != 3:
                raise FormatError("edge line must be 'e <u> <v>'", number)
            u, v = _ints(tokens[1:], number)
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"invalid edge ({u},{v}) for n={n}", number)
            edges.add((u, v))
            if not directed:
                edges.add((v, u))
        else:
            raise FormatError(f"unknown keyword {key!r}", number)
    if n is None:
        raise FormatError("missing header line")
    return Graph(n, frozenset(edges), directed=directed)


def format_graph(g: Graph) -> str:
    kind = DIRECTED if g.directed else UNDIRECTED
    lines = [f"{GRAPH_HEADER} {g.n} {kind}"]
    edges = g.sorted_edges() if g.directed else g.undirected_pairs()
    lines.extend(f"{GRAPH_EDGE} {u} {v}" for u, v in edges)
    return "\n".join(lines) + "\n"


def read_graph(path: Path) -> Graph:
    return parse_graph(_read_text(path))


def write_graph(path: Path, g: Graph) -> None:
    path.write_text(format_graph(g), encoding="utf-8")


# Tree decompositions


def parse_decomposition(text: str) -> TreeDecomposition:
    """Parse the tree decomposition format.

    Raises:
        FormatError: On bad lines, bags for undeclared tree nodes, or a parent
            map that is not a rooted tree.
    """
    parent: dict[int, int | None] = {}
    bags: dict[int, frozenset[int]] = {}
    bag_lines: list[tuple[int, int]] = []
    for number, tokens in _lines(text):
        key = tokens[0]
        if key == TREE_NODE:
            if len(tokens) != 3:
                raise FormatError("tree node line must be 't <id> <parent|-1>'", number)
            node, par = _ints(tokens[1:], number)
            if node in parent:
                raise FormatError(f"duplicate tree node {node}", number)
            parent[node] = None if par == -1 else par
        elif key == TREE_BAG:
            if len(tokens) < 2:
                raise FormatError("bag line must be 'b <id> <v1> ...'", number)
            node, *members = _ints(tokens[1:], number)
            bags[node] = frozenset(members)
            bag_lines.append((node, number))
        else:
            raise FormatError(f"unknown keyword {key!r}", number)
    for node, number in bag_lines:
        if node not in parent:
            raise FormatError(f"bag for undeclared tree node {node}", number)
    for node in parent:
        bags.setdefault(node, frozenset())
    try:
        return TreeDecomposition(parent=parent, bags=bags)
    except GraphError as e:
        raise FormatError(str(e)) from e


def format_decomposition(t: TreeDecomposition) -> str:
    lines = []
    for i in t.preorder:
        par = t.parent[i]
        lines.append(f"{TREE_NODE} {i} {-1 if par is None else par}")
    for i in t.preorder:
        lines.append(" ".join([TREE_BAG, str(i), *map(str, sorted(t.bags[i]))]))
    return "\n".join(lines) + "\n"


def read_decomposition(path: Path) -> TreeDecomposition:
    return parse_decomposition(_read_text(path))


def write_decomposition(path: Path, t: TreeDecomposition) -> None:
    path.write_text(format_decomposition(t), encoding="utf-8")


# Change scripts


def parse_change_script(text: str, n: int | None = None) -> list[BulkChange]:
    """Parse a change script into one BulkChange per block.

    With n given, every endpoint must lie in 0..n-1.

    Raises:
        FormatError: On nesting, lines outside a block, an unterminated
            block, malformed edge lines or out-of-range endpoints.
    """
    changes: list[BulkChange] = []
    inserted: set[Edge] | None = None
    deleted: set[Edge] = set()
    for number, tokens in _lines(text):
        key = tokens[0]
        if key == SCRIPT_BEGIN:
            if inserted is not None:
                raise FormatError("nested 'change' block", number)
            inserted, deleted = set(), set()
        elif key == SCRIPT_END:
            if inserted is None:
                raise FormatError("'end' without 'change'", number)
            changes.append(BulkChange.of(inserted, deleted))
            inserted = None
        elif key in (SCRIPT_INSERT, SCRIPT_DELETE):
            if inserted is None:
                raise FormatError("edge line outside a change block", number)
            if len(tokens) != 3:
                raise FormatError(f"edge line must be '{key} <u> <v>'", number)
            u, v = _ints(tokens[1:], number)
            if u == v:
                raise FormatError(f"self-loop ({u},{v}) in change", number)
            if n is not None and not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"edge ({u},{v}) out of range for n={n}", number)
            (inserted if key == SCRIPT_INSERT else deleted).add((u, v))
        else:
            raise FormatError(f"unknown keyword {key!r}", number)
    if inserted is not None:
        raise FormatError("unterminated 'change' block")
    return changes


def format_change_script(changes: list[BulkChange]) -> str:
    lines: list[str] = []
    for c in changes:
        lines.append(SCRIPT_BEGIN)
        lines.extend(f"{SCRIPT_INSERT} {u} {v}" for u, v in sorted(c.inserted))
        lines.extend(f"{SCRIPT_DELETE} {u} {v}" for u, v in sorted(c.deleted))
        lines.append(SCRIPT_END)
    return "\n".join(lines) + ("\n" if lines else "")


def read_change_script(path: Path, n: int | None = None) -> list[BulkChange]:
    return parse_change_script(_read_text(path), n)


def write_change_script(path: Path, changes: list[BulkChange]) -> None:
    path.write_text(format_change_script(changes), encoding="utf-8")


# Weights


def parse_weights(text: str, skew_symmetric: bool = False) -> WeightAssignment:
    """Parse a weight file; with skew_symmetric, reverse edges get -w."""
    weights: dict[Edge, int] = {}
    for number, tokens in _lines(text):
        if tokens[0] != WEIGHT_LINE or len(tokens) != 4:
            raise FormatError("weight line must be 'w <u> <v> <integer>'", number)
        u, v, x = _ints(tokens[1:], number)
        weights[(u, v)] = x
        if skew_symmetric:
            weights[(v, u)] = -x
    return WeightAssignment(weights, skew_symmetric=skew_symmetric)


def format_weights(w: WeightAssignment) -> str:
    """Write forward edges only (u < v) for skew-symmetric assignments."""
    items = [
        (e, x) for e, x in w.items() if not w.skew_symmetric or e[0] < e[1]
    ]
    return "".join(f"{WEIGHT_LINE} {u} {v} {x}\n" for (u, v), x in items)


def read_weights(path: Path, skew_symmetric: bool = False) -> WeightAssignment:
    return parse_weights(_read_text(path), skew_symmetric)


def write_weights(path: Path, w: WeightAssignment) -> None:
    path.write_text(format_weights(w), encoding="utf-8")
