"""Tree decomposition validation and binarization.

Decompositions are inputs (read from files or emitted by generators); this
module never computes one for an arbitrary graph.
"""

from loguru import logger

from bulk_reach.core.models import DecompositionReport, Graph, TreeDecomposition


def validate_tree_decomposition(g: Graph, t: TreeDecomposition) -> DecompositionReport:
    """Check the three tree decomposition conditions.

    (1) every node appears in some bag, (2) every edge is covered by some bag,
    (3) the bags containing any fixed node form a connected subtree.
    Violations are collected, never raised.

    Args:
        g: The graph (edges are read as unordered pairs).
        t: The candidate decomposition.

    Returns:
        DecompositionReport with violations and structural measures.
    """
    violations: list[str] = []

    covered = t.covered_nodes()
    for v in g.nodes():
        if v not in covered:
            violations.append(f"node {v} appears in no bag")
    for v in sorted(covered):
        if not 0 <= v < g.n:
            violations.append(f"bag node {v} is not a graph node")

    for u, v in g.undirected_pairs():
        if not any(u in bag and v in bag for bag in t.bags.values()):
            violations.append(f"edge ({u},{v}) is not covered by any bag")

    # A node's occurrence set is connected iff exactly one occurrence has its
    # parent outside the set.
    for v in sorted(covered):
        tops = [
            i
            for i, bag in t.bags.items()
            if v in bag and (t.parent[i] is None or v not in t.bags[t.parent[i]])
        ]
        if len(tops) > 1:
            violations.append(
                f"bags containing node {v} are disconnected ({len(tops)} components)"
            )

    return DecompositionReport(
        violations=violations,
        width=t.width,
        depth=t.depth,
        max_degree=t.max_degree,
        is_binary=t.is_binary,
    )


def binarize_decomposition(t: TreeDecomposition) -> TreeDecomposition:
    """Give every tree node at most two children.

    A node with children c1..cm (m > 2) keeps c1 and a fresh spine node with
    the same bag; the spine node keeps c2 and the next spine node, and so on,
    until the last spine node holds c(m-1) and cm. Bags are unchanged except
    for the duplicated spine copies, so width is preserved exactly. Depth can
    grow by up to m - 2 per level; it is not reduced.

    Args:
        t: A valid tree decomposition.

    Returns:
        A binary decomposition of the same graph (t itself when already binary).
    """
    if t.is_binary:
        return t

    parent = dict(t.parent)
    bags = dict(t.bags)
    next_id = max(parent) + 1

    for i in t.preorder:
        kids = list(t.children(i))
        if len(kids) <= 2:
            continue
        anchor = i
        # anchor keeps its first child and hands the rest to a spine copy
        while len(kids) > 2:
            spine = next_id
            next_id += 1
            bags[spine] = t.bags[i]
            parent[spine] = anchor
            parent[kids.pop(0)] = anchor
            anchor = spine
        for c in kids:
            parent[c] = anchor

    result = TreeDecomposition(parent=parent, bags=bags)
    logger.debug(
        f"Binarized decomposition: {len(t.parent)} -> {len(parent)} tree nodes, "
        f"depth {t.depth} -> {result.depth}"
    )
    return result


def path_decomposition(n: int) -> TreeDecomposition:
    """Canonical width-1 decomposition of the chain 0-1-...-(n-1).

    Tree node i holds bag {i, i+1} and hangs below tree node i-1.
    """
    if n <= 1:
        return TreeDecomposition(parent={0: None}, bags={0: frozenset(range(n))})
    parent = {i: (i - 1 if i else None) for i in range(n - 1)}
    bags = {i: frozenset({i, i + 1}) for i in range(n - 1)}
    return TreeDecomposition(parent=parent, bags=bags)
