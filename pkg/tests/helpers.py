"""Shared test utilities: independent oracles and random structure generators.

The oracles here deliberately avoid the registry/digest machinery: subtree
identity is established by canonical string serialization and truth values
by exhaustive enumeration, so they can referee the production code paths.
"""

from __future__ import annotations

import random
from collections import Counter

from qlog.frontend import AND, OR, AstNode, LabeledAst


def build_tree(spec) -> LabeledAst:
    """Build a LabeledAst from nested tuples: ("label", child, child, ...)."""
    nodes: list[AstNode] = []

    def add(item) -> int:
        if isinstance(item, str):
            nodes.append(AstNode(atom=item))
            return len(nodes) - 1
        label, *children = item
        idx = len(nodes)
        nodes.append(AstNode(atom=label))
        nodes[idx].children = [add(c) for c in children]
        return idx

    root = add(spec)
    return LabeledAst(nodes=nodes, root=root)


def tree_equal(a: LabeledAst, b: LabeledAst) -> bool:
    """Isomorphism with order-sensitive children: same atoms, texts, flags."""

    def eq(i: int, j: int) -> bool:
        na, nb = a.nodes[i], b.nodes[j]
        if (na.atom, na.text, na.is_const) != (nb.atom, nb.text, nb.is_const):
            return False
        if len(na.children) != len(nb.children):
            return False
        return all(eq(ci, cj) for ci, cj in zip(na.children, nb.children))

    return eq(a.root, b.root)


def random_labeled_tree(
    rng: random.Random,
    max_nodes: int = 40,
    max_depth: int = 5,
    alphabet=("a", "b", "c", "d"),
) -> LabeledAst:
    """Random ordered tree with labels drawn from a small alphabet, so that
    repeated substructures (and hence id collisions worth testing) occur."""
    nodes = [AstNode(atom=rng.choice(alphabet))]
    depths = [0]
    budget = rng.randint(1, max_nodes)
    while len(nodes) < budget:
        parent = rng.randrange(len(nodes))
        if depths[parent] >= max_depth:
            continue
        nodes.append(AstNode(atom=rng.choice(alphabet)))
        depths.append(depths[parent] + 1)
        nodes[parent].children.append(len(nodes) - 1)
    return LabeledAst(nodes=nodes, root=0)


def truncated_subtree_canon(ast: LabeledAst, node: int, depth: int) -> str:
    """Canonical serialization of the depth-truncated subtree at a node.

    Children serializations are sorted, which makes the form invariant under
    sibling order, mirroring bag semantics.
    """
    label = ast.label(node)
    if depth == 0:
        return f"({label})"
    parts = sorted(
        truncated_subtree_canon(ast, c, depth - 1) for c in ast.nodes[node].children
    )
    return f"({label}{''.join(parts)})"


def oracle_descendant_multiset(ast: LabeledAst, max_depth: int | None = None) -> Counter:
    """Multiset of canonical forms of every node's every depth-truncation."""
    heights = ast.heights()
    out: Counter = Counter()
    for n in range(len(ast.nodes)):
        limit = heights[n] if max_depth is None else min(heights[n], max_depth)
        for i in range(limit + 1):
            out[truncated_subtree_canon(ast, n, i)] += 1
    return out


def random_formula(
    rng: random.Random, max_literals: int = 8, max_nodes: int = 12
) -> LabeledAst:
    """Random AND/OR tree over a pool of named literal leaves (repeats allowed)."""
    pool = [f"L{i}" for i in range(1, rng.randint(2, max_literals) + 1)]
    nodes: list[AstNode] = []

    def grow(depth: int) -> int:
        make_leaf = depth >= 4 or len(nodes) >= max_nodes or rng.random() < 0.35
        idx = len(nodes)
        if make_leaf:
            nodes.append(AstNode(atom=rng.choice(pool)))
            return idx
        nodes.append(AstNode(atom=rng.choice((AND, OR))))
        arity = rng.randint(2, 3)
        nodes[idx].children = []
        for _ in range(arity):
            nodes[idx].children.append(grow(depth + 1))
        return idx

    root = grow(0)
    return LabeledAst(nodes=nodes, root=root)


def formula_literal_labels(ast: LabeledAst) -> list[str]:
    return sorted(
        {n.atom for n in ast.nodes if n.atom not in (AND, OR)}
    )


def eval_formula(ast: LabeledAst, node: int, assignment: dict[str, bool]) -> bool:
    atom = ast.nodes[node].atom
    if atom == AND:
        return all(eval_formula(ast, c, assignment) for c in ast.nodes[node].children)
    if atom == OR:
        return any(eval_formula(ast, c, assignment) for c in ast.nodes[node].children)
    return assignment[atom]


def eval_clauses(ast: LabeledAst, clauses, assignment: dict[str, bool]) -> bool:
    """Truth of a clause set: AND over clauses of OR over member literals."""
    return all(
        any(assignment[ast.nodes[n].atom] for n in dc.literals) for dc in clauses
    )


def truth_table_equal(ast: LabeledAst, root: int, clauses) -> bool:
    labels = formula_literal_labels(ast)
    for bits in range(2 ** len(labels)):
        assignment = {lab: bool(bits >> i & 1) for i, lab in enumerate(labels)}
        if eval_formula(ast, root, assignment) != eval_clauses(ast, clauses, assignment):
            return False
    return True


class WlOracleChecker:
    """Cross-checks relabeling ids against brute-force canonical forms.

    The bijection between ids and canonical strings is anchored per
    (node, depth) pair, so equal ids must always mean equal truncated
    subtrees and vice versa, across every tree fed to one checker.
    """

    def __init__(self) -> None:
        self.id_to_canon: dict[int, str] = {}
        self.canon_to_id: dict[str, int] = {}

    def check_tree(self, ast: LabeledAst, labels: dict[int, list[int]],
                   vector: Counter, max_depth: int | None = None) -> None:
        heights = ast.heights()
        seen: Counter = Counter()
        for n, levels in labels.items():
            limit = heights[n] if max_depth is None else min(heights[n], max_depth)
            assert len(levels) == limit + 1, f"node {n}: wrong iteration count"
            for i, fid in enumerate(levels):
                canon = truncated_subtree_canon(ast, n, i)
                if fid in self.id_to_canon:
                    assert self.id_to_canon[fid] == canon, (
                        f"id {fid} maps to {self.id_to_canon[fid]!r} and {canon!r}"
                    )
                else:
                    assert canon not in self.canon_to_id, (
                        f"canonical form {canon!r} got two ids"
                    )
                    self.id_to_canon[fid] = canon
                    self.canon_to_id[canon] = fid
                seen[fid] += 1
        assert seen == vector, "vector disagrees with per-node labels"
        mapped = Counter({self.id_to_canon[f]: m for f, m in vector.items()})
        assert mapped == oracle_descendant_multiset(ast, max_depth)
