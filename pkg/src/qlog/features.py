"""Structural feature extraction from labeled ASTs.

The base relabeling scheme identifies every node by the canonical id of each
of its depth-truncated subtrees: iteration 0 is the node's own label, and
iteration i is the list-digest of that label together with the bag-digest of
the children's iteration-(i-1) ids.  On top of that sit three SQL-aware
rules: constant abstraction into query skeletons, conjunctive-normal-form
rewriting of boolean predicates (so algebraically equivalent filters produce
equal features), and abstracted comparison features of the form <op, lhs, ?>.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

from . import frontend
from .frontend import AstNode, LabeledAst
from .registry import DigestRegistry

logger = logging.getLogger(__name__)

#: Depth-1 root shapes shared by virtually all statements of one kind; safe
#: to drop from feature vectors without losing discriminative power.
DEFAULT_PRUNE_PATTERNS = (
    "SELECT@1",
    "INSERT@1",
    "UPDATE@1",
    "DELETE@1",
    "UNION@1",
)

_EQ_FAMILY = frozenset(frontend.COMPARISON_ATOMS | {frontend.IN, frontend.NOT_IN})


class UnsupportedNegationError(Exception):
    """A NOT connective was found inside a predicate slated for CNF."""


class CnfBlowupError(Exception):
    """Distributive expansion exceeded the configured clause cap."""


@dataclass(frozen=True)
class RuleConfig:
    """Which feature rules run, and their knobs.

    ``prune_patterns`` are "TAG@depth" strings: the depth-``depth`` subtree
    feature of any node whose grammar atom is ``TAG`` is marked pruned and
    withheld from vectors.  ``max_depth`` of None means full tree depth.
    """

    enable_cnf: bool = True
    enable_equality_skeleton: bool = True
    emit_raw_constants: bool = False
    prune_patterns: tuple[str, ...] = DEFAULT_PRUNE_PATTERNS
    pruned_ids: tuple[int, ...] = ()
    cnf_clause_cap: int = 4096
    max_depth: int | None = None

    def to_dict(self) -> dict:
        return {
            "enable_cnf": self.enable_cnf,
            "enable_equality_skeleton": self.enable_equality_skeleton,
            "emit_raw_constants": self.emit_raw_constants,
            "prune_patterns": list(self.prune_patterns),
            "pruned_ids": list(self.pruned_ids),
            "cnf_clause_cap": self.cnf_clause_cap,
            "max_depth": self.max_depth,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RuleConfig":
        return cls(
            enable_cnf=data.get("enable_cnf", True),
            enable_equality_skeleton=data.get("enable_equality_skeleton", True),
            emit_raw_constants=data.get("emit_raw_constants", False),
            prune_patterns=tuple(data.get("prune_patterns", DEFAULT_PRUNE_PATTERNS)),
            pruned_ids=tuple(data.get("pruned_ids", ())),
            cnf_clause_cap=data.get("cnf_clause_cap", 4096),
            max_depth=data.get("max_depth"),
        )

    @classmethod
    def from_file(cls, path) -> "RuleConfig":
        """Read a key=value config file.

        Recognized keys: enable_cnf, enable_equality_skeleton,
        emit_raw_constants (true/false); prune_patterns, pruned_ids
        (comma-separated); cnf_clause_cap, max_depth (int, or 'unbounded').
        Blank lines and #-comments are ignored.
        """
        data: dict = {}
        with open(path, "r", encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"expected key = value, got {line!r}")
                key, _, value = line.partition("=")
                key, value = key.strip(), value.strip()
                if key in ("enable_cnf", "enable_equality_skeleton", "emit_raw_constants"):
                    data[key] = value.lower() in ("1", "true", "yes", "on")
                elif key == "prune_patterns":
                    data[key] = [p.strip() for p in value.split(",") if p.strip()]
                elif key == "pruned_ids":
                    data[key] = [int(p) for p in value.split(",") if p.strip()]
                elif key == "cnf_clause_cap":
                    data[key] = int(value)
                elif key == "max_depth":
                    data[key] = None if value.lower() in ("unbounded", "none") else int(value)
                else:
                    raise ValueError(f"unknown config key {key!r}")
        return cls.from_dict(data)


def _parse_prune_patterns(patterns: tuple[str, ...]) -> dict[str, set[int]]:
    out: dict[str, set[int]] = {}
    for pat in patterns:
        tag, _, depth = pat.partition("@")
        if not tag or not depth.isdigit():
            raise ValueError(f"bad prune pattern {pat!r}; expected 'TAG@depth'")
        out.setdefault(tag, set()).add(int(depth))
    return out


@dataclass
class QuerySkeleton:
    """An AST with constants abstracted to '?', plus its bookkeeping."""

    skeleton_ast: LabeledAst
    canonical_text: str
    count: int = 1
    vector: Counter | None = None


def skeletonize(ast: LabeledAst) -> QuerySkeleton:
    """Replace every constant leaf's payload by the placeholder token."""
    nodes = [
        AstNode(n.atom, "?" if n.is_const else n.text, list(n.children), n.is_const)
        for n in ast.nodes
    ]
    skeleton = LabeledAst(nodes=nodes, root=ast.root)
    return QuerySkeleton(
        skeleton_ast=skeleton, canonical_text=frontend.to_sql(skeleton)
    )


# -- base relabeling ---------------------------------------------------------


def _wl_labels(
    ast: LabeledAst,
    registry: DigestRegistry,
    max_depth: int | None = None,
    override: dict[int, int] | None = None,
    start: int | None = None,
) -> dict[int, list[int]]:
    """Per-node subtree ids, index i = the depth-i truncated subtree.

    A node's list runs from iteration 0 (its own label) up to
    min(height, max_depth).  Nodes in ``override`` are treated as opaque
    leaves carrying a fixed id; their descendants are not visited.
    """
    override = override or {}
    root = ast.root if start is None else start
    order: list[int] = []
    stack = [(root, False)]
    while stack:
        n, expanded = stack.pop()
        if expanded:
            order.append(n)
            continue
        stack.append((n, True))
        if n not in override:
            for c in reversed(ast.nodes[n].children):
                stack.append((c, False))

    labels: dict[int, list[int]] = {}
    heights: dict[int, int] = {}
    for n in order:
        if n in override:
            labels[n] = [override[n]]
            heights[n] = 0
            continue
        ch = ast.nodes[n].children
        if not ch:
            labels[n] = [registry.intern_atom(ast.label(n))]
            heights[n] = 0
            continue
        h = 1 + max(heights[c] for c in ch)
        heights[n] = h
        lim = h if max_depth is None else min(h, max_depth)
        atom_id = registry.intern_atom(ast.label(n))
        levels = [atom_id]
        for i in range(1, lim + 1):
            bag = registry.digest_bag(
                labels[c][min(i - 1, len(labels[c]) - 1)] for c in ch
            )
            levels.append(registry.digest_list([atom_id, bag]))
        labels[n] = levels
    return labels


def wl_base_features(
    ast: LabeledAst, registry: DigestRegistry, max_depth: int | None = None
) -> Counter:
    """Bag of all depth-truncated subtree ids, over every node and depth."""
    labels = _wl_labels(ast, registry, max_depth=max_depth)
    vector: Counter = Counter()
    for levels in labels.values():
        vector.update(levels)
    return vector


def subtree_ids(ast: LabeledAst, registry: DigestRegistry) -> dict[int, int]:
    """Canonical full-subtree id per node (the last relabeling iteration)."""
    labels = _wl_labels(ast, registry)
    return {n: levels[-1] for n, levels in labels.items()}


# -- conjunctive normal form --------------------------------------------------


@dataclass(frozen=True)
class DisjunctiveClause:
    """A set of OR-joined literals inside a CNF; identified by the set-digest
    of its member literals' subtree ids."""

    literals: frozenset[int]  # node indices of the member literal roots
    literal_ids: frozenset[int]  # their canonical subtree ids
    id: int


def literal_roots(ast: LabeledAst, root: int) -> list[int]:
    """Roots of the maximal connective-free subtrees under a predicate."""
    out: list[int] = []
    stack = [root]
    while stack:
        n = stack.pop()
        atom = ast.nodes[n].atom
        if atom == frontend.NOT:
            raise UnsupportedNegationError(f"NOT at node {n}")
        if atom in frontend.CONNECTIVE_ATOMS:
            stack.extend(reversed(ast.nodes[n].children))
        else:
            out.append(n)
    return out


def cnf_normalize(
    ast: LabeledAst,
    root: int,
    registry: DigestRegistry,
    clause_cap: int = 4096,
    literal_ids: dict[int, int] | None = None,
) -> list[DisjunctiveClause]:
    """Rewrite an AND/OR formula into its set of disjunctive clauses.

    Literals form singleton clauses; AND unions its children's clause sets;
    OR applies the distributive law, unioning one clause from each child.
    Duplicate clauses collapse by content.  Raises UnsupportedNegationError
    on NOT, CnfBlowupError past ``clause_cap`` clauses.
    """
    if literal_ids is None:
        labels = _wl_labels(ast, registry, start=root)
        literal_ids = {n: levels[-1] for n, levels in labels.items()}

    # clause during recursion: (frozenset of literal ids, frozenset of nodes)
    def dedupe(clauses: list[tuple[frozenset, frozenset]]):
        seen: dict[frozenset, tuple[frozenset, frozenset]] = {}
        for ids, nodes in clauses:
            if ids not in seen:
                seen[ids] = (ids, nodes)
        return list(seen.values())

    def build(n: int) -> list[tuple[frozenset, frozenset]]:
        atom = ast.nodes[n].atom
        if atom == frontend.NOT:
            raise UnsupportedNegationError(f"NOT at node {n}")
        if atom == frontend.AND:
            merged: list[tuple[frozenset, frozenset]] = []
            for c in ast.nodes[n].children:
                merged.extend(build(c))
            return dedupe(merged)
        if atom == frontend.OR:
            result: list[tuple[frozenset, frozenset]] | None = None
            for c in ast.nodes[n].children:
                branch = build(c)
                if result is None:
                    result = branch
                    continue
                if len(result) * len(branch) > clause_cap:
                    raise CnfBlowupError(
                        f"clause count would exceed cap {clause_cap}"
                    )
                result = dedupe(
                    [
                        (ids_a | ids_b, nodes_a | nodes_b)
                        for ids_a, nodes_a in result
                        for ids_b, nodes_b in branch
                    ]
                )
            assert result is not None
            return result
        return [(frozenset({literal_ids[n]}), frozenset({n}))]

    clauses = build(root)
    out = [
        DisjunctiveClause(
            literals=nodes, literal_ids=ids, id=registry.digest_set(ids)
        )
        for ids, nodes in clauses
    ]
    out.sort(key=lambda dc: tuple(sorted(dc.literal_ids)))
    return out


def cnf_features(
    clauses: list[DisjunctiveClause], registry: DigestRegistry
) -> set[int]:
    """Feature ids a normalized predicate contributes: one per clause, plus
    the set-digest over all clause ids for the formula as a whole."""
    ids = {dc.id for dc in clauses}
    ids.add(registry.digest_set(dc.id for dc in clauses))
    return ids


def cnf_id(clauses: list[DisjunctiveClause], registry: DigestRegistry) -> int:
    return registry.digest_set(dc.id for dc in clauses)


# -- abstracted comparisons ---------------------------------------------------


def equality_skeleton_features(
    ast: LabeledAst,
    registry: DigestRegistry,
    full_ids: dict[int, int] | None = None,
) -> dict[int, set[int]]:
    """<op, lhs, ?> features for comparisons whose right side is constant.

    Applies to =, !=, <, <=, >, >= with a constant right operand, and to
    IN / NOT IN whose right-hand list is all constants; the left operand must
    not be a constant.  Features attach to the comparison node itself.
    """
    if full_ids is None:
        full_ids = subtree_ids(ast, registry)
    out: dict[int, set[int]] = {}
    for n, node in enumerate(ast.nodes):
        if node.atom not in _EQ_FAMILY or len(node.children) != 2:
            continue
        left, right = node.children[0], node.children[1]
        if ast.nodes[left].is_const:
            continue
        if node.atom in (frontend.IN, frontend.NOT_IN):
            items = ast.nodes[right].children
            if not items or not all(ast.nodes[c].is_const for c in items):
                continue
        elif not ast.nodes[right].is_const:
            continue
        feat = registry.digest_list(
            [
                registry.intern_atom(node.atom),
                full_ids[left],
                registry.placeholder_id,
            ]
        )
        out.setdefault(n, set()).add(feat)
    return out


# -- full rule pipeline -------------------------------------------------------


def predicate_roots(ast: LabeledAst) -> list[int]:
    """Children of WHERE / ON nodes, i.e. the boolean formulas to normalize."""
    return [
        node.children[0]
        for node in ast.nodes
        if node.atom in frontend.PREDICATE_HOSTS and node.children
    ]


def extract(
    skeleton: QuerySkeleton,
    config: RuleConfig,
    registry: DigestRegistry,
) -> Counter:
    """Feature vector of a query skeleton under the configured rule suite.

    Order of application: CNF normalization of each predicate (its clause
    features replace the raw connective subtree features, and ancestors see
    the formula as one opaque id), base relabeling over the rewritten tree,
    per-literal relabeling, abstracted comparisons, then the pruning filter.
    Predicates where CNF fails (negation, clause blow-up) fall back to base
    relabeling; that is never a batch failure.
    """
    return extract_from_ast(skeleton.skeleton_ast, config, registry)


def extract_from_ast(
    ast: LabeledAst, config: RuleConfig, registry: DigestRegistry
) -> Counter:
    patterns = _parse_prune_patterns(config.prune_patterns)
    for fid in config.pruned_ids:
        registry.mark_pruned(fid)

    labels_raw = _wl_labels(ast, registry)
    full_ids = {n: levels[-1] for n, levels in labels_raw.items()}

    sets: dict[int, set[int]] = {}

    def emit_wl(n: int, i: int, fid: int) -> None:
        tag = ast.nodes[n].atom
        if i in patterns.get(tag, ()):
            registry.mark_pruned(fid)
            return
        if registry.is_pruned(fid):
            return
        sets.setdefault(n, set()).add(fid)

    def emit_plain(n: int, fid: int) -> None:
        if registry.is_pruned(fid):
            return
        sets.setdefault(n, set()).add(fid)

    cnf_map: dict[int, list[DisjunctiveClause]] = {}
    if config.enable_cnf:
        for p in predicate_roots(ast):
            try:
                cnf_map[p] = cnf_normalize(
                    ast,
                    p,
                    registry,
                    clause_cap=config.cnf_clause_cap,
                    literal_ids=full_ids,
                )
            except (UnsupportedNegationError, CnfBlowupError) as exc:
                logger.warning(
                    "CNF skipped for predicate at node %d (%s); using base "
                    "relabeling for that subtree",
                    p,
                    exc,
                )

    override = {p: cnf_id(clauses, registry) for p, clauses in cnf_map.items()}
    if not override and config.max_depth is None:
        labels_eff = labels_raw
    else:
        labels_eff = _wl_labels(
            ast, registry, max_depth=config.max_depth, override=override
        )
    for n, levels in labels_eff.items():
        if n in override:
            continue
        for i, fid in enumerate(levels):
            emit_wl(n, i, fid)

    for p, clauses in cnf_map.items():
        for fid in cnf_features(clauses, registry):
            emit_plain(p, fid)
        for lit in literal_roots(ast, p):
            lit_labels = _wl_labels(
                ast, registry, max_depth=config.max_depth, start=lit
            )
            for n, levels in lit_labels.items():
                for i, fid in enumerate(levels):
                    emit_wl(n, i, fid)

    if config.enable_equality_skeleton:
        for n, feats in equality_skeleton_features(ast, registry, full_ids).items():
            for fid in feats:
                emit_plain(n, fid)

    if config.emit_raw_constants:
        for n, node in enumerate(ast.nodes):
            if node.atom not in _EQ_FAMILY or len(node.children) != 2:
                continue
            left, right = node.children[0], node.children[1]
            if ast.nodes[left].is_const:
                continue
            if node.atom in (frontend.IN, frontend.NOT_IN):
                items = ast.nodes[right].children
                if not items or not all(ast.nodes[c].is_const for c in items):
                    continue
                rhs = [registry.intern_atom(ast.label(c)) for c in items]
            elif ast.nodes[right].is_const:
                rhs = [registry.intern_atom(ast.label(right))]
            else:
                continue
            emit_plain(
                n,
                registry.digest_list(
                    [registry.intern_atom(node.atom), full_ids[left]] + rhs
                ),
            )

    vector: Counter = Counter()
    for n in sorted(sets):
        vector.update(sets[n])
    return vector
