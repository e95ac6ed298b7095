"""Per-cluster summaries: FP-trees, shared-feature explanations, DOT graphs.

Transactions are the member skeletons' feature sets (multiplicity collapsed).
The FP-tree orders items by descending cluster-wide support, ties broken by
ascending feature id, so insertion order never changes the resulting tree.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from . import frontend
from .cluster import DistanceMatrix, SkeletonCorpus, distance
from .features import subtree_ids
from .registry import ATOM, BAG, LIST, SET, DigestRegistry

LABELS = ("safe", "unsafe", "unknown")


@dataclass
class FPNode:
    feature: int | None
    count: int = 0
    children: dict[int, "FPNode"] = field(default_factory=dict)


class FPTree:
    """Prefix tree over support-sorted feature sets with per-node counts.

    ``order_key`` decides item order inside the tree; it receives
    (feature, support) and defaults to descending support with ascending
    feature id breaking ties.
    """

    def __init__(
        self,
        transactions: Iterable[frozenset[int]] | Iterable[set[int]],
        order_key: Callable[[int, int], tuple] | None = None,
    ):
        txns = [frozenset(t) for t in transactions]
        self.n_transactions = len(txns)
        self.supports: Counter = Counter()
        for t in txns:
            self.supports.update(t)
        if order_key is None:
            order_key = lambda f, s: (-s, f)
        self.order: list[int] = sorted(
            self.supports, key=lambda f: order_key(f, self.supports[f])
        )
        rank = {f: i for i, f in enumerate(self.order)}
        self.root = FPNode(feature=None, count=self.n_transactions)
        self.header: dict[int, list[FPNode]] = {f: [] for f in self.order}
        for t in txns:
            node = self.root
            for f in sorted(t, key=rank.__getitem__):
                child = node.children.get(f)
                if child is None:
                    child = FPNode(feature=f)
                    node.children[f] = child
                    self.header[f].append(child)
                child.count += 1
                node = child

    def support(self, feature: int) -> int:
        return sum(node.count for node in self.header.get(feature, ()))

    def node_count(self) -> int:
        count = 0
        stack = [self.root]
        while stack:
            node = stack.pop()
            count += 1
            stack.extend(node.children.values())
        return count

    def to_dict(self, registry: DigestRegistry | None = None) -> dict:
        """Nested-dict view (feature, label, count, children), iterative so
        arbitrarily deep paths cannot hit the recursion limit."""

        def describe(node: FPNode) -> dict:
            label = ""
            if node.feature is not None and registry is not None:
                label = render_feature(registry, node.feature)
            return {
                "feature": node.feature,
                "label": label,
                "count": node.count,
                "children": [],
            }

        root_view = describe(self.root)
        stack = [(self.root, root_view)]
        while stack:
            node, view = stack.pop()
            for child in node.children.values():
                child_view = describe(child)
                view["children"].append(child_view)
                stack.append((child, child_view))
        return {"size": self.n_transactions, "root": root_view}


def build_fptree(
    transactions: Sequence[set[int]],
    order_key: Callable[[int, int], tuple] | None = None,
) -> FPTree:
    return FPTree(transactions, order_key=order_key)


def common_features(tree: FPTree, tau: float) -> list[tuple[int, int]]:
    """(feature, support) pairs with support >= ceil(tau * size), by support
    descending then feature id ascending."""
    threshold = math.ceil(tau * tree.n_transactions - 1e-9)
    out = [
        (f, tree.supports[f])
        for f in tree.order
        if tree.supports[f] >= threshold
    ]
    out.sort(key=lambda fs: (-fs[1], fs[0]))
    return out


# -- feature rendering --------------------------------------------------------

_OP_SYMBOLS = {
    frontend.EQUALS: "=",
    frontend.NOT_EQUALS: "!=",
    frontend.LESS: "<",
    frontend.LESS_EQ: "<=",
    frontend.GREATER: ">",
    frontend.GREATER_EQ: ">=",
    frontend.IN: "in",
    frontend.NOT_IN: "not in",
    frontend.LIKE: "like",
    frontend.NOT_LIKE: "not like",
}


def render_feature(registry: DigestRegistry, fid: int) -> str:
    """Human-readable fragment for a feature id, via reverse lookup.

    Subtree features render as tag(child, ...) terms with comparison
    operators shown infix; clause sets join with ' or ', clause-set sets
    with ' and '.
    """
    key = registry.key_of(fid)
    kind = key[0]
    if kind == ATOM:
        text = key[1]
        return text.lower() if text in frontend.ATOMS else text
    if kind == BAG:
        return ", ".join(render_feature(registry, e) for e in key[1:])
    if kind == SET:
        members = list(key[1:])
        if not members:
            return "{}"
        if all(registry.kind_of(m) == SET for m in members):
            return " and ".join(
                f"({render_feature(registry, m)})" for m in members
            )
        return " or ".join(render_feature(registry, m) for m in members)
    # LIST: either <atom, bag-of-children> from relabeling, or an abstracted
    # comparison <op, lhs, ...>.
    elems = key[1:]
    head = registry.key_of(elems[0])
    head_text = head[1] if head[0] == ATOM else render_feature(registry, elems[0])
    if head[0] == ATOM and head[1] in _OP_SYMBOLS and len(elems) >= 3:
        lhs = render_feature(registry, elems[1])
        rhs = ", ".join(render_feature(registry, e) for e in elems[2:])
        return f"{lhs} {_OP_SYMBOLS[head[1]]} {rhs}"
    if len(elems) == 2 and registry.kind_of(elems[1]) == BAG:
        inner = render_feature(registry, elems[1])
        if head[0] == ATOM and head[1] in _OP_SYMBOLS:
            bag_key = registry.key_of(elems[1])
            if len(bag_key) == 3:
                a, b = (render_feature(registry, e) for e in bag_key[1:])
                return f"{a} {_OP_SYMBOLS[head[1]]} {b}"
        return f"{head_text.lower()}({inner})"
    args = ", ".join(render_feature(registry, e) for e in elems[1:])
    return f"{head_text.lower()}({args})"


def feature_head_tag(registry: DigestRegistry, fid: int) -> str:
    """Grammar atom a feature hangs off, or its digest kind for collections."""
    key = registry.key_of(fid)
    if key[0] == ATOM:
        return key[1]
    if key[0] == LIST and len(key) > 1:
        head = registry.key_of(key[1])
        if head[0] == ATOM:
            return head[1]
    return key[0]


def feature_closure(registry: DigestRegistry, fid: int, memo: dict | None = None) -> set[int]:
    """All constituent ids reachable from a feature, excluding itself."""
    if memo is None:
        memo = {}
    cached = memo.get(fid)
    if cached is not None:
        return cached
    out: set[int] = set()
    for e in registry.key_of(fid)[1:]:
        if isinstance(e, int):
            out.add(e)
            out |= feature_closure(registry, e, memo)
    memo[fid] = out
    return out


def feature_size(registry: DigestRegistry, fid: int) -> int:
    return 1 + len(feature_closure(registry, fid))


# -- cluster summaries --------------------------------------------------------


@dataclass
class ClusterSummary:
    cluster_id: int
    member_ids: list[int]
    n_skeletons: int
    n_queries: int
    common: list[tuple[int, int]]
    representative_id: int
    explanation: str
    fptree: FPTree
    label: str = "unknown"

    def to_dict(self, corpus: SkeletonCorpus, registry: DigestRegistry) -> dict:
        return {
            "id": self.cluster_id,
            "label": self.label,
            "size": {"skeletons": self.n_skeletons, "queries": self.n_queries},
            "members": self.member_ids,
            "common_features": [
                {
                    "feature": fid,
                    "support": support,
                    "fraction": round(support / self.n_skeletons, 6),
                    "text": render_feature(registry, fid),
                }
                for fid, support in self.common
            ],
            "representative": {
                "skeleton": self.representative_id,
                "text": corpus.skeletons[self.representative_id].canonical_text,
            },
            "explanation": self.explanation,
        }

    def to_json(self, corpus: SkeletonCorpus, registry: DigestRegistry) -> str:
        return (
            json.dumps(self.to_dict(corpus, registry), sort_keys=True, indent=2)
            + "\n"
        )


def _medoid(
    corpus: SkeletonCorpus,
    member_ids: Sequence[int],
    dists: DistanceMatrix | None,
) -> int:
    """Member with minimal mean distance to the rest; ties take the lowest id.

    member_ids must be sorted ascending so that argmin's first-match rule
    realizes the tie-break.
    """
    if len(member_ids) == 1:
        return member_ids[0]
    if dists is not None:
        sums = dists.submatrix(member_ids).sum(axis=0)
        return member_ids[int(sums.argmin())]
    best_id = -1
    best_mean = math.inf
    for i in member_ids:
        vi = corpus.skeletons[i].vector
        total = sum(
            distance(vi, corpus.skeletons[j].vector) for j in member_ids if j != i
        )
        mean = total / (len(member_ids) - 1)
        if mean < best_mean:
            best_mean = mean
            best_id = i
    return best_id


def explain(
    summary_common: list[tuple[int, int]],
    corpus: SkeletonCorpus,
    member_ids: Sequence[int],
    n_queries: int,
    registry: DigestRegistry,
    tau: float,
) -> str:
    """Deterministic text overview of what a cluster's skeletons share.

    Reports the maximal shared features (those not contained in any larger
    shared feature), most common first.
    """
    n = len(member_ids)
    head = f"Cluster of {n} skeleton{'s' if n != 1 else ''} covering {n_queries} quer{'ies' if n_queries != 1 else 'y'}."
    if n == 1:
        text = corpus.skeletons[member_ids[0]].canonical_text
        return f"{head}\nSingle skeleton: {text}"
    if not summary_common:
        return f"{head}\nNo dominant shared structure at threshold {tau:g}."

    memo: dict = {}
    common_ids = {fid for fid, _ in summary_common}
    contained: set[int] = set()
    for fid, _ in summary_common:
        contained |= feature_closure(registry, fid, memo) & common_ids
    maximal = [(f, s) for f, s in summary_common if f not in contained]

    # bare grammar atoms (select, where, "?", ...) say nothing about a cluster
    def is_generic(fid: int) -> bool:
        key = registry.key_of(fid)
        return key[0] == ATOM and (key[1] in frontend.ATOMS or key[1] == "?")

    informative = [(f, s) for f, s in maximal if not is_generic(f)]
    # among subtree features sharing a head tag and support, the largest term
    # subsumes the shallower truncations of the same structure
    best_size: dict[tuple, int] = {}
    for fid, support in informative:
        if registry.kind_of(fid) == LIST:
            group = (feature_head_tag(registry, fid), support)
            size = feature_size(registry, fid)
            if size > best_size.get(group, -1):
                best_size[group] = size
    selected = []
    for fid, support in informative:
        if registry.kind_of(fid) == LIST:
            group = (feature_head_tag(registry, fid), support)
            if feature_size(registry, fid) < best_size[group]:
                continue
        selected.append((fid, support))
    if not selected:
        selected = maximal

    selected.sort(key=lambda fs: (-fs[1], -feature_size(registry, fs[0]), fs[0]))
    lines = [head]
    for fid, support in selected:
        pct = round(100.0 * support / n)
        lines.append(f"{pct}% share: {render_feature(registry, fid)}")
    return "\n".join(lines)


def summarize_cluster(
    cluster_id: int,
    corpus: SkeletonCorpus,
    member_ids: Sequence[int],
    registry: DigestRegistry,
    tau: float = 0.8,
    dists: DistanceMatrix | None = None,
) -> ClusterSummary:
    member_ids = sorted(member_ids)
    transactions = [set(corpus.skeletons[i].vector.keys()) for i in member_ids]
    tree = FPTree(transactions)
    common = common_features(tree, tau)
    n_queries = sum(corpus.skeletons[i].count for i in member_ids)
    explanation = explain(common, corpus, member_ids, n_queries, registry, tau)
    return ClusterSummary(
        cluster_id=cluster_id,
        member_ids=list(member_ids),
        n_skeletons=len(member_ids),
        n_queries=n_queries,
        common=common,
        representative_id=_medoid(corpus, member_ids, dists),
        explanation=explanation,
        fptree=tree,
    )


# -- graph visualization -------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def visualize(
    summary: ClusterSummary,
    corpus: SkeletonCorpus,
    registry: DigestRegistry,
    tau: float = 0.8,
) -> str:
    """DOT digraph of the representative skeleton's AST.

    Nodes whose full subtree is shared by at least ceil(tau * size) members
    are drawn filled ("common"); the rest dashed ("variable").
    """
    member_ids = summary.member_ids
    threshold = math.ceil(tau * len(member_ids) - 1e-9)
    support: Counter = Counter()
    for i in member_ids:
        ids = set(subtree_ids(corpus.skeletons[i].skeleton_ast, registry).values())
        support.update(ids)

    ast = corpus.skeletons[summary.representative_id].skeleton_ast
    full = subtree_ids(ast, registry)
    lines = [
        f"digraph cluster_{summary.cluster_id} {{",
        "  rankdir=TB;",
        '  node [fontname="Helvetica", shape=box];',
    ]
    for idx in sorted(full):
        node = ast.nodes[idx]
        label = node.atom.lower()
        if node.text is not None:
            label = f"{label}: {node.text}" if node.atom == frontend.STAR else node.text
        if support[full[idx]] >= threshold:
            style = 'style=filled, fillcolor="#a6cee3"'
        else:
            style = 'style=dashed, color="#888888"'
        lines.append(f'  n{idx} [label="{_dot_escape(label)}", {style}];')
    for idx in sorted(full):
        for child in ast.nodes[idx].children:
            lines.append(f"  n{idx} -> n{child};")
    lines.append("}")
    return "\n".join(lines) + "\n"
