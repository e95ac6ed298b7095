"""Summarizing a cluster: FP-tree, shared-feature explanation, DOT graph.

The two queries below are structurally near-identical pulls from a payments
history table; they differ only in one extra conjunct and an IN vs NOT IN.

Run:  python demos/04_cluster_summaries.py
"""

from qlog import (
    DigestRegistry,
    RuleConfig,
    dedupe,
    extract,
    parse,
    render_feature,
    skeletonize,
    summarize_cluster,
    visualize,
)

QUERIES = [
    "SELECT historytran.* FROM historytran LEFT JOIN feestate AS feestate "
    "ON feestate.seqhistorytran = historytran.seq "
    "WHERE (historytran.caseid = '') AND "
    "isnull(feestate.rechargestate, '') IN ('', '') "
    "ORDER BY historytran.txdate DESC, historytran.txtime DESC",
    "SELECT historytran.* FROM historytran LEFT JOIN feestate AS feestate "
    "ON feestate.seqhistorytran = historytran.seq "
    "WHERE (historytran.caseid = '') AND feestate.reversestate = '' AND "
    "isnull(feestate.rechargestate, '') NOT IN ('', '') "
    "ORDER BY historytran.txdate DESC, historytran.txtime DESC",
]

registry = DigestRegistry()
config = RuleConfig()
corpus = dedupe(skeletonize(parse(sql).ast) for sql in QUERIES)
for sk in corpus.skeletons:
    sk.vector = extract(sk, config, registry)

summary = summarize_cluster(0, corpus, [0, 1], registry, tau=0.8)

print("=== explanation ===")
print(summary.explanation)

print()
print("=== FP-tree over the cluster's feature sets ===")
tree = summary.fptree
print(f"  transactions: {tree.n_transactions}   nodes: {tree.node_count()}")


def walk(node, depth=0):
    if node.feature is not None and depth <= 2:
        label = render_feature(registry, node.feature)
        if len(label) > 56:
            label = label[:53] + "..."
        print(f"  {'  ' * depth}{label}  (support {node.count})")
    for child in node.children.values():
        walk(child, depth + 1)


walk(tree.root)

print()
print("=== representative skeleton, rendered as DOT ===")
dot = visualize(summary, corpus, registry, tau=0.8)
common = dot.count("filled")
variable = dot.count("dashed")
print(f"  nodes: {common} common (filled), {variable} variable (dashed)")
print()
print(dot)
