"""Clustering skeletons by structural distance.

Run:  python demos/03_clustering.py
"""

import random

from qlog import (
    DigestRegistry,
    RuleConfig,
    build_matrix,
    cut,
    dedupe,
    entanglement,
    extract,
    hierarchical_cluster,
    parse,
    skeletonize,
)
from qlog.synth import generate_log

registry = DigestRegistry()
config = RuleConfig()

print("=== 2,000 queries, 15 templates -> 15 skeletons ===")
corpus = dedupe(skeletonize(parse(sql).ast) for sql in generate_log(2000, 15, seed=3))
for sk in corpus.skeletons:
    sk.vector = extract(sk, config, registry)
print(f"  skeletons: {len(corpus)}   queries: {corpus.total_queries}")

print()
print("=== agglomerative merge trace (average linkage) ===")
matrix = build_matrix(corpus)
dendrogram = hierarchical_cluster(matrix, linkage="average")
for left, right, height in dendrogram.merges[:6]:
    print(f"  merge {left:>3} + {right:>3}  at height {height:8.3f}")
print(f"  ... {len(dendrogram.merges)} merges total")

print()
print("=== flat cuts ===")
for k in (2, 4, 8):
    flat = cut(dendrogram, k=k)
    sizes = sorted(
        (flat.labels.count(c) for c in range(flat.k)), reverse=True
    )
    print(f"  k={k}: cluster sizes {sizes}")

print()
print("=== comparing two linkages via entanglement ===")
other = hierarchical_cluster(matrix, linkage="complete")
score = entanglement(dendrogram.leaf_order(), other.leaf_order())
print(f"  average vs complete leaf orders: {score:.3f}  (0 = identical order)")
print(f"  average vs itself:               {entanglement(dendrogram.leaf_order(), dendrogram.leaf_order()):.3f}")

print()
print("=== exports ===")
print("  newick:", dendrogram.to_newick()[:72], "...")
print("  json  :", dendrogram.to_json()[:72], "...")
