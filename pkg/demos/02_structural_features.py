"""How queries become sparse feature vectors.

Every node is identified by the ids of its depth-truncated subtrees; digests
turn those subtrees into dense integers, and SQL-aware rules (constant
abstraction, CNF normalization, abstracted comparisons) make the vectors
robust to cosmetic differences.

Run:  python demos/02_structural_features.py
"""

from qlog import (
    DigestRegistry,
    RuleConfig,
    cnf_normalize,
    distance,
    extract,
    parse,
    render_feature,
    skeletonize,
    wl_base_features,
)

registry = DigestRegistry()

print("=== digests: lists, bags, sets ===")
a, b, c = (registry.intern_atom(x) for x in "abc")
print(f"  list [a,b,a,c] vs [a,a,b,c]: {registry.digest_list([a,b,a,c])} vs {registry.digest_list([a,a,b,c])}")
print(f"  bag  {{a,b,a,c}} vs {{a,a,b,c}}: {registry.digest_bag([a,b,a,c])} vs {registry.digest_bag([a,a,b,c])}")
print(f"  set  {{a,a,b,c}} vs {{a,b,c}}:   {registry.digest_set([a,a,b,c])} vs {registry.digest_set([a,b,c])}")

print()
print("=== base relabeling counts shared subtrees ===")
q1 = parse("SELECT * FROM r WHERE r.a = 1 AND r.b = 2").ast
q2 = parse("SELECT * FROM r WHERE r.a = 9").ast
v1 = wl_base_features(q1, registry)
v2 = wl_base_features(q2, registry)
print(f"  q1 features: {len(v1)}  q2 features: {len(v2)}  shared ids: {len(set(v1) & set(v2))}")

print()
print("=== CNF makes algebraically equal filters identical ===")
factored = parse("SELECT * FROM t WHERE (t.a = 1 AND t.b = 2) OR t.c = 3").ast
expanded = parse("SELECT * FROM t WHERE (t.a = 1 OR t.c = 3) AND (t.b = 2 OR t.c = 3)").ast
for ast in (factored, expanded):
    where = next(i for i, n in enumerate(ast.nodes) if n.atom == "WHERE")
    clauses = cnf_normalize(ast, ast.nodes[where].children[0], registry)
    rendered = [render_feature(registry, dc.id) for dc in clauses]
    print(f"  clauses: {sorted(rendered)}")

print()
print("=== full extraction: constants do not matter, structure does ===")
config = RuleConfig()
vec = {}
for name, sql in [
    ("base", "SELECT * FROM r WHERE r.a = 1 AND r.b = 'x'"),
    ("same shape", "SELECT * FROM r WHERE r.a = 42 AND r.b = 'zzz'"),
    ("swapped", "SELECT * FROM r WHERE r.b = 'q' AND r.a = 7"),
    ("different", "SELECT * FROM s WHERE s.z > 5"),
]:
    vec[name] = extract(skeletonize(parse(sql).ast), config, registry)
print(f"  d(base, same shape) = {distance(vec['base'], vec['same shape']):.3f}")
print(f"  d(base, swapped)    = {distance(vec['base'], vec['swapped']):.3f}")
print(f"  d(base, different)  = {distance(vec['base'], vec['different']):.3f}")

print()
print("=== a few features, rendered back to text ===")
for fid, mult in list(vec["base"].most_common())[:6]:
    print(f"  x{mult}  {render_feature(registry, fid)}")
