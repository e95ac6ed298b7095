"""Parsing SQL into labeled trees and abstracting constants into skeletons.

Run:  python demos/01_parse_and_skeletons.py
"""

from qlog import classify, parse, skeletonize, to_sql

queries = [
    "SELECT A.a, A.b FROM A WHERE A.a != 5",
    "SELECT * FROM R WHERE R.A = 1",
    "SELECT * FROM R WHERE R.A = 2",
    "DELETE FROM audit WHERE audit.ts < '2016-01-01'",
    "SELECT 1 UNION SELECT 2",
    "EXEC sp_helptext",
]

print("=== statement kinds (no full parse needed) ===")
for sql in queries:
    print(f"  {classify(sql):<7} {sql}")

print()
print("=== a labeled abstract syntax tree ===")
outcome = parse(queries[0])
ast = outcome.ast
print(f"input : {queries[0]}")
print(f"kind  : {outcome.statement_kind}, nodes: {len(ast.nodes)}, depth: {ast.depth()}")


def show(node: int, indent: str = "  ") -> None:
    print(f"{indent}{ast.label(node)}")
    for child in ast.nodes[node].children:
        show(child, indent + "  ")


show(ast.root)

print()
print("=== constants collapse into one skeleton ===")
for sql in queries[1:3]:
    skeleton = skeletonize(parse(sql).ast)
    print(f"  {sql:<35} ->  {skeleton.canonical_text}")

print()
print("=== parse failures are diagnostics, not crashes ===")
broken = parse("SELECT FROM WHERE")
print(f"  kind={broken.statement_kind}  error={broken.error}")

print()
print("=== the canonical printer round-trips ===")
printed = to_sql(ast)
reparsed = parse(printed).ast
print(f"  printed : {printed}")
print(f"  stable  : {to_sql(reparsed) == printed}")
