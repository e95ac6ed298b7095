"""Synthetic query-log generation for benchmarks, demos, and tests.

Templates are structurally distinct by construction (each embeds its own
table name), so a log drawn from N templates always collapses to exactly N
skeletons no matter how constants are randomized.
"""

from __future__ import annotations

import random
from typing import Iterator

_FIRST_NAMES = ("acct", "case", "seq", "state", "txdate", "txtime", "owner", "region")


def template_text(idx: int) -> str:
    """SQL template #idx with {k} placeholders where constants go."""
    table = f"t{idx:04d}"
    n_cols = 1 + idx % 4
    cols = ", ".join(f"{table}.{_FIRST_NAMES[(idx + j) % len(_FIRST_NAMES)]}{j}" for j in range(n_cols))
    n_preds = 1 + idx % 3
    preds = []
    slot = 0
    for j in range(n_preds):
        col = f"{table}.{_FIRST_NAMES[(idx * 3 + j) % len(_FIRST_NAMES)]}"
        op = ("=", "!=", ">", "<")[(idx + j) % 4]
        preds.append(f"{col} {op} {{k{slot}}}")
        slot += 1
    sql = f"SELECT {cols} FROM {table}"
    if idx % 5 == 0:
        other = f"j{idx:04d}"
        sql += f" LEFT JOIN {other} ON {other}.ref = {table}.id"
    sql += " WHERE " + " AND ".join(preds)
    if idx % 4 == 1:
        sql += f" OR {table}.flag = {{k{slot}}}"
        slot += 1
    if idx % 3 == 0:
        direction = "DESC" if idx % 2 else "ASC"
        sql += f" ORDER BY {table}.{_FIRST_NAMES[idx % len(_FIRST_NAMES)]} {direction}"
    return sql


def instantiate(template: str, rng: random.Random) -> str:
    """Fill {k} slots with random integer or quoted-string constants."""
    out = template
    i = 0
    while "{k" in out:
        if rng.random() < 0.5:
            value = str(rng.randrange(0, 1_000_000))
        else:
            value = "'" + "".join(rng.choice("abcdefgh") for _ in range(6)) + "'"
        out = out.replace(f"{{k{i}}}", value, 1)
        i += 1
    return out


def generate_log(
    n_queries: int, n_templates: int, seed: int = 0
) -> Iterator[str]:
    """Yield n_queries SQL strings drawn from n_templates templates.

    The first n_templates queries cover each template once, so the skeleton
    count is exactly n_templates whenever n_queries >= n_templates.
    """
    rng = random.Random(seed)
    templates = [template_text(i) for i in range(n_templates)]
    for i in range(n_queries):
        if i < n_templates:
            tpl = templates[i]
        else:
            tpl = templates[rng.randrange(n_templates)]
        yield instantiate(tpl, rng)
