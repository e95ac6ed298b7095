"""Agreement metrics between clusterings over the same skeleton set."""

from __future__ import annotations

from collections import Counter
from math import comb
from typing import Hashable, Sequence


def entanglement(
    order_a: Sequence[Hashable],
    order_b: Sequence[Hashable],
    p: float = 2.0,
) -> float:
    """Normalized L-p distance between two leaf-position vectors, in [0, 1].

    Position vectors assign each item its integer index in the respective
    ordering.  The score is normalized by the distance between an ordering
    and its reversal, so identical orderings score 0 and exact reversals 1.
    """
    if p <= 0:
        raise ValueError("norm order p must be positive")
    if len(order_a) != len(order_b) or set(order_a) != set(order_b):
        raise ValueError("orderings must cover the same items")
    if len(set(order_a)) != len(order_a):
        raise ValueError("orderings must not repeat items")
    n = len(order_a)
    if n <= 1:
        return 0.0
    pos_b = {item: i for i, item in enumerate(order_b)}
    num = sum(abs(i - pos_b[item]) ** p for i, item in enumerate(order_a))
    den = sum(abs(n - 1 - 2 * i) ** p for i in range(n))
    return (num / den) ** (1.0 / p)


def adjusted_rand(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Adjusted Rand index between two flat partitions of the same items."""
    if len(labels_a) != len(labels_b):
        raise ValueError("label sequences must have equal length")
    n = len(labels_a)
    if n == 0:
        return 1.0
    pairs = Counter(zip(labels_a, labels_b))
    rows = Counter(labels_a)
    cols = Counter(labels_b)
    index = sum(comb(c, 2) for c in pairs.values())
    row_sum = sum(comb(c, 2) for c in rows.values())
    col_sum = sum(comb(c, 2) for c in cols.values())
    total = comb(n, 2)
    if total == 0:
        return 1.0
    expected = row_sum * col_sum / total
    max_index = (row_sum + col_sum) / 2
    if max_index == expected:
        return 1.0
    return (index - expected) / (max_index - expected)
