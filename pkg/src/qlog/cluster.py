"""Skeleton deduplication, Euclidean distances, and agglomerative clustering.

Distances are plain Euclidean over sparse feature-count vectors.  The merge
loop is a standard Lance-Williams agglomeration with deterministic
tie-breaking: among pairs at the minimum distance, the lexicographically
lowest (i, j) cluster-id pair merges first.  New clusters take ids
n, n+1, ... in merge order, leaves being 0..n-1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from scipy import sparse

from .features import QuerySkeleton

LINKAGES = ("single", "complete", "average")


@dataclass
class SkeletonCorpus:
    """Unique skeletons (by canonical text) with aggregated occurrence counts."""

    skeletons: list[QuerySkeleton]
    total_queries: int

    def __len__(self) -> int:
        return len(self.skeletons)

    def vectors(self) -> list[Mapping[int, int]]:
        out = []
        for sk in self.skeletons:
            if sk.vector is None:
                raise ValueError("corpus skeletons have no feature vectors yet")
            out.append(sk.vector)
        return out


def dedupe(skeletons: Iterable[QuerySkeleton]) -> SkeletonCorpus:
    """Collapse a stream of skeletons to one entry per canonical text."""
    by_text: dict[str, QuerySkeleton] = {}
    total = 0
    for sk in skeletons:
        total += sk.count
        kept = by_text.get(sk.canonical_text)
        if kept is None:
            by_text[sk.canonical_text] = sk
        else:
            kept.count += sk.count
    return SkeletonCorpus(skeletons=list(by_text.values()), total_queries=total)


def distance(u: Mapping[int, int], v: Mapping[int, int]) -> float:
    """Euclidean distance over the union of feature keys."""
    acc = 0.0
    for k, a in u.items():
        d = a - v.get(k, 0)
        acc += d * d
    for k, b in v.items():
        if k not in u:
            acc += b * b
    return math.sqrt(acc)


class DistanceMatrix:
    """Condensed upper-triangle pairwise distance storage."""

    def __init__(self, n: int, condensed: np.ndarray):
        expected = n * (n - 1) // 2
        if condensed.shape != (expected,):
            raise ValueError(f"condensed length {condensed.shape} != {expected}")
        self.n = n
        self.condensed = condensed

    def get(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        return float(self.condensed[i * self.n - i * (i + 1) // 2 + (j - i - 1)])

    def to_square(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        iu, ju = np.triu_indices(self.n, 1)
        out[iu, ju] = self.condensed
        out[ju, iu] = self.condensed
        return out

    def submatrix(self, ids) -> np.ndarray:
        """Dense pairwise distances restricted to the given indices."""
        ids = np.asarray(ids, dtype=np.int64)
        lo = np.minimum.outer(ids, ids)
        hi = np.maximum.outer(ids, ids)
        off_diag = lo != hi
        flat = lo * self.n - lo * (lo + 1) // 2 + (hi - lo - 1)
        out = np.zeros(lo.shape)
        out[off_diag] = self.condensed[flat[off_diag]]
        return out


def build_matrix(corpus: SkeletonCorpus) -> DistanceMatrix:
    """All-pairs Euclidean distances via the Gram-matrix identity.

    Counts are integers, so the squared distances are exact in float64 and
    the result matches per-pair ``distance`` calls bit for bit.
    """
    vectors = corpus.vectors()
    n = len(vectors)
    if n == 0:
        return DistanceMatrix(0, np.zeros(0))
    feature_ids = sorted(set().union(*[v.keys() for v in vectors]))
    col = {fid: j for j, fid in enumerate(feature_ids)}
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for v in vectors:
        for fid in sorted(v):
            indices.append(col[fid])
            data.append(float(v[fid]))
        indptr.append(len(indices))
    x = sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices), np.asarray(indptr)),
        shape=(n, max(len(feature_ids), 1)),
    )
    gram = (x @ x.T).toarray()
    norms = np.diagonal(gram)
    iu, ju = np.triu_indices(n, 1)
    d2 = norms[iu] + norms[ju] - 2.0 * gram[iu, ju]
    return DistanceMatrix(n, np.sqrt(np.maximum(d2, 0.0)))


@dataclass
class Dendrogram:
    """Binary merge tree; merge step m creates cluster id n_leaves + m."""

    n_leaves: int
    merges: list[tuple[int, int, float]]

    def heights(self) -> list[float]:
        return [h for _, _, h in self.merges]

    def leaf_order(self) -> list[int]:
        """Left-to-right leaf positions from a depth-first walk of the tree."""
        if self.n_leaves == 0:
            return []
        if not self.merges:
            return [0]
        children = {
            self.n_leaves + m: (left, right)
            for m, (left, right, _) in enumerate(self.merges)
        }
        order: list[int] = []
        stack = [self.n_leaves + len(self.merges) - 1]
        while stack:
            node = stack.pop()
            if node < self.n_leaves:
                order.append(node)
            else:
                left, right = children[node]
                stack.append(right)
                stack.append(left)
        return order

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": "qlog-dendrogram v1",
                "n": self.n_leaves,
                "merges": [[a, b, h] for a, b, h in self.merges],
                "leaves": self.leaf_order(),
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Dendrogram":
        data = json.loads(text)
        if data.get("format") != "qlog-dendrogram v1":
            raise ValueError(f"unsupported dendrogram format {data.get('format')!r}")
        return cls(
            n_leaves=data["n"],
            merges=[(int(a), int(b), float(h)) for a, b, h in data["merges"]],
        )

    def to_newick(self) -> str:
        """Newick text with branch lengths = parent height - child height."""
        if self.n_leaves == 0:
            return ";"
        if not self.merges:
            return "0;"
        children = {
            self.n_leaves + m: (left, right, h)
            for m, (left, right, h) in enumerate(self.merges)
        }
        root = self.n_leaves + len(self.merges) - 1

        def height_of(node: int) -> float:
            return children[node][2] if node in children else 0.0

        parts: dict[int, str] = {}
        stack = [(root, False)]
        while stack:
            node, expanded = stack.pop()
            if node not in children:
                parts[node] = str(node)
                continue
            left, right, h = children[node]
            if not expanded:
                stack.append((node, True))
                stack.append((left, False))
                stack.append((right, False))
            else:
                lb = h - height_of(left)
                rb = h - height_of(right)
                parts[node] = f"({parts[left]}:{lb:g},{parts[right]}:{rb:g})"
        return parts[root] + ";"


@dataclass
class FlatClustering:
    labels: list[int]
    k: int


def hierarchical_cluster(
    matrix: DistanceMatrix, linkage: str = "average"
) -> Dendrogram:
    """Agglomerate with Lance-Williams updates for the chosen linkage."""
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}; expected one of {LINKAGES}")
    n = matrix.n
    if n == 0:
        raise ValueError("cannot cluster an empty corpus")
    if n == 1:
        return Dendrogram(n_leaves=1, merges=[])

    m = 2 * n - 1
    dist = np.full((m, m), np.inf)
    dist[:n, :n] = matrix.to_square()
    np.fill_diagonal(dist, np.inf)
    size = np.ones(m)
    active = np.zeros(m, dtype=bool)
    active[:n] = True
    nn_dist = np.full(m, np.inf)
    nn_idx = np.full(m, -1, dtype=np.int64)

    def recompute_nn(row: int) -> None:
        vals = np.where(active, dist[row], np.inf)
        vals[row] = np.inf
        j = int(np.argmin(vals))
        nn_dist[row] = vals[j]
        nn_idx[row] = j

    for i in range(n):
        recompute_nn(i)

    merges: list[tuple[int, int, float]] = []
    for step in range(n - 1):
        cand = np.where(active, nn_dist, np.inf)
        a = int(np.argmin(cand))
        b = int(nn_idx[a])
        assert a < b, "tie-break invariant violated"
        height = float(nn_dist[a])
        c = n + step
        merges.append((a, b, height))

        others = active.copy()
        others[a] = others[b] = False
        ks = np.nonzero(others)[0]
        da, db = dist[a, ks], dist[b, ks]
        if linkage == "single":
            dc = np.minimum(da, db)
        elif linkage == "complete":
            dc = np.maximum(da, db)
        else:
            dc = (size[a] * da + size[b] * db) / (size[a] + size[b])
        dist[c, ks] = dc
        dist[ks, c] = dc
        size[c] = size[a] + size[b]
        active[a] = active[b] = False
        active[c] = True
        nn_dist[a] = nn_dist[b] = np.inf

        if len(ks):
            better = dc < nn_dist[ks]
            nn_dist[ks[better]] = dc[better]
            nn_idx[ks[better]] = c
            stale = ks[(nn_idx[ks] == a) | (nn_idx[ks] == b)]
            for row in stale:
                recompute_nn(int(row))
        recompute_nn(c)

    return Dendrogram(n_leaves=n, merges=merges)


def cut(
    dendrogram: Dendrogram, k: int | None = None, height: float | None = None
) -> FlatClustering:
    """Flatten a dendrogram into labels, by cluster count or merge height.

    Cluster ids are contiguous from 0, ordered by each cluster's lowest
    member index.
    """
    if (k is None) == (height is None):
        raise ValueError("specify exactly one of k or height")
    n = dendrogram.n_leaves
    if n == 0:
        return FlatClustering(labels=[], k=0)
    if k is not None:
        if not 1 <= k <= n:
            raise ValueError(f"k must be in [1, {n}]")
        applied = n - k
    else:
        applied = sum(1 for _, _, h in dendrogram.merges if h <= height)

    parent = list(range(2 * n - 1))
    for m in range(applied):
        a, b, _ = dendrogram.merges[m]
        parent[a] = parent[b] = n + m

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    groups: dict[int, list[int]] = {}
    for leaf in range(n):
        groups.setdefault(find(leaf), []).append(leaf)
    ordered = sorted(groups.values(), key=lambda leaves: leaves[0])
    labels = [0] * n
    for cid, leaves in enumerate(ordered):
        for leaf in leaves:
            labels[leaf] = cid
    return FlatClustering(labels=labels, k=len(ordered))
