import itertools
import json
import random
import re
from collections import Counter

import numpy as np
import pytest

from qlog.cluster import (
    Dendrogram,
    DistanceMatrix,
    SkeletonCorpus,
    build_matrix,
    cut,
    dedupe,
    distance,
    hierarchical_cluster,
)
from qlog.features import QuerySkeleton, RuleConfig, extract, skeletonize
from qlog.frontend import parse
from qlog.metrics import adjusted_rand
from qlog.registry import DigestRegistry
from qlog.synth import generate_log, instantiate, template_text


def corpus_from_vectors(vectors) -> SkeletonCorpus:
    skeletons = [
        QuerySkeleton(
            skeleton_ast=None, canonical_text=f"q{i}", vector=Counter(v)
        )
        for i, v in enumerate(vectors)
    ]
    return SkeletonCorpus(skeletons=skeletons, total_queries=len(skeletons))


def random_sparse_vector(rng, n_keys=30, max_mult=5):
    keys = rng.sample(range(100), rng.randint(1, n_keys))
    return {k: rng.randint(1, max_mult) for k in keys}


class TestDedupe:
    def test_one_template_many_constants(self):
        rng = random.Random(0)
        tpl = template_text(3)
        skeletons = [
            skeletonize(parse(instantiate(tpl, rng)).ast) for _ in range(200)
        ]
        corpus = dedupe(skeletons)
        assert len(corpus) == 1
        assert corpus.skeletons[0].count == 200
        assert corpus.total_queries == 200

    def test_fifty_templates(self):
        skeletons = [
            skeletonize(parse(sql).ast) for sql in generate_log(600, 50, seed=2)
        ]
        corpus = dedupe(skeletons)
        assert len(corpus) == 50
        assert corpus.total_queries == 600

    def test_empty_stream(self):
        corpus = dedupe([])
        assert len(corpus) == 0 and corpus.total_queries == 0


class TestDistance:
    def test_identity(self):
        v = Counter({1: 2, 5: 1})
        assert distance(v, v) == 0.0

    def test_orthogonal_singletons(self):
        assert distance({1: 1}, {2: 1}) == pytest.approx(2**0.5, rel=1e-15)

    def test_matches_dense_oracle(self):
        rng = random.Random(5)
        for _ in range(50):
            u = random_sparse_vector(rng)
            v = random_sparse_vector(rng)
            dense_u = np.zeros(100)
            dense_v = np.zeros(100)
            for k, m in u.items():
                dense_u[k] = m
            for k, m in v.items():
                dense_v[k] = m
            expected = float(np.linalg.norm(dense_u - dense_v))
            assert distance(u, v) == pytest.approx(expected, rel=1e-12)


class TestBuildMatrix:
    def test_single_skeleton(self):
        corpus = corpus_from_vectors([{1: 1}])
        mat = build_matrix(corpus)
        assert mat.n == 1
        assert mat.get(0, 0) == 0.0

    def test_duplicate_vectors_zero_distance(self):
        corpus = corpus_from_vectors([{1: 2, 3: 1}, {1: 2, 3: 1}])
        mat = build_matrix(corpus)
        assert mat.get(0, 1) == 0.0

    def test_spot_check_against_direct_distance(self):
        rng = random.Random(6)
        vectors = [random_sparse_vector(rng) for _ in range(30)]
        corpus = corpus_from_vectors(vectors)
        mat = build_matrix(corpus)
        for _ in range(100):
            i, j = rng.randrange(30), rng.randrange(30)
            assert mat.get(i, j) == pytest.approx(
                distance(vectors[i], vectors[j]), rel=1e-12, abs=1e-12
            )

    def test_metric_axioms(self):
        rng = random.Random(7)
        vectors = [random_sparse_vector(rng) for _ in range(15)]
        mat = build_matrix(corpus_from_vectors(vectors))
        square = mat.to_square()
        assert np.array_equal(square, square.T)
        assert np.all(np.diagonal(square) == 0.0)
        n = len(vectors)
        for i, j, k in itertools.permutations(range(n), 3):
            assert square[i, j] <= square[i, k] + square[k, j] + 1e-9

    def test_submatrix_matches_get(self):
        rng = random.Random(19)
        vectors = [random_sparse_vector(rng) for _ in range(20)]
        mat = build_matrix(corpus_from_vectors(vectors))
        ids = sorted(rng.sample(range(20), 7))
        sub = mat.submatrix(ids)
        for a, i in enumerate(ids):
            for b, j in enumerate(ids):
                assert sub[a, b] == mat.get(i, j)


def three_group_vectors():
    # identical inside each group, far across groups
    groups = []
    for g in range(3):
        base = {100 * g + j: 3 for j in range(10)}
        groups.extend([dict(base) for _ in range(4)])
    return groups


class TestHierarchicalCluster:
    @pytest.mark.parametrize("linkage", ["single", "complete", "average"])
    def test_three_separated_groups(self, linkage):
        corpus = corpus_from_vectors(three_group_vectors())
        dend = hierarchical_cluster(build_matrix(corpus), linkage=linkage)
        flat = cut(dend, k=3)
        truth = [i // 4 for i in range(12)]
        assert adjusted_rand(flat.labels, truth) == 1.0
        # the last two merges are the only nonzero-height ones
        heights = dend.heights()
        assert all(h == 0 for h in heights[:-2])
        assert all(h > 0 for h in heights[-2:])

    def test_identical_vectors_merge_at_zero(self):
        corpus = corpus_from_vectors([{1: 1}, {1: 1}, {2: 5}])
        dend = hierarchical_cluster(build_matrix(corpus))
        assert dend.merges[0] == (0, 1, 0.0)

    def test_two_leaves(self):
        vecs = [{1: 1}, {2: 2}]
        corpus = corpus_from_vectors(vecs)
        dend = hierarchical_cluster(build_matrix(corpus))
        assert len(dend.merges) == 1
        a, b, h = dend.merges[0]
        assert (a, b) == (0, 1)
        assert h == pytest.approx(distance(vecs[0], vecs[1]), rel=1e-12)

    def test_single_leaf(self):
        dend = hierarchical_cluster(build_matrix(corpus_from_vectors([{1: 1}])))
        assert dend.n_leaves == 1 and dend.merges == []

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            hierarchical_cluster(build_matrix(corpus_from_vectors([])))

    @pytest.mark.parametrize("linkage", ["single", "complete", "average"])
    def test_monotone_heights(self, linkage):
        rng = random.Random(8)
        vectors = [random_sparse_vector(rng) for _ in range(40)]
        dend = hierarchical_cluster(
            build_matrix(corpus_from_vectors(vectors)), linkage=linkage
        )
        heights = dend.heights()
        assert all(a <= b + 1e-12 for a, b in zip(heights, heights[1:]))

    def test_deterministic(self):
        rng = random.Random(9)
        vectors = [random_sparse_vector(rng) for _ in range(25)]
        corpus = corpus_from_vectors(vectors)
        one = hierarchical_cluster(build_matrix(corpus))
        two = hierarchical_cluster(build_matrix(corpus))
        assert one.merges == two.merges

    def test_deterministic_tie_break_lowest_pair(self):
        # four identical points: all pairwise distances tie at 0
        corpus = corpus_from_vectors([{1: 1}] * 4)
        dend = hierarchical_cluster(build_matrix(corpus))
        assert [(a, b) for a, b, _ in dend.merges] == [(0, 1), (2, 3), (4, 5)]

    @pytest.mark.parametrize("linkage", ["single", "complete", "average"])
    def test_permutation_equivariance_heights(self, linkage):
        rng = random.Random(10)
        rng_np = np.random.default_rng(10)
        vectors = [
            {k: float(rng_np.uniform(1, 5)) for k in rng.sample(range(60), 12)}
            for _ in range(20)
        ]
        perm = list(range(20))
        rng.shuffle(perm)
        permuted = [vectors[p] for p in perm]
        h1 = sorted(
            hierarchical_cluster(
                build_matrix(corpus_from_vectors(vectors)), linkage=linkage
            ).heights()
        )
        h2 = sorted(
            hierarchical_cluster(
                build_matrix(corpus_from_vectors(permuted)), linkage=linkage
            ).heights()
        )
        assert h1 == pytest.approx(h2, rel=1e-9)

    def test_unknown_linkage_rejected(self):
        with pytest.raises(ValueError):
            hierarchical_cluster(
                build_matrix(corpus_from_vectors([{1: 1}, {2: 1}])), linkage="ward"
            )


class TestCut:
    def test_k_equals_leaves_gives_singletons(self):
        corpus = corpus_from_vectors(three_group_vectors())
        dend = hierarchical_cluster(build_matrix(corpus))
        flat = cut(dend, k=12)
        assert flat.k == 12
        assert sorted(flat.labels) == list(range(12))

    def test_k_one_gives_one_cluster(self):
        corpus = corpus_from_vectors(three_group_vectors())
        dend = hierarchical_cluster(build_matrix(corpus))
        flat = cut(dend, k=1)
        assert flat.k == 1 and set(flat.labels) == {0}

    def test_height_cut(self):
        corpus = corpus_from_vectors(three_group_vectors())
        dend = hierarchical_cluster(build_matrix(corpus))
        flat = cut(dend, height=0.0)
        assert flat.k == 3  # the zero-height merges collapse each group

    def test_exactly_one_criterion(self):
        dend = hierarchical_cluster(build_matrix(corpus_from_vectors([{1: 1}] * 3)))
        with pytest.raises(ValueError):
            cut(dend)
        with pytest.raises(ValueError):
            cut(dend, k=2, height=1.0)

    def test_labels_contiguous_ordered_by_first_member(self):
        corpus = corpus_from_vectors(three_group_vectors())
        dend = hierarchical_cluster(build_matrix(corpus))
        flat = cut(dend, k=3)
        assert flat.labels[0] == 0
        first_seen = []
        for lab in flat.labels:
            if lab not in first_seen:
                first_seen.append(lab)
        assert first_seen == sorted(first_seen)


class TestExports:
    def make(self):
        rng = random.Random(11)
        vectors = [random_sparse_vector(rng) for _ in range(9)]
        return hierarchical_cluster(build_matrix(corpus_from_vectors(vectors)))

    def test_json_round_trip(self):
        dend = self.make()
        again = Dendrogram.from_json(dend.to_json())
        assert again.n_leaves == dend.n_leaves
        assert again.merges == dend.merges

    def test_json_has_merges_and_leaves(self):
        data = json.loads(self.make().to_json())
        assert {"format", "n", "merges", "leaves"} <= set(data)
        assert sorted(data["leaves"]) == list(range(9))

    def test_newick_well_formed(self):
        text = self.make().to_newick()
        assert text.endswith(";")
        assert text.count("(") == text.count(")")
        leaf_names = re.findall(r"(\d+):", text)
        assert len(leaf_names) >= 9

    def test_leaf_order_is_permutation(self):
        dend = self.make()
        order = dend.leaf_order()
        assert sorted(order) == list(range(9))
