import random

import pytest

from qlog.metrics import adjusted_rand, entanglement


class TestEntanglement:
    def test_identical_orderings(self):
        order = list(range(140))
        assert entanglement(order, list(order)) == 0.0

    def test_reversal_is_one(self):
        order = list(range(140))
        assert entanglement(order, order[::-1]) == pytest.approx(1.0, abs=1e-12)

    def test_reversal_is_one_odd_n(self):
        order = list(range(7))
        assert entanglement(order, order[::-1]) == pytest.approx(1.0, abs=1e-12)

    def test_random_pairs_bounded_and_symmetric(self):
        rng = random.Random(31)
        items = list(range(140))
        for _ in range(1000):
            a = list(items)
            b = list(items)
            rng.shuffle(a)
            rng.shuffle(b)
            score = entanglement(a, b)
            assert 0.0 <= score <= 1.0
            assert entanglement(b, a) == pytest.approx(score, rel=1e-12)

    def test_item_labels_do_not_matter(self):
        a = ["x", "y", "z", "w"]
        b = ["y", "x", "z", "w"]
        score = entanglement(a, b)
        a2 = [10, 20, 30, 40]
        b2 = [20, 10, 30, 40]
        assert entanglement(a2, b2) == pytest.approx(score, rel=1e-12)

    def test_other_norms(self):
        order = list(range(10))
        assert entanglement(order, order[::-1], p=1.0) == pytest.approx(1.0)
        assert entanglement(order, list(order), p=1.0) == 0.0

    def test_mismatched_universes_rejected(self):
        with pytest.raises(ValueError):
            entanglement([1, 2, 3], [1, 2, 4])
        with pytest.raises(ValueError):
            entanglement([1, 2], [1, 2, 3])

    def test_trivial_sizes(self):
        assert entanglement([], []) == 0.0
        assert entanglement([5], [5]) == 0.0


class TestAdjustedRand:
    def test_identical_partitions(self):
        labels = [0, 0, 1, 1, 2, 2]
        assert adjusted_rand(labels, labels) == 1.0

    def test_identical_up_to_renaming(self):
        a = [0, 0, 1, 1, 2]
        b = [5, 5, 9, 9, 7]
        assert adjusted_rand(a, b) == 1.0

    def test_one_cluster_vs_singletons_hand_computed(self):
        # contingency: four cells of 1 -> index 0; rows C(4,2)=6; cols 0;
        # expected 0; max 3; ARI = (0 - 0) / (3 - 0) = 0
        a = [0, 0, 0, 0]
        b = [0, 1, 2, 3]
        assert adjusted_rand(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_partial_agreement(self):
        # a = {01}{23}, b = {012}{3}: pairs together in both = 1 (0,1)
        # index = 1; rows = 2; cols = C(3,2)=3; expected = 2*3/6 = 1
        # max = 2.5; ARI = (1 - 1) / (2.5 - 1) = 0
        a = [0, 0, 1, 1]
        b = [0, 0, 0, 1]
        assert adjusted_rand(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_known_positive_case(self):
        # a = {01}{23}, b = {01}{2}{3}: index=1, rows=2, cols=1,
        # expected=2*1/6=1/3, max=1.5, ARI=(1-1/3)/(1.5-1/3)=4/7
        a = [0, 0, 1, 1]
        b = [0, 0, 1, 2]
        assert adjusted_rand(a, b) == pytest.approx(4 / 7, rel=1e-12)

    def test_independent_random_partitions_near_zero(self):
        rng = random.Random(33)
        total = 0.0
        trials = 1000
        for _ in range(trials):
            a = [rng.randrange(4) for _ in range(60)]
            b = [rng.randrange(4) for _ in range(60)]
            total += adjusted_rand(a, b)
        assert abs(total / trials) < 0.05

    def test_label_permutation_invariance(self):
        rng = random.Random(34)
        a = [rng.randrange(5) for _ in range(40)]
        b = [rng.randrange(5) for _ in range(40)]
        base = adjusted_rand(a, b)
        mapping = {i: (i * 7 + 3) % 11 for i in range(5)}
        assert adjusted_rand([mapping[x] for x in a], b) == pytest.approx(base)

    def test_symmetry(self):
        rng = random.Random(35)
        a = [rng.randrange(3) for _ in range(30)]
        b = [rng.randrange(3) for _ in range(30)]
        assert adjusted_rand(a, b) == pytest.approx(adjusted_rand(b, a))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            adjusted_rand([0, 1], [0, 1, 2])
