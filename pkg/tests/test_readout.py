import numpy as np
import pytest

from bulbnet import OdorLibrary, OdorRecord, SniffResponse
from bulbnet.errors import UsageError
from bulbnet.readout import (
    classify_sniff, cycle_to_rank_vector, jaccard_similarity,
    manhattan_classify, manhattan_similarity,
)


def pattern(n=8, spikes=()):
    p = np.full(n, -1, np.int16)
    for mc, ts in spikes:
        p[mc] = ts
    return p


class TestJaccard:
    def test_identical_nonempty(self):
        a = pattern(spikes=[(0, 3), (2, 7)])
        assert jaccard_similarity(a, a.copy()) == 1.0

    def test_disjoint(self):
        a = pattern(spikes=[(0, 3)])
        b = pattern(spikes=[(1, 3)])
        assert jaccard_similarity(a, b) == 0.0

    def test_partial_overlap(self):
        # a={(1,3),(2,5)}, b={(1,3),(2,6)}: intersection 1, union 3
        a = pattern(spikes=[(1, 3), (2, 5)])
        b = pattern(spikes=[(1, 3), (2, 6)])
        assert jaccard_similarity(a, b) == pytest.approx(1 / 3)

    def test_empty_empty_is_one(self):
        assert jaccard_similarity(pattern(), pattern()) == 1.0

    def test_symmetric_bounded(self, rng):
        for _ in range(50):
            a = pattern(spikes=[(int(m), int(rng.integers(0, 16)))
                                for m in rng.choice(8, 3, replace=False)])
            b = pattern(spikes=[(int(m), int(rng.integers(0, 16)))
                                for m in rng.choice(8, 3, replace=False)])
            s = jaccard_similarity(a, b)
            assert s == jaccard_similarity(b, a)
            assert 0.0 <= s <= 1.0
            assert (s == 1.0) == np.array_equal(a, b)


def library_of(patterns):
    lib = OdorLibrary()
    for i, (label, pat) in enumerate(patterns):
        lib.add(OdorRecord(label=label, cohort_id=i, learned_pattern=pat,
                           tuned_gcs=np.empty(0, np.int32)))
    return lib


class TestClassifySniff:
    def test_self_match(self):
        pat = pattern(spikes=[(0, 1), (1, 2), (2, 3)])
        lib = library_of([("a", pat)])
        resp = SniffResponse(cycles=[pat.copy() for _ in range(5)])
        result = classify_sniff(resp, lib)
        assert result.label == "a"
        assert result.best_similarity == 1.0

    def test_below_threshold_unknown(self):
        lib = library_of([("a", pattern(spikes=[(0, 1), (1, 2), (2, 3), (3, 4)]))])
        off = pattern(spikes=[(0, 9), (1, 9), (2, 9), (3, 9)])
        resp = SniffResponse(cycles=[off] * 5)
        assert classify_sniff(resp, lib).is_unknown

    def test_multiple_candidates_max_across_cycles(self):
        # both odors cross threshold in the final cycle; b peaks higher earlier
        a = pattern(10, [(i, 1) for i in range(10)])
        b = pattern(10, [(i, 1) for i in range(9)] + [(9, 2)])
        lib = library_of([("a", a), ("b", b)])
        final = pattern(10, [(i, 1) for i in range(9)])  # sim 0.9 to both
        earlier = b.copy()                               # sim 1.0 to b only
        resp = SniffResponse(cycles=[earlier, earlier, earlier, earlier, final])
        result = classify_sniff(resp, lib)
        assert result.label == "b"

    def test_tie_breaks_to_earliest_trained(self):
        pat = pattern(10, [(i, 1) for i in range(10)])
        lib = library_of([("first", pat), ("second", pat.copy())])
        resp = SniffResponse(cycles=[pat.copy() for _ in range(5)])
        assert classify_sniff(resp, lib).label == "first"

    def test_empty_library_rejected(self):
        resp = SniffResponse(cycles=[pattern()] * 5)
        with pytest.raises(UsageError):
            classify_sniff(resp, OdorLibrary())


class TestRankVector:
    def test_single_spike_one_hot(self, gamma):
        v = cycle_to_rank_vector(pattern(spikes=[(3, 1)]), gamma)
        assert v[3] == 1.0
        assert v.sum() == 1.0

    def test_two_spikes_normalization(self, gamma):
        # values 16-1=15 and 16-15=1, normalized
        v = cycle_to_rank_vector(pattern(spikes=[(0, 1), (1, 15)]), gamma)
        assert v[0] == pytest.approx(15 / 16)
        assert v[1] == pytest.approx(1 / 16)

    def test_empty_all_zero(self, gamma):
        v = cycle_to_rank_vector(pattern(), gamma)
        assert np.all(v == 0)

    def test_clean_roundtrip_matches_levels(self, naive_net, odor, gamma):
        resp = naive_net.run_sniff(odor, "test")
        v = cycle_to_rank_vector(resp.cycles[0], gamma)
        # rank values recover the sparsified levels up to normalization
        expect = odor / odor.sum()
        assert np.allclose(v, expect)


class TestManhattan:
    def test_exact_match(self):
        train = [("a", np.array([0.5, 0.5])), ("b", np.array([1.0, 0.0]))]
        assert manhattan_classify(np.array([0.5, 0.5]), train) == "a"

    def test_far_vector_unknown(self):
        train = [("b", np.array([0.0, 1.0]))]
        # d = 2 -> s = 1/3 < 0.75
        assert manhattan_classify(np.array([1.0, 0.0]), train) is None

    def test_two_above_threshold_nearest_wins(self):
        train = [("far", np.array([0.55, 0.45])), ("near", np.array([0.51, 0.49]))]
        test = np.array([0.5, 0.5])
        # brute force: similarities 1/1.1 and 1/1.02, both > 0.75
        sims = [manhattan_similarity(test, v) for _, v in train]
        assert all(s > 0.75 for s in sims)
        assert manhattan_classify(test, train) == "near"

    def test_similarity_range(self, rng):
        for _ in range(50):
            a, b = rng.random(5), rng.random(5)
            s = manhattan_similarity(a, b)
            assert 0.0 < s <= 1.0
            assert (s == 1.0) == np.allclose(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            manhattan_similarity(np.zeros(3), np.zeros(4))
