"""Metric tests against brute-force pair-counting and entropy oracles."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subsplit.errors import InvalidData
from subsplit.metrics import ari, nmi


def ari_bruteforce(a, b):
    """Pair-by-pair adjusted Rand index, enumerated over all point pairs."""
    n = len(a)
    ss = sd = ds = dd = 0
    for i, j in itertools.combinations(range(n), 2):
        same_a = a[i] == a[j]
        same_b = b[i] == b[j]
        if same_a and same_b:
            ss += 1
        elif same_a:
            sd += 1
        elif same_b:
            ds += 1
        else:
            dd += 1
    total = ss + sd + ds + dd
    expected = (ss + sd) * (ss + ds) / total
    max_index = 0.5 * ((ss + sd) + (ss + ds))
    if max_index == expected:
        return 1.0
    return (ss - expected) / (max_index - expected)


def nmi_bruteforce(a, b):
    """NMI from explicitly tabulated joint frequencies."""
    n = len(a)
    pa = {v: sum(1 for x in a if x == v) / n for v in set(a)}
    pb = {v: sum(1 for x in b if x == v) / n for v in set(b)}
    h_a = -sum(p * math.log(p) for p in pa.values())
    h_b = -sum(p * math.log(p) for p in pb.values())
    if h_a + h_b == 0:
        return 1.0
    info = 0.0
    for va in pa:
        for vb in pb:
            pab = sum(1 for x, y in zip(a, b) if x == va and y == vb) / n
            if pab > 0:
                info += pab * math.log(pab / (pa[va] * pb[vb]))
    return max(info, 0.0) / (0.5 * (h_a + h_b))


class TestNmi:
    def test_identical(self):
        assert nmi([0, 1, 2, 1], [0, 1, 2, 1]) == 1.0

    def test_label_switch_invariant(self):
        assert nmi([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0

    def test_independent_partitions(self):
        assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(0.0, abs=1e-12)

    def test_both_constant(self):
        assert nmi([3, 3, 3], [7, 7, 7]) == 1.0

    def test_one_constant(self):
        assert nmi([0, 0, 0], [0, 1, 2]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(InvalidData):
            nmi([0, 1], [0, 1, 2])

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 13))
        a = rng.integers(0, 4, n).tolist()
        b = rng.integers(0, 4, n).tolist()
        assert nmi(a, b) == pytest.approx(nmi_bruteforce(a, b), abs=1e-12)

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=20, deadline=None)
    def test_permuting_label_names(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 3, 20)
        b = rng.integers(0, 3, 20)
        relabel = rng.permutation(3)
        assert nmi(relabel[a], b) == pytest.approx(nmi(a, b), abs=1e-12)


class TestAri:
    def test_identical(self):
        assert ari([0, 1, 1, 2], [0, 1, 1, 2]) == 1.0

    def test_spec_case(self):
        assert ari([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5)

    def test_label_permutation_invariant(self):
        a = [0, 0, 1, 1, 2]
        b = [1, 1, 2, 2, 0]
        assert ari(a, b) == ari(b, a) == 1.0

    def test_too_short(self):
        with pytest.raises(InvalidData):
            ari([0], [0])

    @given(st.integers(0, 2**31 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 13))
        a = rng.integers(0, 4, n).tolist()
        b = rng.integers(0, 4, n).tolist()
        assert ari(a, b) == pytest.approx(ari_bruteforce(a, b), abs=1e-12)
