import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score, normalized_mutual_info_score

from commeval.detect import DetectionRun, get_detector
from commeval.graph import Partition
from commeval.similarity import (
    SIMILARITY_METRICS,
    adjusted_rand,
    contingency,
    nmi,
    pairwise_matrix,
    rand_index,
    similarity,
    split_join,
    variation_of_information,
)

from . import oracles

P1 = Partition(list("aabb"))  # {ab|cd}
P2 = Partition(list("aaab"))  # {abc|d}


def test_fixture_pair():
    assert contingency(P1, P2).counts.tolist() == [[2, 0], [1, 1]]
    assert rand_index(P1, P2).value == pytest.approx(0.5)
    assert adjusted_rand(P1, P2).value == pytest.approx(0.0, abs=1e-12)
    # 2 I / (H1 + H2) with I = 0.215762, H1 = ln 2, H2 = 0.562335
    assert nmi(P1, P2).value == pytest.approx(0.3437110185, abs=1e-9)
    assert nmi(P1, P2).value == pytest.approx(oracles.nmi(list("aabb"), list("aaab")), abs=1e-12)
    assert variation_of_information(P1, P2).value == pytest.approx(0.823959, abs=1e-6)
    assert split_join(P1, P2).value == 2


def test_one_vs_singletons():
    one, single = Partition.whole(4), Partition.singletons(4)
    assert rand_index(one, single).value == 0.0
    assert nmi(one, single).value == 0.0
    assert variation_of_information(one, single).value == pytest.approx(math.log(4))
    assert split_join(one, single).value == 3
    assert contingency(P1, single).cols.tolist() == [1, 1, 1, 1]


def test_identity_and_degenerate_flags():
    p = Partition([0, 0, 1, 1, 2])
    for m in SIMILARITY_METRICS:
        s = similarity(p, p, m)
        assert s.similarity == 1.0
    one = Partition.whole(5)
    s = nmi(one, one)
    assert s.value == 1.0 and s.flagged
    s = adjusted_rand(one, one)
    assert s.value == 1.0 and s.flagged
    assert adjusted_rand(one, Partition.singletons(5)).value == 0.0


def test_rand_index_needs_two_nodes():
    with pytest.raises(ValueError):
        rand_index(Partition([0]), Partition([0]))


def test_unknown_metric():
    with pytest.raises(ValueError, match="unknown similarity"):
        similarity(P1, P2, "XYZ")


def test_against_sklearn_and_oracles():
    rng = random.Random(5)
    for _ in range(60):
        n = rng.randint(2, 30)
        x = [rng.randrange(rng.randint(1, 6)) for _ in range(n)]
        y = [rng.randrange(rng.randint(1, 6)) for _ in range(n)]
        a, b = Partition(x), Partition(y)
        assert rand_index(a, b).value == pytest.approx(oracles.rand_index(x, y), abs=1e-12)
        if len(set(x)) > 1 or len(set(y)) > 1:
            assert adjusted_rand(a, b).value == pytest.approx(adjusted_rand_score(x, y), abs=1e-10)
            assert nmi(a, b).value == pytest.approx(normalized_mutual_info_score(x, y), abs=1e-10)
        assert nmi(a, b).value == pytest.approx(oracles.nmi(x, y), abs=1e-10)
        assert variation_of_information(a, b).value == pytest.approx(oracles.vi(x, y), abs=1e-10)
        assert split_join(a, b).value == oracles.split_join(x, y)


def test_normalized_values_in_unit_interval():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(2, 25)
        a = Partition([rng.randrange(5) for _ in range(n)])
        b = Partition([rng.randrange(5) for _ in range(n)])
        for m in SIMILARITY_METRICS:
            v = similarity(a, b, m).normalized_value
            assert -1e-12 <= v <= 1 + 1e-12


def test_ari_near_zero_for_independent_partitions():
    rng = np.random.default_rng(1)
    vals = [
        adjusted_rand(Partition(rng.integers(0, 4, 200).tolist()), Partition(rng.integers(0, 4, 200).tolist())).value
        for _ in range(100)
    ]
    assert abs(float(np.mean(vals))) < 0.05


labels = st.lists(st.integers(0, 4), min_size=2, max_size=20)


@settings(max_examples=150, deadline=None)
@given(labels, st.randoms(use_true_random=False))
def test_symmetry_and_relabel_invariance(x, rnd):
    y = [rnd.randrange(4) for _ in x]
    a, b = Partition(x), Partition(y)
    perm = list(range(5))
    rnd.shuffle(perm)
    a2 = Partition([perm[v] for v in x])
    for m in SIMILARITY_METRICS:
        assert similarity(a, b, m).value == similarity(b, a, m).value
        assert similarity(a2, b, m).value == similarity(a, b, m).value


def _runs(name, parts):
    d = get_detector(name)
    return [DetectionRun(d, i, p, 0.0, rep=i) for i, p in enumerate(parts)]


def test_pairwise_matrix_block_structure():
    p = Partition([0, 0, 1, 1])
    runs = _runs("LM", [p]) + _runs("GM", [p]) + _runs("LE", [Partition.singletons(4)])
    pm = pairwise_matrix(runs, "RI")
    assert pm.detectors == ("LM", "GM", "LE")
    assert pm.values[0, 1] == 1.0 and np.all(np.diag(pm.values) == 1.0)
    assert pm.values[0, 2] == pytest.approx(rand_index(p, Partition.singletons(4)).value)
    vi = pairwise_matrix(runs, "VI")
    assert np.all(np.diag(vi.values) == 0.0)
    assert np.all(np.diag(vi.similarities()) == 1.0)


def test_pairwise_matrix_wraps_and_all_pairs():
    a, b = Partition([0, 0, 1, 1]), Partition([0, 1, 1, 1])
    runs = _runs("LM", [a]) + _runs("LP", [a, b])
    aligned = pairwise_matrix(runs, "RI")
    assert aligned.values[0, 1] == pytest.approx((1.0 + rand_index(a, b).value) / 2)
    allp = pairwise_matrix(runs, "RI", all_pairs=True)
    assert allp.values[0, 1] == pytest.approx(aligned.values[0, 1])
    assert aligned.cv[0, 1] > 0
