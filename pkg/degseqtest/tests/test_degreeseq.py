"""
Tests the graphic sequence, realization and degree statistic functions
"""
import fractions
import functools
import itertools

import networkx as nx
import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degseqtest.degreeseq import (
    DegreeStatistic,
    apportion,
    bucket_values,
    canonical,
    delta_approximates,
    expand_statistic,
    is_graphic,
    l1_distance,
    max_dominated_edges,
    multiset_l1,
    read_statistic,
    realize,
    statistic_buckets,
    write_statistic,
)
from degseqtest.graphcore import complete_graph, degree_sequence, empty_graph


@functools.lru_cache(maxsize=None)
def all_degree_sequences(n: int) -> frozenset:
    """
    Every degree sequence of a simple graph on n labelled vertices, found by
    enumerating all 2^(n choose 2) graphs.
    """
    pairs = list(itertools.combinations(range(n), 2))
    sequences = set()
    for mask in range(2 ** len(pairs)):
        degrees = [0] * n
        for bit, (u, v) in enumerate(pairs):
            if mask >> bit & 1:
                degrees[u] += 1
                degrees[v] += 1
        sequences.add(tuple(degrees))
    return frozenset(sequences)


@pytest.mark.parametrize(
    "sequence,expected",
    [
        ([], True),
        ([0], True),
        ([1, 1], True),
        ([1, 1, 1], False),
        ([2, 2, 2], True),
        ([3, 3, 1, 1], False),
        ([3, 3, 2, 1, 1], True),
        ([4, 4, 4, 1, 1], False),
        ([3, 0, 0, 1], False),
        ([-1, 1], False),
        ([2, 0], False),
    ],
)
def test_is_graphic_examples(sequence, expected):
    """
    Check the Erdos-Gallai test on small hand-checked sequences.
    """
    assert is_graphic(sequence) == expected


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_is_graphic_exhaustive(n):
    """
    Check that is_graphic accepts exactly the degree sequences of simple
    graphs, by enumerating every sequence with entries in 0..n-1.
    """
    graphic = all_degree_sequences(n)
    for sequence in itertools.product(range(n), repeat=n):
        assert is_graphic(sequence) == (sequence in graphic), sequence


@settings(max_examples=300, deadline=None)
@given(sequence=st.lists(st.integers(min_value=0, max_value=14), min_size=1, max_size=15))
def test_is_graphic_matches_networkx_and_havel_hakimi(sequence):
    """
    Check that the Erdos-Gallai test agrees with networkx, and that the
    Havel-Hakimi realization succeeds exactly when the sequence is graphic.
    """
    graphic = is_graphic(sequence)
    assert graphic == nx.is_graphical(sequence, method="eg")
    if graphic:
        npt.assert_equal(actual=degree_sequence(realize(sequence)), desired=sequence)
    else:
        with pytest.raises(ValueError):
            realize(sequence)


def test_realize_prefers_given_graph():
    """
    Check that tie-breaking towards a preferred graph still realizes the
    sequence, and reproduces the preferred graph when it already fits.
    """
    preferred = complete_graph(5)
    sequence = degree_sequence(preferred)
    assert realize(sequence, prefer=preferred) == preferred

    preferred = empty_graph(6)
    graph = realize([1, 1, 2, 2, 3, 3], prefer=preferred)
    npt.assert_equal(actual=degree_sequence(graph), desired=[1, 1, 2, 2, 3, 3])
    with pytest.raises(ValueError):
        realize([1, 1], prefer=empty_graph(3))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_max_dominated_edges_exhaustive(n):
    """
    Check the largest degree-bounded subgraph size against a brute force
    search over all graphs for every capacity vector.
    """
    pairs = np.asarray(list(itertools.combinations(range(n), 2)), dtype=int)
    masks = np.arange(2 ** len(pairs))
    chosen = (masks[:, None] >> np.arange(len(pairs))) & 1
    degrees = np.zeros(shape=(masks.size, n), dtype=int)
    for bit, (u, v) in enumerate(pairs):
        degrees[:, u] += chosen[:, bit]
        degrees[:, v] += chosen[:, bit]
    num_edges = chosen.sum(axis=1)

    for capacities in itertools.product(range(n), repeat=n):
        fits = np.all(degrees <= np.asarray(capacities), axis=1)
        assert max_dominated_edges(capacities) == num_edges[fits].max(), capacities


def test_max_dominated_edges_clips_and_empty():
    assert max_dominated_edges([]) == 0
    assert max_dominated_edges([-3, 5, 5]) == 1
    assert max_dominated_edges([9, 9, 9, 9]) == 6


def test_l1_distances():
    """
    Check the normalised l1 distance and its permutation-invariant version.
    """
    assert l1_distance([1, 2, 3, 4], [4, 3, 2, 1]) == 8 / 16
    assert multiset_l1([1, 2, 3, 4], [4, 3, 2, 1]) == 0.0
    assert multiset_l1([0, 0, 3], [1, 1, 1]) == 4 / 9
    assert l1_distance([], []) == 0.0
    with pytest.raises(ValueError):
        multiset_l1([1, 2], [1, 2, 3])
    npt.assert_equal(actual=canonical([3, 1, 2]), desired=[1, 2, 3])


def test_apportion_sums_to_total():
    """
    Check that largest-remainder apportionment gives leftovers to the lowest
    index on ties and always hands out every unit.
    """
    npt.assert_equal(actual=apportion([1 / 3, 1 / 3, 1 / 3], 10), desired=[4, 3, 3])
    npt.assert_equal(actual=apportion([0.5, 0.5], 7), desired=[4, 3])
    npt.assert_equal(actual=apportion([0.1, 0.0, 0.9], 10), desired=[1, 0, 9])
    rng = np.random.default_rng(seed=42)
    for _ in range(50):
        shares = rng.dirichlet(np.ones(7))
        total = int(rng.integers(1, 1000))
        assert apportion(shares, total).sum() == total


def test_bucket_values():
    """
    Check representative bucket degrees (2l - 1) n / 2k, clamped to n - 1.
    """
    npt.assert_equal(actual=bucket_values(100, 2), desired=[25, 75])
    npt.assert_equal(actual=bucket_values(10, 5), desired=[1, 3, 5, 7, 9])
    npt.assert_equal(actual=bucket_values(2, 1), desired=[1])
    npt.assert_equal(actual=bucket_values(1, 3), desired=[0, 0, 0])


def test_expand_statistic():
    """
    Check that d(n, alpha) repeats every bucket value by its apportioned count.
    """
    statistic = DegreeStatistic(alpha=(0.5, 0.5))
    npt.assert_equal(actual=expand_statistic(4, statistic), desired=[1, 1, 3, 3])
    values, counts = statistic_buckets(100, statistic)
    npt.assert_equal(actual=values, desired=[25, 75])
    npt.assert_equal(actual=counts, desired=[50, 50])
    with pytest.raises(ValueError):
        statistic_buckets(0, statistic)


def test_delta_approximates():
    """
    Check that the all-top-bucket statistic approximates a complete graph
    and not an empty one.
    """
    statistic = DegreeStatistic(alpha=(0, 0, 1))
    assert delta_approximates(statistic, complete_graph(30), delta=0.2)
    assert not delta_approximates(statistic, empty_graph(30), delta=0.2)


@pytest.mark.parametrize(
    "alpha", [(), (0.5, 0.6), (-0.1, 1.1), (fractions.Fraction(1, 3),) * 2]
)
def test_degree_statistic_invalid(alpha):
    """
    Check that empty, negative and non-normalised shares raise ValueError.
    """
    with pytest.raises(ValueError):
        DegreeStatistic(alpha=alpha)


def test_degree_statistic_from_counts(tmp_path):
    """
    Check exact shares from bucket counts and the JSON statistic file format.
    """
    statistic = DegreeStatistic.from_counts([1, 2, 1])
    assert statistic.alpha == (
        fractions.Fraction(1, 4),
        fractions.Fraction(1, 2),
        fractions.Fraction(1, 4),
    )
    assert statistic.k == 3
    with pytest.raises(ValueError):
        DegreeStatistic.from_counts([0, 0])

    write_statistic(statistic, tmp_path / "alpha.json")
    loaded = read_statistic(tmp_path / "alpha.json")
    assert loaded.to_dict() == {"k": 3, "alpha": [0.25, 0.5, 0.25]}
    with pytest.raises(ValueError):
        DegreeStatistic.from_dict({"k": 2, "alpha": [1.0]})


@settings(max_examples=300, deadline=None)
@given(
    pair=st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.tuples(
            st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n),
            st.lists(st.integers(min_value=0, max_value=n - 1), min_size=n, max_size=n),
        )
    )
)
def test_multiset_l1_is_best_permutation(pair):
    """
    Check that pairing in sorted order gives the smallest l1 distance over
    every permutation of the second sequence.
    """
    x, y = pair
    n = len(x)
    best = min(
        sum(abs(a - b) for a, b in zip(x, permuted)) for permuted in itertools.permutations(y)
    )
    assert multiset_l1(x, y) == best / n**2
    assert multiset_l1(x, y) == multiset_l1(y, x)
