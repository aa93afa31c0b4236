"""
Tests the degree-sequence property tester and its property registry
"""
import itertools
import math

import numpy as np
import numpy.testing as npt
import pytest

from degseqtest.degreeseq import (
    DegreeStatistic,
    delta_approximates,
    expand_statistic,
    multiset_l1,
    statistic_buckets,
)
from degseqtest.estimator import derive_params, whole_graph_statistic
from degseqtest.graphcore import (
    circulant_graph,
    complete_graph,
    cycle_graph,
    degree_sequence,
    empty_graph,
    path_graph,
    random_graph,
)
from degseqtest.harness import family_graph
from degseqtest.oracle import AdjacencyOracle
from degseqtest.tester import (
    DegreeSequenceProperty,
    ProximityConfig,
    any_regular,
    distance_to_property,
    explicit_list,
    explicit_list_near_decision,
    fixed_regular,
    max_degree,
    max_degree_distance,
    property_from_spec,
    query_degrees,
    regular_near_decision,
    regular_witness,
    run_tester,
)


def brute_force_regular_distance(sequence) -> float:
    """Smallest normalised l1 distance to a graphic constant sequence"""
    sequence = np.asarray(sequence)
    n = sequence.size
    return min(
        np.abs(sequence - r).sum() / n**2 for r in range(n) if (r * n) % 2 == 0
    )


def test_fallback_path_queries_whole_graph():
    """
    Check that small graphs are queried in full and decided exactly.
    """
    cfg = ProximityConfig(epsilon=0.1, seed=42)
    verdict = run_tester(AdjacencyOracle(cycle_graph(5)), fixed_regular(r=2), cfg)
    assert verdict.accept
    assert verdict.path == "fallback"
    assert verdict.queries == 10
    assert verdict.to_dict()["verdict"] == "accept"

    verdict = run_tester(AdjacencyOracle(path_graph(5)), fixed_regular(r=2), cfg)
    assert not verdict.accept
    assert verdict.queries == 10


def test_query_degrees():
    oracle = AdjacencyOracle(path_graph(6))
    npt.assert_equal(actual=query_degrees(oracle), desired=[1, 2, 2, 2, 2, 1])
    assert oracle.query_count() == 15


def test_regular_witness_half_half_statistic():
    """
    Check that alpha = (1/2, 1/2) with n = 100 is 1/4 away from every regular
    sequence.
    """
    statistic = DegreeStatistic(alpha=(0.5, 0.5))
    distance, r = regular_witness([25, 75], [50, 50], n=100)
    assert distance == 0.25
    assert 25 <= r <= 75
    assert regular_near_decision(0.25, 100, statistic)
    assert not regular_near_decision(0.2, 100, statistic)


@pytest.mark.parametrize("seed", range(30))
def test_regular_witness_matches_scan(seed):
    """
    Check the weighted-median witness against a scan over every graphic r,
    for odd and even n.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    sequence = rng.integers(0, n, size=n)
    values, counts = np.unique(sequence, return_counts=True)
    distance, r = regular_witness(values, counts, n)
    assert (r * n) % 2 == 0
    assert distance == pytest.approx(brute_force_regular_distance(sequence))
    assert distance_to_property(any_regular(), sequence) == pytest.approx(distance)


def test_regular_near_decision_contract():
    """
    Check on 500 random statistics that the regular near decision says Yes
    exactly when d(n, alpha) is within delta of a graphic regular sequence.
    """
    rng = np.random.default_rng(seed=500)
    for _ in range(500):
        n = int(rng.integers(2, 60))
        k = int(rng.integers(1, 6))
        counts = rng.integers(0, 5, size=k)
        counts[-1] += 1
        statistic = DegreeStatistic.from_counts(counts)
        delta = float(rng.uniform(0.0, 0.5))
        expected = brute_force_regular_distance(expand_statistic(n, statistic)) <= delta
        assert regular_near_decision(delta, n, statistic) == expected
        assert any_regular().decide(delta, n, statistic) == expected



def test_regular_witness_empty():
    with pytest.raises(ValueError):
        regular_witness([3], [0], n=5)


def test_fixed_regular():
    """
    Check constant and fractional target degrees, and unrealizable targets.
    """
    prop = fixed_regular(r=2)
    assert prop.exact_membership([2, 2, 2, 2, 2])
    assert not prop.exact_membership([2, 2, 2, 1, 1])

    odd = fixed_regular(r=3)
    assert math.isinf(distance_to_property(odd, [3, 3, 3, 3, 2]))
    assert not odd.decide(0.5, 5, DegreeStatistic(alpha=(1,)))

    prop = fixed_regular(fraction=1.0)
    assert prop.exact_membership([3, 3, 3, 3])
    assert distance_to_property(prop, [0, 0, 0, 0]) == 12 / 16

    for kwargs in ({}, {"r": 1, "fraction": 0.5}, {"r": -1}, {"fraction": 2.0}):
        with pytest.raises(ValueError):
            fixed_regular(**kwargs)


def test_max_degree():
    """
    Check the maximum degree bound floor(fraction * (n - 1)) and the distance
    to the closest graphic sequence under it.
    """
    prop = max_degree(0.5)
    assert prop.exact_membership([2, 2, 2, 2, 2])
    assert not prop.exact_membership([3, 1, 1, 1, 0])
    assert max_degree_distance([4, 4, 4, 4, 4], bound=0) == 20 / 25
    assert max_degree_distance([4, 4, 4, 4, 4], bound=2) == 10 / 25
    assert distance_to_property(prop, [2, 2, 2, 2, 2]) == 0.0
    with pytest.raises(ValueError):
        max_degree(1.5)


def test_explicit_list():
    """
    Check the listed-members property: membership up to permutation,
    distance by multiset l1, and No when no member has length n.
    """
    prop = explicit_list([[2, 2, 2, 2], [1, 1, 0, 0]])
    assert prop.exact_membership([0, 1, 0, 1])
    assert not prop.exact_membership([1, 1, 1, 1])
    assert distance_to_property(prop, [1, 1, 1, 1]) == 2 / 16
    assert math.isinf(distance_to_property(prop, [0, 0, 0]))
    assert not prop.decide(1.0, 3, DegreeStatistic(alpha=(1,)))
    with pytest.raises(ValueError):
        explicit_list([[1, 1, 1]])


def test_explicit_list_far_statistic():
    """
    Check that the all-zero sequence is far from a top-bucket statistic.
    """
    statistic = DegreeStatistic(alpha=(0, 1))
    assert not explicit_list_near_decision([[0] * 20], 0.1, 20, statistic)
    assert explicit_list_near_decision([[2] * 20], 0.2, 20, DegreeStatistic(alpha=(1, 0)))


def test_explicit_list_near_decision_contract():
    """
    Check that the explicit-list near decision compares d(n, alpha) with the
    closest listed member.
    """
    rng = np.random.default_rng(seed=12)
    n = 12
    members = [[2] * n, [0] * n, [1] * n]
    for _ in range(20):
        statistic = DegreeStatistic.from_counts(rng.integers(0, 4, size=3) + (1, 0, 0))
        delta = float(rng.uniform(0.0, 0.6))
        expanded = expand_statistic(n, statistic)
        expected = min(multiset_l1(expanded, m) for m in members) <= delta
        assert explicit_list_near_decision(members, delta, n, statistic) == expected


def test_explicit_list_near_decision_brute_force():
    """
    Check the explicit-list near decision on 500 random cases with 3 to 6
    vertices against the smallest l1 distance over every permutation of
    every listed member.
    """
    rng = np.random.default_rng(seed=6)
    for _ in range(500):
        n = int(rng.integers(3, 7))
        members = [
            degree_sequence(random_graph(n, float(rng.uniform(0.0, 1.0)), seed=rng))
            for _ in range(int(rng.integers(1, 4)))
        ]
        k = int(rng.integers(1, 5))
        counts = rng.integers(0, 4, size=k)
        counts[0] += 1
        statistic = DegreeStatistic.from_counts(counts)
        delta = float(rng.uniform(0.0, 0.6))
        expanded = expand_statistic(n, statistic)
        best = min(
            np.abs(expanded - np.asarray(permuted)).sum()
            for member in members
            for permuted in itertools.permutations(member.tolist())
        )
        expected = best / n**2 <= delta
        assert explicit_list_near_decision(members, delta, n, statistic) == expected


@pytest.mark.parametrize("delta", [0.5, 0.34, 0.25])
def test_accepted_statistic_is_within_three_delta(delta):
    """
    Check the step from an accepted statistic back to the graph: when the
    statistic delta-approximates the graph and a regular sequence d* is
    within delta of it, the graph's degrees are within 3 delta of d*.
    """
    k = derive_params(delta).k
    graphs = [circulant_graph(n, range(1, n // c + 1)) for n in (60, 90, 120) for c in (3, 4, 8)]
    graphs += [family_graph("near-regular", n, seed=n) for n in (60, 90, 120)]
    graphs += [random_graph(n, 0.5, seed=n) for n in (60, 90, 120)]
    accepted = 0
    for graph in graphs:
        n = graph.n
        statistic = whole_graph_statistic(graph, k)
        if not delta_approximates(statistic, graph, delta):
            continue
        if not regular_near_decision(delta, n, statistic):
            continue
        _, r = regular_witness(*statistic_buckets(n, statistic), n)
        assert multiset_l1(degree_sequence(graph), [r] * n) <= 3 * delta
        accepted += 1
    assert accepted >= 9



@pytest.mark.parametrize(
    "spec,name",
    [
        ({"type": "any_regular"}, "any_regular"),
        ({"type": "fixed_regular", "r": 4}, "fixed_regular(r=4)"),
        ({"type": "fixed_regular", "fraction": 0.5}, "fixed_regular(fraction=0.5)"),
        ({"type": "max_degree", "fraction": 0.25}, "max_degree(fraction=0.25)"),
        ({"type": "explicit", "sequences": [[1, 1], [0, 0]]}, "explicit(2 sequences)"),
    ],
)
def test_property_from_spec(spec, name):
    assert property_from_spec(spec).name == name


def test_property_from_spec_errors():
    """
    Check that unknown property types are not implemented and malformed
    descriptions raise ValueError.
    """
    with pytest.raises(NotImplementedError):
        property_from_spec({"type": "bipartite"})
    for spec in ([1, 2], {"r": 2}, {"type": "fixed_regular"}, {"type": "max_degree"}):
        with pytest.raises(ValueError):
            property_from_spec(spec)


def test_property_without_near_decision():
    prop = DegreeSequenceProperty(name="anything", predicate=lambda canon: True)
    assert prop.exact_membership([1, 1])
    with pytest.raises(NotImplementedError):
        prop.decide(0.5, 2, DegreeStatistic(alpha=(1,)))
    with pytest.raises(NotImplementedError):
        distance_to_property(prop, [1, 1])


def test_proximity_config():
    """
    Check delta = (1/3)(epsilon / c)^2, the override and invalid settings.
    """
    assert ProximityConfig(epsilon=1.0).delta == pytest.approx(0.01 / 3)
    assert ProximityConfig(epsilon=0.5, c_const=1.0).delta == pytest.approx(0.25 / 3)
    assert ProximityConfig(epsilon=0.5, delta_override=0.2).delta == 0.2
    for kwargs in (
        {"epsilon": 0.0},
        {"epsilon": 1.5},
        {"epsilon": 0.5, "c_const": 0.0},
        {"epsilon": 0.5, "repeat": 0},
        {"epsilon": 0.5, "delta_override": 1.5},
    ):
        with pytest.raises(ValueError):
            ProximityConfig(**kwargs)


def test_sampling_path_complete_graph():
    """
    Check that the sampling path accepts a complete graph for the
    (n-1)-regular property and rejects it for the 0-regular one, using
    s * t queries per estimate.
    """
    graph = complete_graph(300)
    cfg = ProximityConfig(epsilon=1.0, seed=42, delta_override=0.5)

    oracle = AdjacencyOracle(graph)
    verdict = run_tester(oracle, fixed_regular(fraction=1.0), cfg)
    assert verdict.accept
    assert verdict.path == "sampling"
    assert verdict.queries == 917 * 2486 == oracle.query_count()
    assert verdict.statistic.k == 2

    verdict = run_tester(AdjacencyOracle(graph), fixed_regular(r=0), cfg)
    assert not verdict.accept


def test_sampling_path_majority_vote():
    """
    Check that repeated estimates vote and are all counted.
    """
    cfg = ProximityConfig(epsilon=1.0, seed=[1, 2], delta_override=0.5, repeat=3)
    verdict = run_tester(AdjacencyOracle(empty_graph(300)), any_regular(), cfg)
    assert verdict.accept
    assert verdict.votes == (True, True, True)
    assert verdict.queries == 3 * 917 * 2486


def test_sampling_path_query_budget():
    cfg = ProximityConfig(epsilon=1.0, delta_override=0.5, max_queries=1000)
    with pytest.raises(ValueError):
        run_tester(AdjacencyOracle(empty_graph(300)), any_regular(), cfg)
