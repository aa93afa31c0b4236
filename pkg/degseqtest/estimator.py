"""
Sampling estimator of the bucketed degree statistic.

s anchor vertices are drawn uniformly, each anchor is queried against t further
uniform vertices, and the hit ratios are bucketed into k = ceil(1/delta) equal
intervals of [0, 1]. With probability at least 2/3 the resulting statistic
delta-approximates the degree sequence, using s * t queries whatever n is.
"""
import dataclasses
import logging
import math
import typing

import numpy as np

from degseqtest.degreeseq import DegreeStatistic
from degseqtest.graphcore import Graph
from degseqtest.oracle import GraphOracle

# upper bound on queries materialised at once
_QUERY_CHUNK: int = 2**22


@dataclasses.dataclass(frozen=True)
class EstimatorParams:
    """
    Sample sizes for a target accuracy delta:
    k = ceil(1/delta), gamma = 1/(2k(2k+1)),
    s = ceil(log2(12k) / (2 gamma^2)), t = ceil(log2(6s) / (2 gamma^2)).
    """

    delta: float
    k: int
    gamma: float
    s: int
    t: int

    @property
    def queries(self) -> int:
        """Adjacency queries consumed by one estimate"""
        return self.s * self.t


def derive_params(delta: float) -> EstimatorParams:
    """
    Computes k, gamma, s and t for 0 < delta <= 1; raises ValueError otherwise.
    """
    if not 0 < delta <= 1:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    k = math.ceil(round(1 / delta, 9))
    gamma = 1 / (2 * k * (2 * k + 1))
    scale = 2 * k**2 * (2 * k + 1) ** 2  # 1 / (2 gamma^2), exactly
    s = math.ceil(math.log2(12 * k) * scale)
    t = math.ceil(math.log2(6 * s) * scale)
    return EstimatorParams(delta=delta, k=k, gamma=gamma, s=s, t=t)


@dataclasses.dataclass(frozen=True)
class SampleRecords:
    """
    Per-anchor records of one estimator run: anchors[i] is the sampled vertex
    and hits[i] (0..t) the number of its t query targets that were neighbours.
    """

    anchors: np.ndarray
    hits: np.ndarray
    t: int

    def __len__(self) -> int:
        return self.anchors.size

    @property
    def ratios(self) -> np.ndarray:
        """Estimated normalised degrees hits / t"""
        return self.hits / self.t


def sample_degrees(
    oracle: GraphOracle, params: EstimatorParams, rng: np.random.Generator
) -> SampleRecords:
    """
    Draws s anchors and, per anchor, t query targets uniformly with replacement
    (the anchor itself may be drawn as a target), counting neighbour hits.
    """
    if oracle.n < 1:
        raise ValueError("cannot sample from a graph without vertices")
    if params.queries > oracle.n**2:
        logging.warning(
            f"estimator budget s*t={params.queries} exceeds n^2={oracle.n ** 2}, "
            "querying the whole graph would be cheaper"
        )
    anchors = oracle.sample_vertices(rng, size=params.s)
    hits = np.empty(params.s, dtype=np.int64)
    chunk = max(1, _QUERY_CHUNK // params.t)
    for start in range(0, params.s, chunk):
        block = anchors[start : start + chunk]
        targets = oracle.sample_vertices(rng, size=(block.size, params.t))
        hits[start : start + chunk] = oracle.adjacent_many(block[:, np.newaxis], targets).sum(axis=1)
    return SampleRecords(anchors=anchors, hits=hits, t=params.t)


def bucket_counts(hits: np.ndarray, t: int, k: int) -> np.ndarray:
    """
    Counts of hit ratios per bucket: bucket 1 holds ratios <= 1/k, bucket l
    holds (l-1)/k < ratio <= l/k, i.e. l = max(1, ceil(hits * k / t)).
    """
    hits = np.asarray(hits, dtype=np.int64)
    ell = np.maximum(1, (hits * k + t - 1) // t)
    return np.bincount(ell - 1, minlength=k)


def estimate_statistic(
    oracle: GraphOracle, delta: float, rng: np.random.Generator
) -> typing.Tuple[DegreeStatistic, int]:
    """
    Estimates a degree statistic that delta-approximates the oracle's graph
    with probability at least 2/3. Returns the statistic and the number of
    adjacency queries it used, which is always s * t.
    """
    params = derive_params(delta)
    before = oracle.query_count()
    records = sample_degrees(oracle, params, rng)
    statistic = DegreeStatistic.from_counts(bucket_counts(records.hits, params.t, params.k))
    queries = oracle.query_count() - before
    logging.debug(f"estimate: k={params.k} s={params.s} t={params.t} alpha={statistic.to_dict()['alpha']}")
    return statistic, queries


def whole_graph_statistic(graph: Graph, k: int) -> DegreeStatistic:
    """
    Exact bucket shares of the true normalised degrees d(v) / n under the same
    boundary rule as the estimator.
    """
    if graph.n < 1:
        raise ValueError("a statistic needs at least one vertex")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    degrees = graph.adjacency.sum(axis=1).astype(np.int64)
    return DegreeStatistic.from_counts(bucket_counts(degrees, graph.n, k))


def anchor_deviations(records: SampleRecords, graph: Graph) -> np.ndarray:
    """|hits / t - d(v) / n| for every anchor v of a run on `graph`"""
    degrees = graph.adjacency.sum(axis=1)
    return np.abs(records.ratios - degrees[records.anchors] / graph.n)
