"""
Graphic degree sequences and degree statistics: Erdos-Gallai realizability,
Havel-Hakimi realization, normalised l1 distances between sequences, and the
bucketed degree statistic d(n, alpha) used to summarise a graph.
"""
import dataclasses
import fractions
import json
import numbers
import typing

import numpy as np

from degseqtest.graphcore import Graph


@dataclasses.dataclass(frozen=True)
class DegreeStatistic:
    """
    A degree statistic alpha = (alpha_1, ..., alpha_k): the share of vertices
    whose normalised degree falls into each of k equal-width buckets.
    Shares are kept as exact fractions when built from counts.
    """

    alpha: tuple  # bucket shares, each in [0, 1], summing to 1

    def __post_init__(self):
        alpha = tuple(self.alpha)
        if not alpha:
            raise ValueError("a degree statistic needs at least one bucket")
        if any(not 0 <= a <= 1 for a in alpha):
            raise ValueError(f"bucket shares must lie in [0, 1], got {alpha}")
        total = sum(alpha)
        exact = all(isinstance(a, numbers.Rational) for a in alpha)
        if (exact and total != 1) or abs(total - 1) > 1e-9:
            raise ValueError(f"bucket shares must sum to 1, got {float(total)}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def k(self) -> int:
        return len(self.alpha)

    @classmethod
    def from_counts(cls, counts) -> "DegreeStatistic":
        """Statistic with exact shares counts[l] / sum(counts)"""
        counts = [int(c) for c in counts]
        total = sum(counts)
        if total <= 0:
            raise ValueError("bucket counts must have a positive total")
        return cls(alpha=tuple(fractions.Fraction(c, total) for c in counts))

    def to_dict(self) -> dict:
        return {"k": self.k, "alpha": [float(a) for a in self.alpha]}

    @classmethod
    def from_dict(cls, data: dict) -> "DegreeStatistic":
        alpha = tuple(float(a) for a in data["alpha"])
        if "k" in data and int(data["k"]) != len(alpha):
            raise ValueError(f"k={data['k']} does not match {len(alpha)} shares")
        return cls(alpha=alpha)


def canonical(sequence) -> np.ndarray:
    """Canonical form of a degree sequence: sorted non-decreasing"""
    return np.sort(np.asarray(sequence, dtype=np.int64))


def is_graphic(sequence) -> bool:
    """
    Erdos-Gallai test: with d sorted non-increasingly, d is the degree
    sequence of a simple graph iff its sum is even and for every k,
    d_1 + ... + d_k <= k(k-1) + sum_{i>k} min(d_i, k).
    Entries outside 0..n-1 make the sequence non-graphic.
    """
    d = np.asarray(sequence, dtype=np.int64)
    n = d.size
    if n == 0:
        return True
    if d.min() < 0 or d.max() >= n or d.sum() % 2:
        return False

    ascending = np.sort(d)
    descending = ascending[::-1]
    prefix = np.concatenate([[0], np.cumsum(descending)])
    k = np.arange(1, n + 1)
    # entries with d_i >= k occupy a prefix of the non-increasing order
    at_least_k = n - np.searchsorted(ascending, k, side="left")
    split = np.maximum(at_least_k, k)
    rhs = k * (k - 1) + k * (split - k) + (prefix[-1] - prefix[split])
    return bool(np.all(prefix[1:] <= rhs))


def realize(sequence, prefer: typing.Optional[Graph] = None) -> Graph:
    """
    Havel-Hakimi realization: repeatedly take the vertex with the largest
    residual degree (lowest index on ties) and join it to the vertices with
    the next largest residual degrees. Vertex i receives degree d_i.

    With `prefer`, ties in residual degree are broken towards neighbours of
    the current vertex in `prefer` before falling back to index order. That is
    still a valid Havel-Hakimi run, so realizability is unaffected.

    Raises ValueError if the sequence is not graphic.
    """
    residual = np.array(sequence, dtype=np.int64)
    n = residual.size
    if n and (residual.min() < 0 or residual.max() >= n or residual.sum() % 2):
        raise ValueError(f"{list(sequence)} is not graphic")
    if prefer is not None and prefer.n != n:
        raise ValueError(f"preferred graph has {prefer.n} vertices, expected {n}")

    adjacency = np.zeros(shape=(n, n), dtype=bool)
    index = np.arange(n)
    for _ in range(n):
        order = np.lexsort((index, -residual))
        v = order[0]
        need = residual[v]
        if need == 0:
            break
        rest = order[1:]
        if prefer is not None:
            rest = rest[np.lexsort((rest, ~prefer.adjacency[v, rest], -residual[rest]))]
        targets = rest[:need]
        if targets.size < need or residual[targets].min() <= 0:
            raise ValueError(f"{list(sequence)} is not graphic")
        adjacency[v, targets] = adjacency[targets, v] = True
        residual[targets] -= 1
        residual[v] = 0
    return Graph(adjacency=adjacency)


def max_dominated_edges(capacities) -> int:
    """
    Largest number of edges of a simple graph on len(capacities) vertices in
    which vertex i has degree at most capacities[i].

    Computed as the minimum over b = 0..n of
    c(S) + b(b-1)/2 + floor((c(R) + |R| b) / 2), where T holds the b largest
    capacities, R the other vertices with capacity > b, and S the rest. For
    b-matchings in a complete graph this min-max bound is tight; it reduces
    to the Erdos-Gallai inequalities when the capacities are themselves
    realizable.
    """
    c = np.clip(np.asarray(capacities, dtype=np.int64), 0, None)
    n = c.size
    if n == 0:
        return 0
    ascending = np.sort(c)
    descending = ascending[::-1]
    prefix = np.concatenate([[0], np.cumsum(descending)])
    b = np.arange(n + 1)
    above = n - np.searchsorted(ascending, b, side="right")  # entries > b
    size_r = np.maximum(above - b, 0)
    c_r = prefix[b + size_r] - prefix[b]
    c_s = prefix[-1] - prefix[b + size_r]
    values = c_s + b * (b - 1) // 2 + (c_r + size_r * b) // 2
    return int(values.min())


def l1_distance(x, y) -> float:
    """
    Normalised l1 distance (1/n^2) * sum_i |x_i - y_i|.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError(f"sequence lengths differ: {x.size} != {y.size}")
    n = x.size
    if n == 0:
        return 0.0
    return float(np.abs(x - y).sum()) / n**2


def multiset_l1(x, y) -> float:
    """
    Smallest normalised l1 distance between x and any permutation of y, which
    is attained by pairing both sequences in sorted order.
    """
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError(f"sequence lengths differ: {x.size} != {y.size}")
    return l1_distance(np.sort(x), np.sort(y))


def apportion(shares, total: int) -> np.ndarray:
    """
    Largest-remainder apportionment of `total` units over the given shares,
    remainder ties going to the lower index. Counts always sum to `total`.
    """
    shares = [fractions.Fraction(s) for s in shares]
    scale = sum(shares)
    quotas = [s * total / scale for s in shares]
    counts = [int(q) for q in quotas]  # floor, quotas are non-negative
    leftover = total - sum(counts)
    by_remainder = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in by_remainder[:leftover]:
        counts[i] += 1
    return np.asarray(counts, dtype=np.int64)


def bucket_values(n: int, k: int) -> np.ndarray:
    """
    Representative degree of each bucket, (2l - 1) n / 2k rounded half-up and
    clamped to 0..n-1.
    """
    ell = np.arange(1, k + 1, dtype=np.int64)
    return np.clip(((2 * ell - 1) * n + k) // (2 * k), 0, max(n - 1, 0))


def statistic_buckets(n: int, statistic: DegreeStatistic) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    The (values, counts) pairs that make up d(n, alpha): counts[l] coordinates
    equal to values[l].
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    return bucket_values(n, statistic.k), apportion(statistic.alpha, n)


def expand_statistic(n: int, statistic: DegreeStatistic) -> np.ndarray:
    """
    The n-term sequence d(n, alpha), sorted non-decreasing, with about
    alpha_l * n coordinates equal to the bucket value (2l - 1) n / 2k.
    """
    values, counts = statistic_buckets(n, statistic)
    return np.repeat(values, counts)


def delta_approximates(statistic: DegreeStatistic, graph: Graph, delta: float) -> bool:
    """
    Whether d(n, alpha) is within delta of the degree sequence of `graph` in
    multiset l1 distance.
    """
    degrees = graph.adjacency.sum(axis=1)
    return multiset_l1(degrees, expand_statistic(graph.n, statistic)) <= delta


def read_degree_sequence(path) -> np.ndarray:
    """Reads a degree sequence file, one integer per line"""
    with open(file=path, mode="r") as f:
        return np.asarray([int(line) for line in f if line.strip()], dtype=np.int64)


def write_degree_sequence(sequence, path) -> None:
    with open(file=path, mode="w") as f:
        f.writelines(f"{int(d)}\n" for d in sequence)


def read_statistic(path) -> DegreeStatistic:
    """Reads a DegreeStatistic from JSON {"k": <int>, "alpha": [<real>...]}"""
    with open(file=path, mode="r") as f:
        return DegreeStatistic.from_dict(json.load(f))


def write_statistic(statistic: DegreeStatistic, path) -> None:
    with open(file=path, mode="w") as f:
        json.dump(statistic.to_dict(), f)
