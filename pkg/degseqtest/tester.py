"""
Property tester for degree-sequence properties of dense graphs.

A property is a permutation-closed set D of graphic sequences. The tester
turns the proximity parameter epsilon into an accuracy delta = (1/3)(eps/c)^2,
estimates a degree statistic with a number of queries depending on delta only,
and asks the property's near decision whether d(n, alpha) lies within delta
of D. Graphs with n < delta^-2 are simply queried in full.
"""
import dataclasses
import logging
import math
import typing

import numpy as np

from degseqtest.degreeseq import (
    DegreeStatistic,
    canonical,
    expand_statistic,
    is_graphic,
    max_dominated_edges,
    multiset_l1,
    statistic_buckets,
)
from degseqtest.estimator import derive_params, estimate_statistic
from degseqtest.oracle import GraphOracle
from degseqtest.repair import DEFAULT_C_CONST

NearDecision = typing.Callable[[float, int, DegreeStatistic], bool]


@dataclasses.dataclass(frozen=True)
class DegreeSequenceProperty:
    """
    A degree-sequence property: a membership predicate on canonical (sorted)
    sequences, an optional near decision answering Yes when d(n, alpha) is
    within delta of some n-term member and No when every member is more than
    2 delta away, and an optional exact distance from a sequence to the
    closest n-term member.
    """

    name: str
    predicate: typing.Callable[[np.ndarray], bool]
    near_decision: typing.Optional[NearDecision] = None
    distance: typing.Optional[typing.Callable[[np.ndarray], float]] = None

    def exact_membership(self, sequence) -> bool:
        """Predicate and graphicness of the canonical form of `sequence`"""
        canon = canonical(sequence)
        return bool(self.predicate(canon)) and is_graphic(canon)

    def decide(self, delta: float, n: int, statistic: DegreeStatistic) -> bool:
        if self.near_decision is None:
            raise NotImplementedError(f"property {self.name!r} has no near decision for n={n}")
        return bool(self.near_decision(delta, n, statistic))


def _regular_cost(values: np.ndarray, counts: np.ndarray, r: int) -> int:
    return int((counts * np.abs(values - r)).sum())


def regular_witness(values, counts, n: int) -> typing.Tuple[float, int]:
    """
    Closest graphic constant sequence (r, ..., r) to the multiset holding
    counts[i] copies of values[i]: returns the normalised l1 distance and r.
    The cost is convex in r and minimised on the weighted-median interval, so
    the best r with r * n even is at most one step outside that interval.
    """
    values = np.asarray(values, dtype=np.int64)
    counts = np.asarray(counts, dtype=np.int64)
    keep = counts > 0
    values, counts = values[keep], counts[keep]
    order = np.argsort(values, kind="stable")
    values, counts = values[order], counts[order]
    total = counts.sum()
    if total == 0:
        raise ValueError("cannot fit a regular sequence to an empty multiset")

    cumulative = np.cumsum(counts)
    low = values[np.searchsorted(cumulative, (total + 1) // 2)]
    high = values[np.searchsorted(cumulative, total // 2 + 1)]
    candidates = {0, n - 1, low - 1, low, low + 1, high - 1, high, high + 1}
    feasible = sorted(r for r in candidates if 0 <= r <= n - 1 and (r * n) % 2 == 0)
    costs = [_regular_cost(values, counts, r) for r in feasible]
    best = int(np.argmin(costs))
    return costs[best] / n**2, int(feasible[best])


def regular_near_decision(delta: float, n: int, statistic: DegreeStatistic) -> bool:
    """
    Yes iff some graphic r-regular n-term sequence is within delta of
    d(n, alpha) in multiset l1 distance.
    """
    values, counts = statistic_buckets(n, statistic)
    distance, _ = regular_witness(values, counts, n)
    return distance <= delta


def _regular_distance(sequence: np.ndarray) -> float:
    if sequence.size == 0:
        return 0.0
    values, counts = np.unique(sequence, return_counts=True)
    distance, _ = regular_witness(values, counts, sequence.size)
    return distance


def any_regular() -> DegreeSequenceProperty:
    """The graph is r-regular for some r"""
    return DegreeSequenceProperty(
        name="any_regular",
        predicate=lambda canon: canon.size == 0 or canon[0] == canon[-1],
        near_decision=regular_near_decision,
        distance=_regular_distance,
    )


def fixed_regular(r: typing.Optional[int] = None, fraction: typing.Optional[float] = None):
    """
    The graph is r(n)-regular, with r(n) either a constant `r` or
    floor(fraction * (n - 1)). When r(n) * n is odd or r(n) > n - 1 there is no
    n-term member and the near decision answers No.
    """
    if (r is None) == (fraction is None):
        raise ValueError("fixed_regular needs exactly one of r or fraction")
    if r is not None and r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if fraction is not None and not 0 <= fraction <= 1:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")

    def degree(n: int) -> int:
        return int(r) if r is not None else math.floor(fraction * (n - 1))

    def realizable(n: int) -> bool:
        target = degree(n)
        return target <= n - 1 and (target * n) % 2 == 0

    def predicate(canon: np.ndarray) -> bool:
        return bool(np.all(canon == degree(canon.size)))

    def near_decision(delta: float, n: int, statistic: DegreeStatistic) -> bool:
        if not realizable(n):
            return False
        values, counts = statistic_buckets(n, statistic)
        return _regular_cost(values, counts, degree(n)) / n**2 <= delta

    def distance(sequence: np.ndarray) -> float:
        n = sequence.size
        if not realizable(n):
            return math.inf
        return float(np.abs(sequence - degree(n)).sum()) / n**2 if n else 0.0

    label = f"r={r}" if r is not None else f"fraction={fraction}"
    return DegreeSequenceProperty(
        name=f"fixed_regular({label})",
        predicate=predicate,
        near_decision=near_decision,
        distance=distance,
    )


def max_degree_distance(sequence, bound: int) -> float:
    """
    Normalised l1 distance from `sequence` to the closest graphic sequence
    with maximum degree at most `bound`. The optimum never exceeds the
    sequence coordinate-wise, so it keeps as many degree units as the largest
    graph with degrees capped at min(x_i, bound).
    """
    x = np.asarray(sequence, dtype=np.int64)
    n = x.size
    if n == 0:
        return 0.0
    kept = 2 * max_dominated_edges(np.minimum(x, max(bound, 0)))
    return float(x.sum() - kept) / n**2


def max_degree(fraction: float) -> DegreeSequenceProperty:
    """Maximum degree at most floor(fraction * (n - 1))"""
    if not 0 <= fraction <= 1:
        raise ValueError(f"fraction must lie in [0, 1], got {fraction}")

    def bound(n: int) -> int:
        return math.floor(fraction * (n - 1))

    def near_decision(delta: float, n: int, statistic: DegreeStatistic) -> bool:
        return max_degree_distance(expand_statistic(n, statistic), bound(n)) <= delta

    return DegreeSequenceProperty(
        name=f"max_degree(fraction={fraction})",
        predicate=lambda canon: canon.size == 0 or canon[-1] <= bound(canon.size),
        near_decision=near_decision,
        distance=lambda sequence: max_degree_distance(sequence, bound(sequence.size)),
    )


def explicit_list(sequences) -> DegreeSequenceProperty:
    """
    The property given by listing its members. Entries are canonicalised;
    non-graphic entries raise ValueError. The near decision scans the entries
    of length n and answers No when there are none.
    """
    members = []
    for sequence in sequences:
        canon = canonical(sequence)
        if not is_graphic(canon):
            raise ValueError(f"{canon.tolist()} is not graphic")
        members.append(canon)
    keys = {tuple(m.tolist()) for m in members}

    def distance(sequence: np.ndarray) -> float:
        same_length = [m for m in members if m.size == sequence.size]
        if not same_length:
            return math.inf
        return min(multiset_l1(sequence, m) for m in same_length)

    def near_decision(delta: float, n: int, statistic: DegreeStatistic) -> bool:
        return distance(expand_statistic(n, statistic)) <= delta

    return DegreeSequenceProperty(
        name=f"explicit({len(keys)} sequences)",
        predicate=lambda canon: tuple(canon.tolist()) in keys,
        near_decision=near_decision,
        distance=distance,
    )


def explicit_list_near_decision(sequences, delta: float, n: int, statistic: DegreeStatistic) -> bool:
    """Near decision of explicit_list(sequences) as a plain function"""
    return explicit_list(sequences).decide(delta, n, statistic)


def property_from_spec(spec: dict) -> DegreeSequenceProperty:
    """
    Builds a property from its JSON description:
    {"type": "any_regular"}, {"type": "fixed_regular", "r": <int>} or
    {"type": "fixed_regular", "fraction": <real>},
    {"type": "max_degree", "fraction": <real>},
    {"type": "explicit", "sequences": [[...], ...]}.
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError(f"property spec must be an object with a 'type', got {spec!r}")
    kind = spec["type"]
    try:
        if kind == "any_regular":
            return any_regular()
        elif kind == "fixed_regular":
            if "r" in spec:
                return fixed_regular(r=int(spec["r"]))
            return fixed_regular(fraction=float(spec["fraction"]))
        elif kind == "max_degree":
            return max_degree(fraction=float(spec["fraction"]))
        elif kind == "explicit":
            return explicit_list(spec["sequences"])
    except (KeyError, TypeError) as error:
        raise ValueError(f"malformed {kind} property spec {spec!r}: {error}") from error
    raise NotImplementedError(f"Unknown property type {kind!r}")


def distance_to_property(prop: DegreeSequenceProperty, sequence) -> float:
    """
    Normalised l1 distance from a degree sequence to the closest n-term member
    of the property. Twice a graph's edit distance to the property is at
    least this value, so a distance of 2 epsilon or more certifies that the
    graph is epsilon-far.
    """
    if prop.distance is None:
        raise NotImplementedError(f"property {prop.name!r} has no distance")
    return prop.distance(canonical(sequence))


@dataclasses.dataclass(frozen=True)
class ProximityConfig:
    """
    Tester settings. delta = (1/3)(epsilon / c_const)^2 unless pinned through
    `delta_override`. `repeat` independent estimates are combined by strict
    majority, and `max_queries` refuses sampling runs above that budget.
    """

    epsilon: float
    c_const: float = DEFAULT_C_CONST
    seed: typing.Union[None, int, typing.Sequence[int]] = None
    delta_override: typing.Optional[float] = None
    repeat: int = 1
    max_queries: typing.Optional[int] = None

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.c_const <= 0:
            raise ValueError(f"c_const must be positive, got {self.c_const}")
        if self.repeat < 1:
            raise ValueError(f"repeat must be at least 1, got {self.repeat}")
        if not 0 < self.delta <= 1:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")

    @property
    def delta(self) -> float:
        if self.delta_override is not None:
            return float(self.delta_override)
        return (self.epsilon / self.c_const) ** 2 / 3


@dataclasses.dataclass(frozen=True)
class Verdict:
    """
    Result of one tester run. `path` is "fallback" when the whole graph was
    queried and "sampling" otherwise; `statistic` is the last estimate.
    """

    accept: bool
    queries: int
    path: str
    delta: float
    statistic: typing.Optional[DegreeStatistic] = None
    votes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "verdict": "accept" if self.accept else "reject",
            "queries": self.queries,
            "path": self.path,
            "delta": self.delta,
            "statistic": self.statistic.to_dict() if self.statistic else None,
            "votes": list(self.votes),
        }


def query_degrees(oracle: GraphOracle) -> np.ndarray:
    """
    Exact degree sequence from all n(n-1)/2 pair queries, one row at a time.
    """
    n = oracle.n
    degrees = np.zeros(n, dtype=np.int64)
    for u in range(n - 1):
        row = oracle.adjacent_many(u, np.arange(u + 1, n))
        degrees[u] += row.sum()
        degrees[u + 1 :] += row
    return degrees


def run_tester(oracle: GraphOracle, prop: DegreeSequenceProperty, cfg: ProximityConfig) -> Verdict:
    """
    Tests whether the oracle's graph has the property, with one-sided
    distances measured in edit distance / n^2.

    If n < delta^-2 every pair is queried and the verdict is exact
    membership of the degree sequence. Otherwise a degree statistic is
    estimated with s * t queries and the property's near decision is asked;
    with `repeat` > 1 the majority of independent runs decides.
    """
    delta = cfg.delta
    n = oracle.n
    before = oracle.query_count()
    if n * delta**2 < 1:
        logging.debug(f"tester: n={n} < delta^-2={delta ** -2:.1f}, querying the whole graph")
        degrees = query_degrees(oracle)
        return Verdict(
            accept=prop.exact_membership(degrees),
            queries=oracle.query_count() - before,
            path="fallback",
            delta=delta,
        )

    params = derive_params(delta)
    if cfg.max_queries is not None and params.queries * cfg.repeat > cfg.max_queries:
        raise ValueError(
            f"sampling needs {params.queries * cfg.repeat} queries, above max_queries={cfg.max_queries}"
        )
    rng = np.random.default_rng(cfg.seed)
    votes, statistic = [], None
    for _ in range(cfg.repeat):
        statistic, _ = estimate_statistic(oracle, delta, rng)
        votes.append(prop.decide(delta, n, statistic))
    accept = 2 * sum(votes) > len(votes)
    logging.info(f"tester: {prop.name} on n={n}, delta={delta:g}: {'accept' if accept else 'reject'}")
    return Verdict(
        accept=accept,
        queries=oracle.query_count() - before,
        path="sampling",
        delta=delta,
        statistic=statistic,
        votes=tuple(votes),
    )
