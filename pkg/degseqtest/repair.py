"""
Repairs a graph into one with a prescribed degree sequence.

Starting from a Havel-Hakimi realization of the target, alternating cycles of
the coloured symmetric difference are swapped in until none is left. Every
swap keeps the target degrees and strictly shrinks the difference, and a
difference without alternating cycles is O(sqrt(delta) n^2) large.
"""
import dataclasses
import logging
import math

import numpy as np

from degseqtest.altcycle import find_alternating_cycle, search_alternating_cycle
from degseqtest.degreeseq import realize
from degseqtest.graphcore import BLUE, ColoredGraph, Graph

DEFAULT_C_CONST: float = 10.0


@dataclasses.dataclass(frozen=True)
class RepairResult:
    """
    Outcome of a repair run: the repaired graph, the final size of its edge
    symmetric difference with the input, the input's degree discrepancy from
    the target, and a per-iteration trace of (cycle length, difference size).
    """

    repaired: Graph
    symdiff_size: int
    discrepancy: int
    initial_symdiff: int
    iterations: int
    trace: tuple  # ((cycle_length, symdiff_after), ...)

    @property
    def n(self) -> int:
        return self.repaired.n

    @property
    def delta(self) -> float:
        """Discrepancy normalised by n^2"""
        return self.discrepancy / self.n**2 if self.n else 0.0

    @property
    def in_scope(self) -> bool:
        """Whether n >= delta^-2, the regime the edit-distance bound covers"""
        return self.discrepancy > 0 and self.n * self.delta**2 >= 1

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "symdiff_size": self.symdiff_size,
            "discrepancy": self.discrepancy,
            "delta": self.delta,
            "initial_symdiff": self.initial_symdiff,
            "iterations": self.iterations,
            "in_scope": self.in_scope,
            "trace": [list(step) for step in self.trace],
        }


def discrepancy(graph: Graph, target) -> int:
    """
    Degree discrepancy sum_i |d_G(i) - d_i| between a graph and a target
    sequence.
    """
    target = np.asarray(target, dtype=np.int64)
    if target.size != graph.n:
        raise ValueError(f"target has {target.size} entries, graph has {graph.n} vertices")
    return int(np.abs(graph.adjacency.sum(axis=1) - target).sum())


def repair(
    graph: Graph,
    target,
    greedy_init: bool = False,
    seed=None,
    attempts: int = 8,
    certify: bool = True,
) -> RepairResult:
    """
    Transforms `graph` into a graph whose degree sequence is exactly `target`.

    The working graph starts as a Havel-Hakimi realization of `target` (with
    `greedy_init`, equal-degree ties prefer edges already in `graph`), or as
    `graph` itself when that already has the target degrees. While
    the coloured difference (working edges missing from `graph` in red,
    `graph` edges missing from the working graph in blue) contains an
    alternating cycle, its red edges are dropped from and its blue edges added
    to the working graph. Each round first tries `attempts` quick randomised
    searches and then falls back to the exact matching-based finder, which
    also certifies that the final difference is alternating-cycle free. With
    `certify=False` the run stops as soon as the randomised searches fail,
    which is much faster on large graphs but gives no such certificate.

    Raises ValueError if `target` is not graphic or has the wrong length.
    """
    target = np.asarray(target, dtype=np.int64)
    initial_discrepancy = discrepancy(graph, target)
    if initial_discrepancy == 0:
        # the input already realizes the target
        working = graph.adjacency.copy()
    else:
        working = realize(target, prefer=graph if greedy_init else None).adjacency.copy()
    rng = np.random.default_rng(seed)

    red = working & ~graph.adjacency
    blue = graph.adjacency & ~working
    symdiff = int(np.count_nonzero(red) + np.count_nonzero(blue)) // 2
    initial_symdiff = symdiff
    trace = []
    while symdiff:
        cycle = None
        for _ in range(attempts):
            cycle = search_alternating_cycle(red, blue, rng)
            if cycle is not None:
                break
        if cycle is None and certify:
            cycle = find_alternating_cycle(ColoredGraph(red=red, blue=blue))
        if cycle is None:
            break
        for u, v, colour in cycle.edges():
            working[u, v] = working[v, u] = colour == BLUE
            red[u, v] = red[v, u] = blue[u, v] = blue[v, u] = False
        symdiff -= len(cycle)
        trace.append((len(cycle), symdiff))
        if len(trace) % 1000 == 0:
            logging.debug(f"repair: {len(trace)} swaps, symmetric difference {symdiff}")

    result = RepairResult(
        repaired=Graph(adjacency=working),
        symdiff_size=symdiff,
        discrepancy=initial_discrepancy,
        initial_symdiff=initial_symdiff,
        iterations=len(trace),
        trace=tuple(trace),
    )
    if initial_discrepancy and not result.in_scope:
        logging.warning(
            f"repair: n={result.n} < delta^-2={result.delta ** -2:.1f}, "
            "edit-distance bound is out of scope"
        )
    return result


def check_edit_bound(result: RepairResult, n: int, c_const: float = DEFAULT_C_CONST) -> bool:
    """
    Whether the final symmetric difference respects
    |E(G') xor E(G)| <= C * sqrt(discrepancy / n^2) * n^2.
    A zero discrepancy, or an empty graph, therefore demands an empty
    difference.
    """
    if n == 0:
        return result.symdiff_size == 0
    bound = c_const * math.sqrt(result.discrepancy / n**2) * n**2
    return result.symdiff_size <= bound
