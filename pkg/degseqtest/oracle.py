"""
Query access to a graph in the dense model: counted adjacency-matrix lookups
and uncounted uniform vertex sampling.
"""
import abc

import numpy as np

from degseqtest.graphcore import Graph


class GraphOracle(abc.ABC):
    """
    Adjacency-matrix oracle over the vertices 0..n-1. Every adjacency lookup
    adds exactly one to the query counter, self-queries included; sampling
    vertices is free. Subclasses only provide the vectorised `_lookup`.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError(f"n must be non-negative, got {n}")
        self.n: int = int(n)
        self._queries: int = 0

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, queries={self._queries})"

    @abc.abstractmethod
    def _lookup(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        """Boolean adjacency of the (already validated) pairs (us[i], vs[i])"""

    def _check_range(self, vertices: np.ndarray) -> None:
        if vertices.size and (vertices.min() < 0 or vertices.max() >= self.n):
            raise IndexError(f"vertex out of range 0..{self.n - 1}")

    def adjacent(self, u: int, v: int) -> bool:
        """Whether {u, v} is an edge; one counted query"""
        pair = np.array([u, v], dtype=np.int64)
        self._check_range(pair)
        self._queries += 1
        return bool(self._lookup(pair[:1], pair[1:])[0])

    def adjacent_many(self, us, vs) -> np.ndarray:
        """
        Batch of adjacency queries on broadcast index arrays, counted as one
        query per pair.
        """
        us, vs = np.broadcast_arrays(np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64))
        self._check_range(us)
        self._check_range(vs)
        self._queries += us.size
        return self._lookup(us, vs)

    def sample_vertex(self, rng: np.random.Generator) -> int:
        """Uniform vertex from 0..n-1, with replacement"""
        return int(rng.integers(low=0, high=self.n))

    def sample_vertices(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(low=0, high=self.n, size=size)

    def query_count(self) -> int:
        return self._queries


class AdjacencyOracle(GraphOracle):
    """In-memory oracle backed by a Graph's adjacency matrix"""

    def __init__(self, graph: Graph):
        super().__init__(n=graph.n)
        self.graph: Graph = graph

    def _lookup(self, us: np.ndarray, vs: np.ndarray) -> np.ndarray:
        return self.graph.adjacency[us, vs]
