"""
Undirected simple graphs on the vertices 0..n-1, their degree sequences and
edit distances, plus the red/blue coloured symmetric difference of two graphs
and the alternating-cycle swap that shrinks it.
"""
import dataclasses
import typing

import numpy as np

RED: str = "R"
BLUE: str = "B"


def _as_adjacency(matrix, name: str = "adjacency") -> np.ndarray:
    """
    Copies a square matrix into a read-only boolean adjacency matrix, raising
    ValueError if it has self-loops or is not symmetric.
    """
    adjacency = np.array(matrix, dtype=bool)
    if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {adjacency.shape}")
    if adjacency.diagonal().any():
        raise ValueError(f"{name} has self-loops")
    if not np.array_equal(adjacency, adjacency.T):
        raise ValueError(f"{name} is not symmetric")
    adjacency.flags.writeable = False
    return adjacency


@dataclasses.dataclass(frozen=True, eq=False)
class Graph:
    """
    An undirected simple graph on the vertices 0..n-1, backed by a read-only
    symmetric boolean adjacency matrix with an empty diagonal. Adjacency
    lookups are O(1), neighbour listings are one vectorised row scan.
    """

    adjacency: np.ndarray  # (n, n) symmetric boolean matrix

    def __post_init__(self):
        object.__setattr__(self, "adjacency", _as_adjacency(self.adjacency))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.adjacency)) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def neighbours(self, v: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[v])

    def edges(self) -> np.ndarray:
        """
        Edges as an (m, 2) integer array of (u, v) rows with u < v, sorted
        lexicographically.
        """
        u, v = np.nonzero(np.triu(self.adjacency, k=1))
        return np.column_stack([u, v])


@dataclasses.dataclass(frozen=True, eq=False)
class ColoredGraph:
    """
    A 2-edge-coloured simple graph on the vertices 0..n-1, held as two
    disjoint read-only adjacency matrices, one for the red edges and one for
    the blue edges.
    """

    red: np.ndarray
    blue: np.ndarray

    def __post_init__(self):
        red = _as_adjacency(self.red, name="red")
        blue = _as_adjacency(self.blue, name="blue")
        if red.shape != blue.shape:
            raise ValueError(f"red {red.shape} and blue {blue.shape} sizes differ")
        if (red & blue).any():
            raise ValueError("an edge cannot be both red and blue")
        object.__setattr__(self, "red", red)
        object.__setattr__(self, "blue", blue)

    def __repr__(self) -> str:
        red_edges, blue_edges = self.num_edges
        return f"ColoredGraph(n={self.n}, red={red_edges}, blue={blue_edges})"

    @property
    def n(self) -> int:
        return self.red.shape[0]

    @property
    def red_degrees(self) -> np.ndarray:
        return self.red.sum(axis=1)

    @property
    def blue_degrees(self) -> np.ndarray:
        return self.blue.sum(axis=1)

    @property
    def num_edges(self) -> typing.Tuple[int, int]:
        """Number of red edges and number of blue edges"""
        return (
            int(np.count_nonzero(self.red)) // 2,
            int(np.count_nonzero(self.blue)) // 2,
        )

    def colour(self, u: int, v: int) -> typing.Optional[str]:
        """Colour of the edge {u, v}, or None when u and v are not adjacent"""
        if self.red[u, v]:
            return RED
        if self.blue[u, v]:
            return BLUE
        return None

    def matrix(self, colour: str) -> np.ndarray:
        if colour == RED:
            return self.red
        elif colour == BLUE:
            return self.blue
        else:
            raise NotImplementedError(f"Unknown colour {colour}")

    def restrict(self, vertices) -> "ColoredGraph":
        """
        Induced subgraph F[U] on the given vertices. Vertex labels are kept,
        so vertices outside U simply become isolated.
        """
        mask = np.zeros(self.n, dtype=bool)
        mask[np.asarray(list(vertices), dtype=int)] = True
        keep = np.outer(mask, mask)
        return ColoredGraph(red=self.red & keep, blue=self.blue & keep)


def graph_from_edges(n: int, edges: typing.Iterable) -> Graph:
    """
    Builds a Graph on n vertices from (u, v) pairs. Repeated pairs collapse
    into one edge; self-loops and out-of-range vertices raise ValueError.
    """
    adjacency = np.zeros(shape=(n, n), dtype=bool)
    pairs = np.asarray(list(edges), dtype=int).reshape(-1, 2)
    if pairs.size:
        if pairs.min() < 0 or pairs.max() >= n:
            raise ValueError(f"edge endpoints must lie in 0..{n - 1}")
        if (pairs[:, 0] == pairs[:, 1]).any():
            raise ValueError("self-loops are not allowed")
        adjacency[pairs[:, 0], pairs[:, 1]] = True
        adjacency[pairs[:, 1], pairs[:, 0]] = True
    return Graph(adjacency=adjacency)


def empty_graph(n: int) -> Graph:
    return Graph(adjacency=np.zeros(shape=(n, n), dtype=bool))


def complete_graph(n: int) -> Graph:
    return Graph(adjacency=~np.eye(n, dtype=bool))


def path_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def circulant_graph(n: int, offsets: typing.Iterable[int]) -> Graph:
    """
    Circulant graph joining every i to i +/- o (mod n) for each offset o.
    Offsets 1..r with 2r < n give a 2r-regular graph.
    """
    adjacency = np.zeros(shape=(n, n), dtype=bool)
    rows = np.arange(n)
    for offset in offsets:
        if offset % n == 0:
            raise ValueError(f"offset {offset} would create self-loops")
        adjacency[rows, (rows + offset) % n] = True
        adjacency[rows, (rows - offset) % n] = True
    return Graph(adjacency=adjacency)


def split_graph(n: int, clique_size: int) -> Graph:
    """
    A clique on the first `clique_size` vertices, the rest isolated.
    """
    if not 0 <= clique_size <= n:
        raise ValueError(f"clique_size must lie in 0..{n}, got {clique_size}")
    adjacency = np.zeros(shape=(n, n), dtype=bool)
    adjacency[:clique_size, :clique_size] = True
    np.fill_diagonal(adjacency, False)
    return Graph(adjacency=adjacency)


def bimodal_graph(n: int, clique_fraction: float = 0.5, p: float = 0.5, seed=None):
    """
    A random split graph: a clique on the first round(clique_fraction * n)
    vertices, an independent set on the others, and each clique/independent
    pair joined with probability p. With the defaults, degrees cluster around
    3n/4 and n/4.
    """
    rng = np.random.default_rng(seed)
    size = int(round(clique_fraction * n))
    adjacency = split_graph(n, size).adjacency.copy()
    cross = rng.random(size=(size, n - size)) < p
    adjacency[:size, size:] = cross
    adjacency[size:, :size] = cross.T
    return Graph(adjacency=adjacency)


def degree_sequence(graph: Graph) -> np.ndarray:
    """
    Degree sequence (d(0), ..., d(n-1)) of a graph.
    """
    return graph.adjacency.sum(axis=1).astype(np.int64)


def edit_distance(graph: Graph, other: Graph) -> typing.Tuple[int, float]:
    """
    Size of the edge symmetric difference |E(G) xor E(H)| between two graphs
    on the same vertex set, and that size normalised by n^2.
    """
    if graph.n != other.n:
        raise ValueError(f"graph sizes differ: {graph.n} != {other.n}")
    raw = int(np.count_nonzero(graph.adjacency ^ other.adjacency)) // 2
    normalized = raw / graph.n**2 if graph.n else 0.0
    return raw, normalized


def colored_symmetric_difference(graph: Graph, target: Graph) -> ColoredGraph:
    """
    Colours the edges of `target` missing from `graph` red and the edges of
    `graph` missing from `target` blue. For every vertex i,
    d_target(i) = d_graph(i) + d^R(i) - d^B(i).
    """
    if graph.n != target.n:
        raise ValueError(f"graph sizes differ: {graph.n} != {target.n}")
    return ColoredGraph(
        red=target.adjacency & ~graph.adjacency,
        blue=graph.adjacency & ~target.adjacency,
    )


def cycle_colours(colored: ColoredGraph, vertices: typing.Sequence[int]) -> tuple:
    """
    Colours of the edges (v_0 v_1, v_1 v_2, ..., v_{L-1} v_0) of a closed walk,
    after checking that it is a simple alternating cycle of `colored`: at
    least 4 distinct vertices, every step an edge, consecutive colours
    different including the wrap-around. Raises ValueError otherwise.
    """
    vertices = [int(v) for v in vertices]
    length = len(vertices)
    if length < 4 or length % 2:
        raise ValueError(f"an alternating cycle needs an even length >= 4, got {length}")
    if len(set(vertices)) != length:
        raise ValueError(f"cycle vertices are not distinct: {vertices}")
    if min(vertices) < 0 or max(vertices) >= colored.n:
        raise ValueError(f"cycle vertices must lie in 0..{colored.n - 1}")
    colours = []
    for u, v in zip(vertices, vertices[1:] + vertices[:1]):
        colour = colored.colour(u, v)
        if colour is None:
            raise ValueError(f"{{{u}, {v}}} is not an edge of the coloured graph")
        colours.append(colour)
    for i in range(length):
        if colours[i] == colours[i - 1]:
            raise ValueError(f"colours do not alternate at vertex {vertices[i]}")
    return tuple(colours)


def toggle_cycle(graph: Graph, target: Graph, cycle: typing.Sequence[int]) -> Graph:
    """
    Swaps an alternating cycle of colored_symmetric_difference(graph, target)
    into `target`: its red edges are removed from `target` and its blue edges
    added. The result keeps the degree sequence of `target` and is closer to
    `graph` by exactly the cycle length.
    """
    colored = colored_symmetric_difference(graph, target)
    vertices = [int(v) for v in cycle]
    colours = cycle_colours(colored, vertices)

    adjacency = target.adjacency.copy()
    for (u, v), colour in zip(zip(vertices, vertices[1:] + vertices[:1]), colours):
        adjacency[u, v] = adjacency[v, u] = colour == BLUE
    return Graph(adjacency=adjacency)


def random_graph(n: int, p: float, seed=None) -> Graph:
    """
    Erdos-Renyi G(n, p) graph, deterministic for a fixed seed.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random(size=(n, n)) < p, k=1)
    return Graph(adjacency=upper | upper.T)


def _pair_from_index(n: int, index: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Maps linear indices of the upper triangle (row-major, u < v) back to (u, v)
    without materialising np.triu_indices.
    """
    index = np.asarray(index, dtype=np.int64)
    total = n * (n - 1) // 2
    # row counted from the bottom of the triangle
    back = np.floor((np.sqrt(8.0 * (total - 1 - index) + 1.0) - 1.0) / 2.0)
    u = (n - 2 - back).astype(np.int64)
    # guard against floating point drift in the square root
    start = u * n - u * (u + 1) // 2
    u = np.where(start > index, u - 1, u)
    start = u * n - u * (u + 1) // 2
    next_start = (u + 1) * n - (u + 1) * (u + 2) // 2
    u = np.where(next_start <= index, u + 1, u)
    start = u * n - u * (u + 1) // 2
    v = index - start + u + 1
    return u, v


def perturb_edges(graph: Graph, flips: int, seed=None) -> Graph:
    """
    Toggles `flips` distinct vertex pairs chosen uniformly without
    replacement, deterministic for a fixed seed.
    """
    n = graph.n
    total = n * (n - 1) // 2
    if not 0 <= flips <= total:
        raise ValueError(f"flips must lie in 0..{total}, got {flips}")
    if flips == 0:
        return graph
    rng = np.random.default_rng(seed)
    u, v = _pair_from_index(n, rng.choice(total, size=flips, replace=False))
    adjacency = graph.adjacency.copy()
    adjacency[u, v] = ~adjacency[u, v]
    adjacency[v, u] = adjacency[u, v]
    return Graph(adjacency=adjacency)


def read_edge_list(path) -> Graph:
    """
    Reads the edge-list text format: a header line "n m" followed by m lines
    "u v" with 0 <= u < v < n.
    """
    with open(file=path, mode="r") as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'n m', got {header}")
        n, m = int(header[0]), int(header[1])
        edges = [tuple(int(x) for x in line.split()) for line in f if line.strip()]
    if len(edges) != m:
        raise ValueError(f"{path}: header says {m} edges, found {len(edges)}")
    for u, v in edges:
        if not 0 <= u < v < n:
            raise ValueError(f"{path}: edge '{u} {v}' must satisfy 0 <= u < v < {n}")
    if len(set(edges)) != m:
        raise ValueError(f"{path}: duplicate edges")
    return graph_from_edges(n, edges)


def write_edge_list(graph: Graph, path) -> None:
    edges = graph.edges()
    with open(file=path, mode="w") as f:
        f.write(f"{graph.n} {len(edges)}\n")
        f.writelines(f"{u} {v}\n" for u, v in edges)


def read_colored_edge_list(path) -> ColoredGraph:
    """
    Reads the coloured edge-list format: a header "n m" followed by m lines
    "u v c" with c one of R or B.
    """
    with open(file=path, mode="r") as f:
        n, m = (int(x) for x in f.readline().split())
        rows = [line.split() for line in f if line.strip()]
    if len(rows) != m:
        raise ValueError(f"{path}: header says {m} edges, found {len(rows)}")
    red = np.zeros(shape=(n, n), dtype=bool)
    blue = np.zeros(shape=(n, n), dtype=bool)
    for u, v, colour in rows:
        u, v = int(u), int(v)
        if not 0 <= u < v < n:
            raise ValueError(f"{path}: edge '{u} {v}' must satisfy 0 <= u < v < {n}")
        matrix = {RED: red, BLUE: blue}.get(colour)
        if matrix is None:
            raise ValueError(f"{path}: unknown colour {colour!r}")
        matrix[u, v] = matrix[v, u] = True
    return ColoredGraph(red=red, blue=blue)


def write_colored_edge_list(colored: ColoredGraph, path) -> None:
    lines = []
    for colour in (RED, BLUE):
        u, v = np.nonzero(np.triu(colored.matrix(colour), k=1))
        lines.extend(f"{a} {b} {colour}\n" for a, b in zip(u, v))
    with open(file=path, mode="w") as f:
        f.write(f"{colored.n} {len(lines)}\n")
        f.writelines(lines)
