"""
Alternating cycles in 2-edge-coloured graphs.

Contains the log-peeling order (a certificate that no dense bicoloured core
exists), an exact alternating-cycle finder built on a vertex-gadget reduction
to general-graph maximum matching, a quick randomised search used on large
inputs, and an exhaustive search used as a testing oracle on small inputs.
"""
import dataclasses
import math
import typing

import networkx as nx
import numpy as np

from degseqtest.graphcore import BLUE, RED, ColoredGraph, cycle_colours

BRUTE_FORCE_LIMIT: int = 12


@dataclasses.dataclass(frozen=True)
class AlternatingCycle:
    """
    A simple cycle (v_0, ..., v_{L-1}) whose edges v_i v_{i+1} (indices mod L)
    alternate in colour. colours[i] is the colour of the edge v_i v_{i+1}.
    """

    vertices: tuple
    colours: tuple

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self) -> typing.List[typing.Tuple[int, int, str]]:
        """(u, v, colour) for every edge of the cycle"""
        rotated = self.vertices[1:] + self.vertices[:1]
        return list(zip(self.vertices, rotated, self.colours))


def verify_alternating_cycle(colored: ColoredGraph, vertices) -> AlternatingCycle:
    """
    Checks `vertices` against the AlternatingCycle invariants for the host
    graph `colored` and returns the typed cycle. Raises ValueError otherwise.
    """
    vertices = tuple(int(v) for v in vertices)
    return AlternatingCycle(vertices=vertices, colours=cycle_colours(colored, vertices))


@dataclasses.dataclass(frozen=True)
class PeelOrder:
    """
    Outcome of log-peeling: the removal order with the colour in which each
    removed vertex was deficient, and the residual vertex set (empty when the
    whole graph was peeled).
    """

    order: tuple
    deficient: tuple
    residual: tuple
    threshold: float

    @property
    def complete(self) -> bool:
        return not self.residual


def log_peel_order(colored: ColoredGraph) -> PeelOrder:
    """
    Repeatedly removes the lowest-index vertex that has fewer than log2(n) red
    or fewer than log2(n) blue neighbours among the vertices still present,
    recording the colour it lacks. Either every vertex gets removed, giving an
    ordering in which each vertex has few forward edges in its recorded
    colour, or a non-empty residual set remains in which every vertex has at
    least log2(n) neighbours of each colour.
    """
    n = colored.n
    if n < 2:
        raise ValueError(f"log-peeling needs n >= 2, got {n}")
    threshold = math.log2(n)
    alive = np.ones(n, dtype=bool)
    red_degrees = colored.red_degrees.astype(np.int64)
    blue_degrees = colored.blue_degrees.astype(np.int64)

    order, deficient = [], []
    while True:
        removable = alive & ((red_degrees < threshold) | (blue_degrees < threshold))
        candidates = np.flatnonzero(removable)
        if candidates.size == 0:
            break
        v = candidates[0]
        deficient.append(RED if red_degrees[v] < threshold else BLUE)
        order.append(int(v))
        alive[v] = False
        red_degrees -= colored.red[v]
        blue_degrees -= colored.blue[v]

    return PeelOrder(
        order=tuple(order),
        deficient=tuple(deficient),
        residual=tuple(int(v) for v in np.flatnonzero(alive)),
        threshold=threshold,
    )


def peel_uncoloured(colored: ColoredGraph) -> typing.Tuple[ColoredGraph, np.ndarray]:
    """
    Iteratively drops vertices with no red or no blue edge, since such a
    vertex cannot lie on an alternating cycle. Returns the restricted graph
    and the boolean mask of surviving vertices.
    """
    alive = np.ones(colored.n, dtype=bool)
    red_degrees = colored.red_degrees.astype(np.int64)
    blue_degrees = colored.blue_degrees.astype(np.int64)
    while True:
        dead = alive & ((red_degrees == 0) | (blue_degrees == 0))
        if not dead.any():
            break
        alive &= ~dead
        red_degrees -= colored.red[dead].sum(axis=0)
        blue_degrees -= colored.blue[dead].sum(axis=0)
    return colored.restrict(np.flatnonzero(alive)), alive


@dataclasses.dataclass(frozen=True)
class MatchingInstance:
    """
    An undirected simple graph handed to the matching solver. For gadgets,
    `forced` is the vertex whose internal pair edge was left out, so every
    perfect matching has to route that vertex through one red and one blue
    edge.
    """

    nodes: tuple
    edges: tuple  # (node, node, weight) triples
    forced: typing.Optional[int] = None

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_weighted_edges_from(self.edges)
        return graph

    @classmethod
    def from_networkx(cls, graph: nx.Graph) -> "MatchingInstance":
        return cls(
            nodes=tuple(graph.nodes),
            edges=tuple((u, v, data.get("weight", 1)) for u, v, data in graph.edges(data=True)),
        )


def _gadget(colored: ColoredGraph, forced: typing.Optional[int]) -> MatchingInstance:
    """
    Vertex gadget: terminals (v, R) and (v, B) per non-isolated vertex joined
    by an internal edge (except at `forced`); per coloured edge e = {u, v} two
    nodes (e, u), (e, v) joined to each other and to the matching terminals
    (u, c), (v, c). Attachment edges weigh 1, all others 0.
    """
    red_degrees = colored.red_degrees
    blue_degrees = colored.blue_degrees
    vertices = np.flatnonzero((red_degrees > 0) | (blue_degrees > 0))
    if forced is not None and forced not in set(vertices.tolist()):
        vertices = np.sort(np.append(vertices, forced))

    nodes, edges = [], []
    for v in vertices.tolist():
        nodes.extend([(v, RED), (v, BLUE)])
        if v != forced:
            edges.append(((v, RED), (v, BLUE), 0))
    for colour in (RED, BLUE):
        rows, cols = np.nonzero(np.triu(colored.matrix(colour), k=1))
        for u, v in zip(rows.tolist(), cols.tolist()):
            end_u, end_v = ("e", colour, u, v, u), ("e", colour, u, v, v)
            nodes.extend([end_u, end_v])
            edges.append((end_u, end_v, 0))
            edges.append(((u, colour), end_u, 1))
            edges.append(((v, colour), end_v, 1))
    return MatchingInstance(nodes=tuple(nodes), edges=tuple(edges), forced=forced)


def build_gadget(colored: ColoredGraph, w: int) -> MatchingInstance:
    """
    Gadget graph whose perfect matchings correspond to collections of
    vertex-disjoint alternating cycles, one of them through `w`. Isolated
    vertices of `colored` are left out; they would only add matched pairs.
    """
    if colored.red_degrees[w] < 1 or colored.blue_degrees[w] < 1:
        raise ValueError(f"vertex {w} needs at least one red and one blue edge")
    return _gadget(colored, forced=w)


def max_matching(instance: MatchingInstance) -> frozenset:
    """
    Maximum-cardinality matching of a general graph (Edmonds' blossom
    algorithm via networkx), as a set of node pairs. Deterministic for a fixed
    node and edge ordering.
    """
    graph = nx.Graph()
    graph.add_nodes_from(instance.nodes)
    graph.add_edges_from((u, v) for u, v, _ in instance.edges)
    matching = nx.max_weight_matching(graph, maxcardinality=True)
    return frozenset(matching)


def has_alternating_cycle(colored: ColoredGraph) -> bool:
    """
    Decides whether any alternating cycle exists with one weighted matching:
    the unforced gadget always has the all-internal perfect matching, and a
    perfect matching of positive weight exists iff some edge can be routed,
    i.e. iff the graph contains vertex-disjoint alternating cycles.
    """
    core, alive = peel_uncoloured(colored)
    if not alive.any():
        return False
    graph = _gadget(core, forced=None).to_networkx()
    matching = nx.max_weight_matching(graph, maxcardinality=True, weight="weight")
    return any(graph.edges[u, v]["weight"] > 0 for u, v in matching)


def _decode_cycle(core: ColoredGraph, matching: frozenset, w: int) -> AlternatingCycle:
    """
    Reads the selected coloured edges off a perfect gadget matching and walks
    the alternating cycle through `w`.
    """
    routed: typing.Dict[typing.Tuple[int, str], int] = {}
    for a, b in matching:
        for terminal, end in ((a, b), (b, a)):
            if len(terminal) == 2 and len(end) == 5:
                _, colour, u, v, at = end
                routed[(at, colour)] = v if at == u else u
    vertices, colour, v = [w], RED, routed[(w, RED)]
    while v != w:
        vertices.append(v)
        colour = BLUE if colour == RED else RED
        v = routed[(v, colour)]
    return verify_alternating_cycle(core, vertices)


def find_alternating_cycle(colored: ColoredGraph) -> typing.Optional[AlternatingCycle]:
    """
    Exact alternating-cycle finder. Vertices without both colours are peeled
    away first; then, for each surviving w in ascending order, the gadget
    forcing w is tested for a perfect matching, and the first success is
    decoded into the alternating cycle through w. Returns None iff the graph
    has no alternating cycle.
    """
    core, alive = peel_uncoloured(colored)
    if not alive.any() or not has_alternating_cycle(core):
        return None
    for w in np.flatnonzero(alive).tolist():
        instance = build_gadget(core, w)
        matching = max_matching(instance)
        if 2 * len(matching) == len(instance.nodes):
            return _decode_cycle(core, matching, w)
    return None


def search_alternating_cycle(
    red: np.ndarray,
    blue: np.ndarray,
    rng: np.random.Generator,
    start: typing.Optional[int] = None,
) -> typing.Optional[AlternatingCycle]:
    """
    Randomised depth-first search for an alternating cycle on raw red/blue
    adjacency matrices. The current alternating path is extended through a
    random unvisited neighbour in the required colour, and closed as soon as
    the current vertex reaches a path vertex whose outgoing path edge has the
    other colour. Dead (vertex, colour) states are never re-entered, so the
    search stops after O(n) extensions. It can miss cycles, so None is not a
    certificate of absence.
    """
    n = red.shape[0]
    if start is None:
        both = np.flatnonzero(red.any(axis=1) & blue.any(axis=1))
        if both.size == 0:
            return None
        start = int(rng.choice(both))
    matrices = {RED: red, BLUE: blue}
    other = {RED: BLUE, BLUE: RED}

    path = [start]
    out_colours: typing.List[str] = []  # colour of path[i] -> path[i + 1]
    on_path = np.zeros(n, dtype=bool)
    on_path[start] = True
    # path vertices whose outgoing edge has the given colour
    leaves = {RED: np.zeros(n, dtype=bool), BLUE: np.zeros(n, dtype=bool)}
    dead = {RED: np.zeros(n, dtype=bool), BLUE: np.zeros(n, dtype=bool)}
    colour = RED if rng.random() < 0.5 else BLUE

    while path:
        u = path[-1]
        row = matrices[colour][u]
        closing = np.flatnonzero(row & leaves[other[colour]])
        if closing.size:
            j = path.index(int(closing[0]))
            vertices = tuple(path[j:])
            colours = tuple(out_colours[j:]) + (colour,)
            return AlternatingCycle(vertices=vertices, colours=colours)
        fresh = np.flatnonzero(row & ~on_path & ~dead[colour])
        if fresh.size:
            v = int(rng.choice(fresh))
            leaves[colour][u] = True
            out_colours.append(colour)
            path.append(v)
            on_path[v] = True
            colour = other[colour]
            continue
        # dead end: arriving at u by an edge of the other colour leads nowhere
        dead[other[colour]][u] = True
        on_path[u] = False
        path.pop()
        if out_colours:
            colour = out_colours.pop()
            leaves[colour][path[-1]] = False
    return None


def brute_force_alternating_cycle(colored: ColoredGraph) -> typing.Optional[AlternatingCycle]:
    """
    Exhaustive search over simple alternating paths, trying each start vertex
    in ascending order as the smallest vertex of the cycle. Only meant as a
    testing oracle; refuses graphs with more than BRUTE_FORCE_LIMIT vertices.
    """
    n = colored.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force is limited to {BRUTE_FORCE_LIMIT} vertices, got {n}")
    neighbours = {
        colour: [np.flatnonzero(colored.matrix(colour)[v]).tolist() for v in range(n)]
        for colour in (RED, BLUE)
    }
    other = {RED: BLUE, BLUE: RED}

    def extend(path: list, colours: list, visited: set):
        u, colour = path[-1], other[colours[-1]]
        start = path[0]
        # close with the colour that differs from both the last and first edge
        if len(path) >= 4 and colour != colours[0] and start in neighbours[colour][u]:
            return path, colours + [colour]
        for v in neighbours[colour][u]:
            if v > start and v not in visited:
                visited.add(v)
                found = extend(path + [v], colours + [colour], visited)
                visited.discard(v)
                if found:
                    return found
        return None

    for start in range(n):
        for first in (RED, BLUE):
            for v in neighbours[first][start]:
                if v > start:
                    found = extend([start, v], [first], {start, v})
                    if found:
                        vertices, colours = found
                        return AlternatingCycle(vertices=tuple(vertices), colours=tuple(colours))
    return None
