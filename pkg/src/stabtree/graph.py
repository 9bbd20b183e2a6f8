"""Weighted graph model and the metric oracles the protocol is judged against.

Distances, components, hop diameters and the like are computed here with
standard graph algorithms, completely independently of the protocol state
machine, so they can serve as ground truth in checks.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

#: Sentinel for "no path"; compares above every finite distance.
INFINITY = math.inf


class GraphError(ValueError):
    """Base class for graph construction and lookup failures."""


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class NonPositiveWeightError(GraphError):
    pass


class BadNodeIdError(GraphError):
    pass


class GraphFormatError(GraphError):
    """Malformed graph file."""


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with positive integer edge weights.

    Immutable after construction; safe to share between concurrently
    running simulations. ``adjacency[u]`` maps each neighbor of ``u`` to
    the weight of the connecting edge.
    """

    node_count: int
    root_id: int
    adjacency: tuple[Mapping[int, int], ...]

    def check_node(self, u: int) -> None:
        if not isinstance(u, int) or not 0 <= u < self.node_count:
            raise BadNodeIdError(f"invalid node id {u!r}")

    def neighbors(self, u: int) -> Iterable[int]:
        return self.adjacency[u].keys()

    def weight(self, u: int, v: int) -> int:
        return self.adjacency[u][v]

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield each undirected edge once, as (u, v, w) with u < v."""
        for u in range(self.node_count):
            for v, w in self.adjacency[u].items():
                if u < v:
                    yield u, v, w

    @property
    def edge_count(self) -> int:
        return sum(1 for _ in self.edges())


def build_graph(
    edge_list: Iterable[tuple[int, int, int]],
    node_count: int,
    root_id: int,
) -> WeightedGraph:
    """Validate and build a :class:`WeightedGraph` from an edge list."""
    if node_count < 1:
        raise BadNodeIdError(f"node_count must be positive, got {node_count}")
    if not isinstance(root_id, int) or not 0 <= root_id < node_count:
        raise BadNodeIdError(f"invalid root id {root_id!r}")
    adjacency: list[dict[int, int]] = [{} for _ in range(node_count)]
    for u, v, w in edge_list:
        for x in (u, v):
            if not isinstance(x, int) or not 0 <= x < node_count:
                raise BadNodeIdError(f"invalid node id {x!r} in edge ({u}, {v})")
        if u == v:
            raise SelfLoopError(f"self-loop at node {u}")
        if not isinstance(w, int) or w < 1:
            raise NonPositiveWeightError(f"edge ({u}, {v}) has weight {w!r}; weights must be integers >= 1")
        if v in adjacency[u]:
            raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
        adjacency[u][v] = w
        adjacency[v][u] = w
    return WeightedGraph(
        node_count=node_count,
        root_id=root_id,
        adjacency=tuple(MappingProxyType(a) for a in adjacency),
    )


def dijkstra_from(g: WeightedGraph, src: int) -> list[int | float]:
    """Single-source shortest-path weights; INFINITY for unreachable nodes."""
    g.check_node(src)
    dist: list[int | float] = [INFINITY] * g.node_count
    dist[src] = 0
    heap: list[tuple[int, int]] = [(0, src)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for v, w in g.adjacency[u].items():
            dv = du + w
            if dv < dist[v]:
                dist[v] = dv
                heapq.heappush(heap, (dv, v))
    return dist


def weighted_distance(g: WeightedGraph, u: int, v: int) -> int | float:
    """Exact shortest-path weight between u and v; INFINITY across components."""
    g.check_node(u)
    g.check_node(v)
    return dijkstra_from(g, u)[v]


def _lex_dijkstra(g: WeightedGraph, src: int) -> list[tuple[int | float, int | float]]:
    """Per node: (min path weight, min hop count among minimum-weight paths)."""
    best: list[tuple[int | float, int | float]] = [(INFINITY, INFINITY)] * g.node_count
    best[src] = (0, 0)
    heap: list[tuple[int, int, int]] = [(0, 0, src)]
    while heap:
        du, hu, u = heapq.heappop(heap)
        if (du, hu) > best[u]:
            continue
        for v, w in g.adjacency[u].items():
            cand = (du + w, hu + 1)
            if cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, (du + w, hu + 1, v))
    return best


def root_distances(g: WeightedGraph) -> list[int | float]:
    """Weighted distance from every node to the root (the legitimacy oracle)."""
    return dijkstra_from(g, g.root_id)


def root_hop_distances(g: WeightedGraph) -> list[int | float]:
    """Hop distance to the root: fewest edges among minimum-weight paths."""
    return [h for _, h in _lex_dijkstra(g, g.root_id)]


@dataclass(frozen=True)
class ComponentInfo:
    """Connected-component decomposition plus the metrics used by the bounds.

    ``n_max_cc`` is the maximum number of non-root processes in a single
    connected component; ``hop_diameter_root`` is the hop diameter of the
    root's component (0 when the root is alone); ``w_max`` is the largest
    edge weight (1 for an edgeless graph).
    """

    component_of: tuple[int, ...]
    component_count: int
    root_component: frozenset[int]
    n_max_cc: int
    hop_diameter_root: int
    w_max: int

    def same_component(self, u: int, v: int) -> bool:
        return self.component_of[u] == self.component_of[v]

    def components(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.component_count)]
        for u, c in enumerate(self.component_of):
            out[c].append(u)
        return out


def component_info(g: WeightedGraph) -> ComponentInfo:
    comp = [-1] * g.node_count
    n_comp = 0
    for start in range(g.node_count):
        if comp[start] != -1:
            continue
        comp[start] = n_comp
        stack = [start]
        while stack:
            u = stack.pop()
            for v in g.adjacency[u]:
                if comp[v] == -1:
                    comp[v] = n_comp
                    stack.append(v)
        n_comp += 1
    sizes = [0] * n_comp
    for c in comp:
        sizes[c] += 1
    root_comp = comp[g.root_id]
    n_max_cc = 0
    for c, size in enumerate(sizes):
        non_root = size - 1 if c == root_comp else size
        n_max_cc = max(n_max_cc, non_root)
    root_nodes = frozenset(u for u in range(g.node_count) if comp[u] == root_comp)
    diameter = 0
    if len(root_nodes) > 1:
        for u in root_nodes:
            hops = _lex_dijkstra(g, u)
            diameter = max(diameter, max(int(hops[v][1]) for v in root_nodes))
    w_max = max((w for _, _, w in g.edges()), default=1)
    return ComponentInfo(
        component_of=tuple(comp),
        component_count=n_comp,
        root_component=root_nodes,
        n_max_cc=n_max_cc,
        hop_diameter_root=diameter,
        w_max=w_max,
    )


def generate_random_graph(
    seed: int,
    node_count: int,
    edge_probability: float,
    max_weight: int,
    component_hint: int | None = None,
    root_id: int = 0,
) -> WeightedGraph:
    """Deterministic seeded random graph.

    With ``component_hint`` >= 2 the nodes are partitioned into that many
    groups and no cross-group edge is ever drawn, which forces at least
    two connected components (a group may split further if sparse).
    """
    if max_weight < 1:
        raise NonPositiveWeightError(f"max_weight must be >= 1, got {max_weight}")
    if not 0 < edge_probability <= 1:
        raise GraphError(f"edge_probability must be in (0, 1], got {edge_probability}")
    rng = random.Random(seed)
    group = [0] * node_count
    if component_hint is not None and component_hint > 1:
        k = min(component_hint, node_count)
        order = list(range(node_count))
        rng.shuffle(order)
        for i, u in enumerate(order):
            group[u] = i % k
    edges = []
    for u in range(node_count):
        for v in range(u + 1, node_count):
            if group[u] != group[v]:
                continue
            if rng.random() < edge_probability:
                edges.append((u, v, rng.randint(1, max_weight)))
    return build_graph(edges, node_count, root_id)


# --- graph file format ------------------------------------------------------
#
# Line-oriented text, 0-based ids:
#   g <node_count> <root_id>
#   e <u> <v> <w>       (one line per edge)
#   # comment


def format_graph(g: WeightedGraph) -> str:
    lines = [f"g {g.node_count} {g.root_id}"]
    lines.extend(f"e {u} {v} {w}" for u, v, w in g.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> WeightedGraph:
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "g":
            if header is not None:
                raise GraphFormatError(f"line {lineno}: duplicate header")
            if len(fields) != 3:
                raise GraphFormatError(f"line {lineno}: expected 'g <node_count> <root_id>'")
            try:
                header = (int(fields[1]), int(fields[2]))
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: {exc}") from exc
        elif fields[0] == "e":
            if header is None:
                raise GraphFormatError(f"line {lineno}: edge before header")
            if len(fields) != 4:
                raise GraphFormatError(f"line {lineno}: expected 'e <u> <v> <w>'")
            try:
                edges.append((int(fields[1]), int(fields[2]), int(fields[3])))
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: {exc}") from exc
        else:
            raise GraphFormatError(f"line {lineno}: unknown record {fields[0]!r}")
    if header is None:
        raise GraphFormatError("missing 'g' header line")
    return build_graph(edges, header[0], header[1])


def load_graph(path) -> WeightedGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: WeightedGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))
