"""
Metric Graph

Immutable model of a compact metric graph: vertices with Neumann or Dirichlet
conditions, edges with lengths, the directed bond table and the fundamental
cycle basis that carries magnetic fluxes.

Every builder operation is a pure function returning a new graph. A Dirichlet
vertex of degree d >= 2 is always split into d Dirichlet leaves, so downstream
code only ever sees Dirichlet conditions at degree one.
"""

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from graph_errors import (
    DanglingEndpoint,
    DuplicateVertex,
    EmptyGraph,
    GraphValidationError,
    IsolatedVertex,
    NonPositiveLength,
    NotNeumann,
    SameVertex,
    UnknownEdge,
    UnknownVertex,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


class VertexCondition(str, Enum):
    NEUMANN = "neumann"
    DIRICHLET = "dirichlet"

    @classmethod
    def parse(cls, value: Union["VertexCondition", str]) -> "VertexCondition":
        if isinstance(value, VertexCondition):
            return value
        text = str(value).strip().lower()
        if text in ("n", "neumann", "kirchhoff"):
            return cls.NEUMANN
        if text in ("d", "dirichlet"):
            return cls.DIRICHLET
        raise ValueError(f"Unknown vertex condition: {value!r}")


@dataclass(frozen=True)
class Vertex:
    id: int
    condition: VertexCondition
    degree: int


@dataclass(frozen=True)
class Edge:
    """Edge directed from the lower to the higher vertex id (tail <= head)."""

    id: int
    tail: int
    head: int
    length: float

    @property
    def endpoints(self) -> Tuple[int, int]:
        return (self.tail, self.head)

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class Bond:
    """Directed edge. Bond e runs tail -> head of edge e, bond e + |E| runs back."""

    id: int
    edge: int
    reversal: int
    origin: int
    terminus: int
    length: float


@dataclass(frozen=True)
class FluxAssignment:
    """Magnetic fluxes, one per chord of the fundamental cycle basis."""

    values: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def zero(cls, beta: int) -> "FluxAssignment":
        return cls(tuple(0.0 for _ in range(beta)))

    @classmethod
    def of(cls, flux: Union["FluxAssignment", Sequence[float], None], beta: int) -> "FluxAssignment":
        """Normalize None, a plain sequence or an assignment; None means zero flux."""
        if flux is None:
            return cls.zero(beta)
        if isinstance(flux, FluxAssignment):
            return flux
        return cls(tuple(flux))

    def __len__(self) -> int:
        return len(self.values)

    def canonical(self) -> "FluxAssignment":
        """Representative with every value in [-pi, pi]."""
        return FluxAssignment(tuple(math.remainder(v, TWO_PI) for v in self.values))

    def negated(self) -> "FluxAssignment":
        return FluxAssignment(tuple(-v for v in self.values))

    def is_time_reversal_symmetric(self, tol: float = 1e-12) -> bool:
        """True when every flux is 0 or pi modulo 2*pi."""
        for value in self.canonical().values:
            if min(abs(value), abs(abs(value) - math.pi)) > tol:
                return False
        return True

    def is_zero(self, tol: float = 1e-12) -> bool:
        return all(abs(v) <= tol for v in self.canonical().values)


@dataclass(frozen=True)
class MetricGraph:
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]
    bonds: Tuple[Bond, ...]
    total_length: float

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def num_bonds(self) -> int:
        return len(self.bonds)

    @property
    def vertex_ids(self) -> Tuple[int, ...]:
        return tuple(v.id for v in self.vertices)

    @cached_property
    def _vertex_index(self) -> Dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def _outgoing(self) -> Dict[int, Tuple[int, ...]]:
        table: Dict[int, List[int]] = {v.id: [] for v in self.vertices}
        for bond in self.bonds:
            table[bond.origin].append(bond.id)
        return {v: tuple(bonds) for v, bonds in table.items()}

    def vertex(self, vertex_id: int) -> Vertex:
        try:
            return self._vertex_index[vertex_id]
        except KeyError:
            raise UnknownVertex(vertex_id) from None

    def has_vertex(self, vertex_id: int) -> bool:
        return vertex_id in self._vertex_index

    def condition(self, vertex_id: int) -> VertexCondition:
        return self.vertex(vertex_id).condition

    def edge(self, edge_id: int) -> Edge:
        if not 0 <= edge_id < self.num_edges:
            raise UnknownEdge(edge_id)
        return self.edges[edge_id]

    def outgoing(self, vertex_id: int) -> Tuple[int, ...]:
        """Bonds whose origin is the vertex; loops contribute both directions."""
        self.vertex(vertex_id)
        return self._outgoing[vertex_id]

    def dirichlet_vertices(self) -> List[int]:
        return [v.id for v in self.vertices if v.condition is VertexCondition.DIRICHLET]

    def to_networkx(self) -> nx.MultiGraph:
        multigraph = nx.MultiGraph()
        for v in self.vertices:
            multigraph.add_node(v.id, condition=v.condition.value)
        for e in self.edges:
            multigraph.add_edge(e.tail, e.head, key=e.id, length=e.length)
        return multigraph

    def components(self) -> List[FrozenSet[int]]:
        """Connected components ordered by their smallest vertex id."""
        parts = [frozenset(c) for c in nx.connected_components(self.to_networkx())]
        return sorted(parts, key=min)

    def component_edges(self, component: FrozenSet[int]) -> List[int]:
        return [e.id for e in self.edges if e.tail in component]

    @property
    def beta(self) -> int:
        return self.num_edges - self.num_vertices + len(self.components())

    def summary(self) -> Dict[str, object]:
        return {
            "vertices": self.num_vertices,
            "edges": self.num_edges,
            "dirichlet_vertices": len(self.dirichlet_vertices()),
            "components": len(self.components()),
            "beta": self.beta,
            "total_length": self.total_length,
        }


@dataclass(frozen=True)
class CycleBasis:
    beta: int
    cycles: Tuple[Tuple[int, ...], ...]
    chords: Tuple[int, ...]
    tree_edges: Tuple[int, ...]

    def cycle_edges(self, index: int, num_edges: int) -> Tuple[int, ...]:
        return tuple(b % num_edges for b in self.cycles[index])


# building

RawEdge = List[Union[int, float]]


def build_graph(
    vertices: Iterable[int],
    edges: Iterable[Sequence],
    conditions: Optional[Mapping[int, Union[VertexCondition, str]]] = None,
) -> MetricGraph:
    """
    Validate and assemble a metric graph.

    Args:
        vertices: Vertex ids (any distinct integers)
        edges: (u, v, length) triples; edge ids follow the given order
        conditions: Vertex id -> condition; unlisted vertices are Neumann
    """
    vertex_ids: List[int] = []
    declared = set()
    for v in vertices:
        v = int(v)
        if v in declared:
            raise DuplicateVertex(v)
        declared.add(v)
        vertex_ids.append(v)

    raw_edges: List[RawEdge] = []
    for index, edge in enumerate(edges):
        u, w, length = edge
        length = float(length)
        if not math.isfinite(length) or length <= 0:
            raise NonPositiveLength(index, length)
        for end in (u, w):
            if int(end) not in declared:
                raise DanglingEndpoint(index, int(end))
        raw_edges.append([int(u), int(w), length])
    if not raw_edges:
        raise EmptyGraph()

    cond = {v: VertexCondition.NEUMANN for v in vertex_ids}
    for v, c in (conditions or {}).items():
        if int(v) not in declared:
            raise UnknownVertex(int(v))
        cond[int(v)] = VertexCondition.parse(c)

    degree = _degrees(raw_edges)
    for v in vertex_ids:
        if degree[v] == 0:
            raise IsolatedVertex(v)

    _split_dirichlet(cond, raw_edges, degree)
    return _assemble(cond, raw_edges)


def _degrees(raw_edges: List[RawEdge]) -> Counter:
    degree: Counter = Counter()
    for u, w, _ in raw_edges:
        degree[u] += 1
        degree[w] += 1
    return degree


def _split_dirichlet(cond: Dict[int, VertexCondition], raw_edges: List[RawEdge], degree: Counter) -> None:
    # the first incident edge end keeps the id, later ends get fresh ids
    next_id = max(cond) + 1
    for v in sorted(cond):
        if cond[v] is not VertexCondition.DIRICHLET or degree[v] < 2:
            continue
        first = True
        for edge in raw_edges:
            for end in (0, 1):
                if edge[end] != v:
                    continue
                if first:
                    first = False
                    continue
                edge[end] = next_id
                cond[next_id] = VertexCondition.DIRICHLET
                next_id += 1
        logger.debug("Split Dirichlet vertex %d of degree %d into leaves", v, degree[v])


def _assemble(cond: Dict[int, VertexCondition], raw_edges: List[RawEdge]) -> MetricGraph:
    edges = tuple(
        Edge(id=i, tail=min(u, w), head=max(u, w), length=float(length)) for i, (u, w, length) in enumerate(raw_edges)
    )
    count = len(edges)
    forward = [Bond(e.id, e.id, e.id + count, e.tail, e.head, e.length) for e in edges]
    backward = [Bond(e.id + count, e.id, e.id, e.head, e.tail, e.length) for e in edges]
    degree = _degrees([[e.tail, e.head, e.length] for e in edges])
    vertices = tuple(Vertex(v, cond[v], degree[v]) for v in sorted(cond))
    return MetricGraph(
        vertices=vertices,
        edges=edges,
        bonds=tuple(forward + backward),
        total_length=math.fsum(e.length for e in edges),
    )


def _raw(graph: MetricGraph) -> Tuple[List[int], List[RawEdge], Dict[int, VertexCondition]]:
    return (
        list(graph.vertex_ids),
        [[e.tail, e.head, e.length] for e in graph.edges],
        {v.id: v.condition for v in graph.vertices},
    )


def _other_end(edge: RawEdge, v: int) -> int:
    return edge[1] if edge[0] == v else edge[0]


# builder operations

def suppress_degree2_neumann(graph: MetricGraph) -> MetricGraph:
    """Fuse the two edges at every Neumann vertex of degree 2 into one edge."""
    _, raw_edges, cond = _raw(graph)
    fused = 0
    while True:
        degree = _degrees(raw_edges)
        candidate = None
        for v in sorted(cond, reverse=True):
            if cond[v] is not VertexCondition.NEUMANN or degree[v] != 2:
                continue
            incident = [i for i, e in enumerate(raw_edges) if e[0] == v or e[1] == v]
            if len(incident) == 2:
                candidate = (v, incident[0], incident[1])
                break
        if candidate is None:
            break
        v, first, second = candidate
        u = _other_end(raw_edges[first], v)
        w = _other_end(raw_edges[second], v)
        raw_edges[first] = [u, w, raw_edges[first][2] + raw_edges[second][2]]
        del raw_edges[second]
        del cond[v]
        fused += 1

    if fused == 0:
        return graph
    logger.debug("Suppressed %d degree-2 Neumann vertices", fused)
    return build_graph(sorted(cond), raw_edges, cond)


def fundamental_cycles(graph: MetricGraph) -> CycleBasis:
    """
    Fundamental cycle basis from a BFS spanning forest.

    Each component is searched from its lowest vertex; incident edges are
    visited in edge id order, so among parallel edges the lowest id joins the
    tree. Every chord closes one cycle: its forward bond followed by the tree
    path back to its tail.
    """
    multigraph = graph.to_networkx()
    tree = nx.Graph()
    tree.add_nodes_from(multigraph.nodes)
    tree_edges: List[int] = []

    for component in graph.components():
        root = min(component)
        visited = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for _, w, key in sorted(multigraph.edges(v, keys=True), key=lambda item: item[2]):
                if w in visited:
                    continue
                visited.add(w)
                tree.add_edge(v, w, edge=key)
                tree_edges.append(key)
                queue.append(w)

    in_tree = set(tree_edges)
    chords = [e.id for e in graph.edges if e.id not in in_tree]
    count = graph.num_edges
    cycles = []
    for chord in chords:
        edge = graph.edges[chord]
        walk = [chord]
        if not edge.is_loop:
            path = nx.shortest_path(tree, edge.head, edge.tail)
            for x, y in zip(path, path[1:]):
                step = graph.edges[tree[x][y]["edge"]]
                walk.append(step.id if step.tail == x else step.id + count)
        cycles.append(tuple(walk))

    return CycleBasis(
        beta=graph.beta,
        cycles=tuple(cycles),
        chords=tuple(chords),
        tree_edges=tuple(sorted(tree_edges)),
    )


def modify_condition(
    graph: MetricGraph, vertex: int, new_condition: Union[VertexCondition, str]
) -> MetricGraph:
    vertex_ids, raw_edges, cond = _raw(graph)
    if vertex not in cond:
        raise UnknownVertex(vertex)
    cond[vertex] = VertexCondition.parse(new_condition)
    return build_graph(vertex_ids, raw_edges, cond)


def merge_vertices(graph: MetricGraph, v1: int, v2: int) -> MetricGraph:
    """Glue two Neumann vertices into one; the lower id survives."""
    _, raw_edges, cond = _raw(graph)
    for v in (v1, v2):
        if v not in cond:
            raise UnknownVertex(v)
    if v1 == v2:
        raise SameVertex(v1)
    for v in (v1, v2):
        if cond[v] is not VertexCondition.NEUMANN:
            raise NotNeumann(v)
    keep, drop = sorted((v1, v2))
    for edge in raw_edges:
        for end in (0, 1):
            if edge[end] == drop:
                edge[end] = keep
    del cond[drop]
    return build_graph(sorted(cond), raw_edges, cond)


def detach_edge_end(graph: MetricGraph, edge_id: int, vertex: int) -> Tuple[MetricGraph, int]:
    """
    Cut one end of an edge off a vertex onto a new Neumann leaf.

    Returns the new graph and the id of the new vertex. Merging the new
    vertex back into the old one restores the original graph.
    """
    vertex_ids, raw_edges, cond = _raw(graph)
    edge = graph.edge(edge_id)
    if vertex not in cond:
        raise UnknownVertex(vertex)
    if vertex not in edge.endpoints:
        raise GraphValidationError(f"Edge {edge_id} is not incident to vertex {vertex}", edge=edge_id, vertex=vertex)
    new_id = max(cond) + 1
    end = 0 if edge.tail == vertex else 1
    raw_edges[edge_id][end] = new_id
    cond[new_id] = VertexCondition.NEUMANN
    return build_graph(vertex_ids + [new_id], raw_edges, cond), new_id


def disjoint_union(*graphs: MetricGraph) -> Tuple[MetricGraph, List[Dict[int, int]]]:
    """Union with vertex ids shifted to be disjoint; returns the per-graph id maps."""
    if not graphs:
        raise EmptyGraph()
    cond: Dict[int, VertexCondition] = {}
    raw_edges: List[RawEdge] = []
    maps: List[Dict[int, int]] = []
    offset = 0
    for graph in graphs:
        shift = offset - min(graph.vertex_ids)
        mapping = {v: v + shift for v in graph.vertex_ids}
        for v in graph.vertices:
            cond[mapping[v.id]] = v.condition
        raw_edges.extend([mapping[e.tail], mapping[e.head], e.length] for e in graph.edges)
        offset = max(mapping.values()) + 1
        maps.append(mapping)
    return build_graph(sorted(cond), raw_edges, cond), maps


if __name__ == "__main__":
    # Manual check: 3-mandarin
    mandarin = build_graph([0, 1], [(0, 1, 1.0), (0, 1, 2.0), (0, 1, 3.0)])
    print(mandarin.summary())
    print(fundamental_cycles(mandarin))
