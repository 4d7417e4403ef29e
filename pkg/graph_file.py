"""
Graph File

Line-oriented text format for metric graphs with optional fluxes.

    # comment (anywhere after '#')
    [vertices]
    <id> [neumann|dirichlet]        # condition defaults to neumann
    [edges]
    <id> <vertex> <vertex> <length>
    [fluxes]
    <chord edge id> <value>

Edge ids must be 0 .. |E|-1, each once, in any order. Fluxes name edges that
are chords of the fundamental cycle basis; chords without a line get flux 0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import secular_engine as engine
from graph_errors import FluxDimensionMismatch, GraphSemanticError, GraphSyntaxError, GraphValidationError
from metric_graph import FluxAssignment, MetricGraph, VertexCondition, build_graph

logger = logging.getLogger(__name__)

SECTIONS = ("vertices", "edges", "fluxes")


@dataclass
class _Token:
    text: str
    col: int


@dataclass
class _Document:
    vertices: List[Tuple[int, int, VertexCondition]] = field(default_factory=list)
    edges: List[Tuple[int, int, int, int, float]] = field(default_factory=list)
    fluxes: List[Tuple[int, int, float]] = field(default_factory=list)


def _tokens(line: str) -> List[_Token]:
    body = line.split("#", 1)[0]
    tokens, col = [], 0
    for text in body.split():
        col = body.index(text, col)
        tokens.append(_Token(text, col + 1))
        col += len(text)
    return tokens


def _integer(token: _Token, line: int, what: str) -> int:
    try:
        return int(token.text)
    except ValueError:
        raise GraphSyntaxError(line, token.col, f"expected integer {what}, got {token.text!r}") from None


def _real(token: _Token, line: int, what: str) -> float:
    try:
        return float(token.text)
    except ValueError:
        raise GraphSyntaxError(line, token.col, f"expected number {what}, got {token.text!r}") from None


def _arity(tokens: List[_Token], line: int, low: int, high: int, section: str) -> None:
    if low <= len(tokens) <= high:
        return
    col = tokens[high].col if len(tokens) > high else tokens[-1].col + len(tokens[-1].text)
    expected = str(low) if low == high else f"{low} or {high}"
    raise GraphSyntaxError(line, col, f"{section} line takes {expected} fields, got {len(tokens)}")


def _read(text: str) -> _Document:
    document = _Document()
    section: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = _tokens(raw)
        if not tokens:
            continue
        head = tokens[0]
        if head.text.startswith("["):
            name = head.text.strip("[]").lower()
            if not head.text.endswith("]") or name not in SECTIONS or len(tokens) > 1:
                raise GraphSyntaxError(number, head.col, f"unknown section header {raw.strip()!r}")
            section = name
            continue
        if section is None:
            raise GraphSyntaxError(number, head.col, "content before the first section header")

        if section == "vertices":
            _arity(tokens, number, 1, 2, "vertex")
            vertex = _integer(tokens[0], number, "vertex id")
            condition = VertexCondition.NEUMANN
            if len(tokens) == 2:
                try:
                    condition = VertexCondition.parse(tokens[1].text)
                except ValueError:
                    raise GraphSyntaxError(number, tokens[1].col, f"unknown condition {tokens[1].text!r}") from None
            document.vertices.append((number, vertex, condition))
        elif section == "edges":
            _arity(tokens, number, 4, 4, "edge")
            document.edges.append(
                (
                    number,
                    _integer(tokens[0], number, "edge id"),
                    _integer(tokens[1], number, "vertex id"),
                    _integer(tokens[2], number, "vertex id"),
                    _real(tokens[3], number, "length"),
                )
            )
        else:
            _arity(tokens, number, 2, 2, "flux")
            document.fluxes.append((number, _integer(tokens[0], number, "edge id"), _real(tokens[1], number, "flux")))
    return document


def parse_graph_file(text: str) -> Tuple[MetricGraph, Optional[FluxAssignment]]:
    """
    Parse a graph description.

    Returns the validated graph and the flux assignment, or None when the
    file has no [fluxes] lines. Raises GraphSyntaxError for malformed lines
    and GraphSemanticError for bad references or lengths.
    """
    document = _read(text)
    if not document.edges:
        raise GraphSemanticError(len(text.splitlines()), "no edges declared")

    seen: Dict[int, int] = {}
    conditions: Dict[int, VertexCondition] = {}
    for line, vertex, condition in document.vertices:
        if vertex in seen:
            raise GraphSemanticError(line, f"vertex {vertex} already declared on line {seen[vertex]}")
        seen[vertex] = line
        conditions[vertex] = condition

    by_id: Dict[int, Tuple[int, int, int, float]] = {}
    for line, edge, u, w, length in document.edges:
        if edge in by_id:
            raise GraphSemanticError(line, f"edge {edge} already declared on line {by_id[edge][0]}")
        for end in (u, w):
            if end not in conditions:
                raise GraphSemanticError(line, f"edge {edge} references undeclared vertex {end}")
        if not (math.isfinite(length) and length > 0):
            raise GraphSemanticError(line, f"edge {edge} has non-positive length {length!r}")
        by_id[edge] = (line, u, w, length)
    if sorted(by_id) != list(range(len(by_id))):
        missing = sorted(set(range(len(by_id))) - set(by_id))
        line = document.edges[-1][0]
        raise GraphSemanticError(line, f"edge ids must be 0..{len(by_id) - 1}; missing {missing}")

    try:
        graph = build_graph(
            [v for _, v, _ in document.vertices],
            [by_id[e][1:] for e in range(len(by_id))],
            conditions,
        )
    except GraphValidationError as exc:
        line = seen.get(exc.context.get("vertex"), document.vertices[-1][0] if document.vertices else 1)
        raise GraphSemanticError(line, exc.message) from exc

    if not document.fluxes:
        return graph, None
    basis = engine.cycle_basis(graph)
    values = [0.0] * basis.beta
    assigned: Dict[int, int] = {}
    for line, edge, value in document.fluxes:
        if edge not in basis.chords:
            raise GraphSemanticError(
                line, f"edge {edge} is not a chord of the cycle basis; chords are {list(basis.chords)}"
            )
        if edge in assigned:
            raise GraphSemanticError(line, f"flux on edge {edge} already given on line {assigned[edge]}")
        if not math.isfinite(value):
            raise GraphSemanticError(line, f"flux on edge {edge} is not finite")
        assigned[edge] = line
        values[basis.chords.index(edge)] = value
    logger.debug("Parsed graph %s with fluxes %s", graph.summary(), values)
    return graph, FluxAssignment(tuple(values))


def read_graph_file(path: str, encoding: str = "utf-8") -> Tuple[MetricGraph, Optional[FluxAssignment]]:
    with open(path, "r", encoding=encoding) as handle:
        return parse_graph_file(handle.read())


def load_problem(path: str, flux: Optional[Sequence[float]] = None) -> Tuple[MetricGraph, FluxAssignment]:
    """Graph and flux of a file; an explicit flux overrides the file's [fluxes] section."""
    graph, file_flux = read_graph_file(path)
    beta = engine.cycle_basis(graph).beta
    if flux is not None:
        if len(flux) != beta:
            raise FluxDimensionMismatch(beta, len(flux))
        return graph, FluxAssignment(tuple(flux))
    return graph, file_flux or FluxAssignment.zero(beta)


def serialize_graph(graph: MetricGraph, flux: Optional[FluxAssignment] = None) -> str:
    """Inverse of parse_graph_file; floats use their shortest round-tripping repr."""
    lines = ["[vertices]"]
    lines.extend(f"{v.id} {v.condition.value}" for v in graph.vertices)
    lines.append("[edges]")
    lines.extend(f"{e.id} {e.tail} {e.head} {e.length!r}" for e in graph.edges)
    if flux is not None and len(flux):
        lines.append("[fluxes]")
        chords = engine.cycle_basis(graph).chords
        lines.extend(f"{chord} {float(value)!r}" for chord, value in zip(chords, flux.values))
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    sample = """
    # 3-star with one Dirichlet leaf
    [vertices]
    0
    1 dirichlet
    2
    3
    [edges]
    0 0 1 1.0
    1 0 2 1.5
    2 0 3 2.0
    """
    star, _ = parse_graph_file(sample)
    print(star.summary())
    print(serialize_graph(star))
