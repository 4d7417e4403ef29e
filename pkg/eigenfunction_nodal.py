"""
Eigenfunction Nodal

Eigenfunctions rebuilt from null vectors of I - S D(k), their real normal
form, exact zero counts per edge, nodal surpluses and the closed-form counts
for the dihedral graph.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

import secular_engine as engine
from graph_errors import (
    CommensurateTie,
    ComplexEigenfunction,
    DegenerateEigenvalue,
    IndexBeyondSpectrum,
    QuantumGraphError,
    ResidualTooLarge,
    VertexZero,
)
from metric_graph import FluxAssignment, MetricGraph, VertexCondition
from spectral_solver import SolverConfig, Spectrum, find_spectrum

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
VERTEX_ZERO_TOL = 1e-6
# zeros closer than this to a non-Dirichlet vertex belong to the vertex
VERTEX_MARGIN = 1e-9


@dataclass(eq=False)
class Eigenfunction:
    """
    f on edge e, x measured from its tail: a_e e^{ikx} + a_ebar e^{ik(L-x)},
    equivalently A_e cos(kx) + B_e sin(kx) with amplitudes[e] = (A_e, B_e).
    """

    k: float
    coefficients: np.ndarray
    amplitudes: np.ndarray
    index_n: int
    is_real_normalized: bool
    flux: FluxAssignment = field(default_factory=FluxAssignment)

    @property
    def eigenvalue(self) -> float:
        return self.k * self.k

    @property
    def edge_norms(self) -> np.ndarray:
        return np.hypot(np.abs(self.amplitudes[:, 0]), np.abs(self.amplitudes[:, 1]))

    @property
    def sup_norm(self) -> float:
        return float(self.edge_norms.max())


@dataclass
class NodalData:
    index_n: int
    phi: int
    surplus: int
    zero_positions: List[Tuple[int, float]]
    edge_counts: Tuple[int, ...]
    vanishes_on_vertex: bool = False
    vanishing_vertices: List[int] = field(default_factory=list)
    even_on_cycles: Optional[bool] = None


@dataclass(frozen=True)
class CycleZeroCount:
    edges: Tuple[int, ...]
    zeros: int

    @property
    def even(self) -> bool:
        return self.zeros % 2 == 0


@dataclass
class NodalEntry:
    n: int
    k: float
    phi: Optional[int]
    surplus: Optional[int]
    flags: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.flags


# coefficient forms

def _amplitudes(graph: MetricGraph, k: float, coefficients: np.ndarray) -> np.ndarray:
    count = graph.num_edges
    lengths = np.array([e.length for e in graph.edges])
    forward = coefficients[:count]
    backward = coefficients[count:] * np.exp(1j * k * lengths)
    return np.column_stack([forward + backward, 1j * (forward - backward)])


def _coefficients(graph: MetricGraph, k: float, amplitudes: np.ndarray) -> np.ndarray:
    lengths = np.array([e.length for e in graph.edges])
    A, B = amplitudes[:, 0], amplitudes[:, 1]
    forward = 0.5 * (A - 1j * B)
    backward = 0.5 * (A + 1j * B) * np.exp(-1j * k * lengths)
    return np.concatenate([forward, backward])


def _end_data(graph: MetricGraph, ef: Eigenfunction) -> List[Tuple[int, complex, complex]]:
    """(vertex, value, outgoing derivative) for both ends of every edge."""
    ends = []
    for edge, (A, B) in zip(graph.edges, ef.amplitudes):
        c, s = math.cos(ef.k * edge.length), math.sin(ef.k * edge.length)
        ends.append((edge.tail, A, ef.k * B))
        ends.append((edge.head, A * c + B * s, ef.k * (A * s - B * c)))
    return ends


def vertex_residuals(ef: Eigenfunction, graph: MetricGraph) -> Tuple[float, float]:
    """Largest continuity and current-conservation defects, relative to the sup norm."""
    scale = max(ef.sup_norm, 1e-300)
    by_vertex: Dict[int, List[Tuple[complex, complex]]] = {v: [] for v in graph.vertex_ids}
    for v, value, slope in _end_data(graph, ef):
        by_vertex[v].append((value, slope))

    continuity = 0.0
    current = 0.0
    for vertex in graph.vertices:
        values = [value for value, _ in by_vertex[vertex.id]]
        if vertex.condition is VertexCondition.DIRICHLET:
            continuity = max(continuity, max(abs(v) for v in values) / scale)
            continue
        continuity = max(continuity, max(abs(v - values[0]) for v in values) / scale)
        if ef.k > 0:
            total = sum(slope for _, slope in by_vertex[vertex.id])
            current = max(current, abs(total) / (ef.k * scale))
    return continuity, current


def _finish(graph: MetricGraph, k: float, amplitudes: np.ndarray, n: int, flux: FluxAssignment, rotate: bool) -> Eigenfunction:
    flat = amplitudes.ravel()
    pivot = flat[int(np.argmax(np.abs(flat)))]
    if rotate:
        amplitudes = amplitudes * (abs(pivot) / pivot)
    norm = np.hypot(np.abs(amplitudes[:, 0]), np.abs(amplitudes[:, 1])).max()
    amplitudes = amplitudes / norm
    imaginary = float(np.abs(amplitudes.imag).max())
    is_real = flux.is_zero() and imaginary < RESIDUAL_TOL
    if is_real:
        amplitudes = amplitudes.real.astype(complex)
    ef = Eigenfunction(
        k=float(k),
        coefficients=_coefficients(graph, k, amplitudes),
        amplitudes=amplitudes,
        index_n=n,
        is_real_normalized=is_real,
        flux=flux,
    )
    if flux.is_zero():
        continuity, current = vertex_residuals(ef, graph)
        residual = max(continuity, current)
        if residual > RESIDUAL_TOL:
            raise ResidualTooLarge(residual, RESIDUAL_TOL)
    return ef


def _zero_mode_basis(graph: MetricGraph, spectrum: Spectrum, n: int) -> List[Eigenfunction]:
    # constants on every component carrying a zero mode
    basis = engine.cycle_basis(graph)
    flux = spectrum.flux.canonical()
    trapped = {graph.edges[chord].tail for chord, alpha in zip(basis.chords, flux.values) if abs(alpha) > 1e-12}
    functions = []
    for component in graph.components():
        if any(graph.condition(v) is VertexCondition.DIRICHLET for v in component):
            continue
        if any(v in trapped for v in component):
            continue
        amplitudes = np.zeros((graph.num_edges, 2), dtype=complex)
        for e in graph.component_edges(component):
            amplitudes[e, 0] = 1.0
        functions.append(_finish(graph, 0.0, amplitudes, n, spectrum.flux, rotate=False))
    return functions


def _check_index(spectrum: Spectrum, n: int) -> None:
    if not 1 <= n <= spectrum.total_count:
        raise IndexBeyondSpectrum(n, spectrum.total_count)


def reconstruct_basis(graph: MetricGraph, spectrum: Spectrum, n: int) -> List[Eigenfunction]:
    """
    Basis of the eigenspace holding the n-th eigenvalue (1-based, multiplicities expanded).

    At zero flux the basis is real: real and imaginary parts of the null
    vectors' amplitude forms are orthogonalized and the leading directions kept.
    """
    _check_index(spectrum, n)
    _, root = spectrum.index_of(n)
    if root is None:
        return _zero_mode_basis(graph, spectrum, n)

    vectors = engine.null_space(graph, root.k, spectrum.flux, tol=spectrum.config.null_tol)
    forms = [_amplitudes(graph, root.k, v) for v in vectors]
    if len(forms) > 1 and spectrum.flux.is_zero():
        stacked = np.array([f.ravel() for f in forms])
        _, _, vh = la.svd(np.vstack([stacked.real, stacked.imag]))
        forms = [vh[i].reshape(-1, 2).astype(complex) for i in range(len(forms))]
    return [_finish(graph, root.k, f, n, spectrum.flux, rotate=True) for f in forms]


def reconstruct(graph: MetricGraph, spectrum: Spectrum, n: int) -> Eigenfunction:
    """
    The n-th eigenfunction (1-based, multiplicities expanded), phase-rotated
    to real form and scaled to unit sup norm.
    """
    _check_index(spectrum, n)
    _, root = spectrum.index_of(n)
    multiplicity = spectrum.lambda0_multiplicity if root is None else root.multiplicity
    if multiplicity > 1:
        raise DegenerateEigenvalue(n, multiplicity)
    basis = reconstruct_basis(graph, spectrum, n)
    if len(basis) != 1:
        raise DegenerateEigenvalue(n, len(basis))
    return basis[0]


def evaluate(ef: Eigenfunction, graph: MetricGraph, edge: int, x: Union[float, np.ndarray]) -> Union[float, complex, np.ndarray]:
    A, B = ef.amplitudes[graph.edge(edge).id]
    value = A * np.cos(ef.k * np.asarray(x)) + B * np.sin(ef.k * np.asarray(x))
    return value.real if ef.is_real_normalized else value


def vertex_values(ef: Eigenfunction, graph: MetricGraph) -> Dict[int, complex]:
    """Mean of the edge-end values at every vertex."""
    sums: Dict[int, List[complex]] = {v: [] for v in graph.vertex_ids}
    for v, value, _ in _end_data(graph, ef):
        sums[v].append(value)
    return {v: complex(np.mean(values)) for v, values in sums.items()}


# zero counting

def _edge_zeros(k: float, A: float, B: float, lo: float, hi: float) -> List[float]:
    # A cos(kx) + B sin(kx) = R cos(kx - theta) vanishes at kx = theta + pi/2 + m pi
    if k <= 0 or hi <= lo or math.hypot(A, B) == 0.0:
        return []
    theta = math.atan2(B, A)
    first = math.ceil((k * lo - theta - math.pi / 2) / math.pi)
    last = math.floor((k * hi - theta - math.pi / 2) / math.pi)
    return [(theta + math.pi / 2 + m * math.pi) / k for m in range(first, last + 1)]


def count_zeros(ef: Eigenfunction, graph: MetricGraph, strict: bool = True) -> NodalData:
    """
    Interior zeros of a real eigenfunction, edge by edge.

    Zeros at Dirichlet leaves are not counted. With strict, an eigenfunction
    vanishing at a non-Dirichlet vertex raises VertexZero; otherwise the
    vertices are listed in the result.
    """
    if not ef.is_real_normalized:
        raise ComplexEigenfunction(ef.index_n)

    norm = ef.sup_norm
    vanishing = []
    for vertex_id, value in vertex_values(ef, graph).items():
        if graph.condition(vertex_id) is VertexCondition.DIRICHLET:
            continue
        if abs(value) < VERTEX_ZERO_TOL * norm:
            if strict:
                raise VertexZero(vertex_id, abs(value))
            vanishing.append(vertex_id)

    positions: List[Tuple[int, float]] = []
    counts = []
    for edge, (A, B) in zip(graph.edges, ef.amplitudes.real):
        lo = _margin(graph, edge.tail, ef.k)
        hi = edge.length - _margin(graph, edge.head, ef.k)
        zeros = _edge_zeros(ef.k, float(A), float(B), lo, hi)
        counts.append(len(zeros))
        positions.extend((edge.id, x) for x in zeros)

    phi = len(positions)
    nodal = NodalData(
        index_n=ef.index_n,
        phi=phi,
        surplus=phi - (ef.index_n - 1),
        zero_positions=positions,
        edge_counts=tuple(counts),
        vanishes_on_vertex=bool(vanishing),
        vanishing_vertices=vanishing,
    )
    if not vanishing:
        nodal.even_on_cycles = all(c.even for c in cycle_zero_counts(nodal, graph))
    return nodal


def _margin(graph: MetricGraph, vertex: int, k: float) -> float:
    if graph.condition(vertex) is VertexCondition.DIRICHLET:
        return 1e-6 / max(k, 1.0)
    return VERTEX_MARGIN


def count_sign_changes(ef: Eigenfunction, graph: MetricGraph, points: int = 10_000) -> int:
    """Dense-grid cross-check of count_zeros: sign changes of f sampled on every edge."""
    total = 0
    for edge in graph.edges:
        lo = _margin(graph, edge.tail, ef.k)
        hi = edge.length - _margin(graph, edge.head, ef.k)
        values = np.asarray(evaluate(ef, graph, edge.id, np.linspace(lo, hi, points)), dtype=float)
        total += int(np.count_nonzero(values[:-1] * values[1:] < 0))
    return total


def cycle_zero_counts(nodal: NodalData, graph: MetricGraph, basis=None) -> List[CycleZeroCount]:
    """Zeros on every basis cycle and on the symmetric difference of every pair of them."""
    basis = basis or engine.cycle_basis(graph)
    cycles = [frozenset(basis.cycle_edges(i, graph.num_edges)) for i in range(basis.beta)]
    for first, second in combinations(range(len(cycles)), 2):
        cycles.append(cycles[first] ^ cycles[second])
    return [
        CycleZeroCount(edges=tuple(sorted(c)), zeros=sum(nodal.edge_counts[e] for e in c))
        for c in cycles
    ]


def nodal_surplus_profile(
    graph: MetricGraph,
    k_max: float,
    config: Optional[SolverConfig] = None,
    spectrum: Optional[Spectrum] = None,
) -> List[NodalEntry]:
    """Zero count and surplus of every eigenfunction up to k_max; skipped indices carry flags."""
    spectrum = spectrum or find_spectrum(graph, k_max=k_max, config=config)
    entries = []
    for n in range(1, spectrum.total_count + 1):
        _, root = spectrum.index_of(n)
        k = 0.0 if root is None else root.k
        try:
            nodal = count_zeros(reconstruct(graph, spectrum, n), graph)
        except DegenerateEigenvalue:
            entries.append(NodalEntry(n, k, None, None, ["degenerate"]))
            continue
        except VertexZero as exc:
            logger.info("n=%d skipped: %s", n, exc.message)
            entries.append(NodalEntry(n, k, None, None, ["vertex-zero"]))
            continue
        except QuantumGraphError as exc:
            logger.warning("n=%d skipped: %s", n, exc.message)
            entries.append(NodalEntry(n, k, None, None, [type(exc).__name__]))
            continue
        flags = [] if nodal.even_on_cycles is not False else ["odd-cycle"]
        entries.append(NodalEntry(n, k, nodal.phi, nodal.surplus, flags))
    return entries


# closed-form counts

def dihedral_nodal_formula(a: float, b: float, c: float, n: int) -> int:
    """Printed closed form n - mod2(floor((b + c) n / (a + b + c)))."""
    return n - (math.floor((b + c) * n / (a + b + c)) % 2)


def dihedral_nodal_count(a: float, b: float, c: float, n: int) -> int:
    """Zero count n - mod2(n - N1) with N1 = floor(a n / (a + b + c)), the split between the two interval spectra."""
    split = math.floor(a * n / (a + b + c))
    return n - ((n - split) % 2)


def students_count(alpha: float, beta_param: float, n: int, strict: bool = True) -> int:
    """
    #{i/alpha <= lambda} when {i/alpha} u {j/beta_param} has n - 1 elements <= lambda.

    Equals floor(alpha n / (alpha + beta_param)); an integer ratio means a tie
    in the merged set and raises CommensurateTie under strict.
    """
    ratio = alpha * n / (alpha + beta_param)
    if strict and abs(ratio - round(ratio)) < 1e-12 * max(1.0, ratio):
        raise CommensurateTie(alpha, beta_param, n)
    return math.floor(ratio)


def students_count_bruteforce(alpha: float, beta_param: float, n: int) -> int:
    first = np.arange(1, n + 1) / alpha
    merged = np.sort(np.concatenate([first, np.arange(1, n + 1) / beta_param]))
    if n == 1:
        return 0
    level = merged[n - 2]
    return int(np.count_nonzero(first <= level))


if __name__ == "__main__":
    from metric_graph import build_graph

    interval = build_graph([0, 1], [(0, 1, 1.0)], {0: "dirichlet", 1: "dirichlet"})
    spectrum = find_spectrum(interval, k_max=12.0)
    for n in range(1, spectrum.total_count + 1):
        print(n, count_zeros(reconstruct(interval, spectrum, n), interval).phi)
