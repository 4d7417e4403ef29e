"""
Secular Engine

Bond scattering matrix S, phase matrix D(k; flux), the secular determinant
Sigma(k) = det(I - S D(k)), its real rescaling zeta(k) and the null space of
I - S D(k).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la

from graph_errors import DetSMismatch, FluxDimensionMismatch, NoNullVector
from metric_graph import CycleBasis, FluxAssignment, MetricGraph, VertexCondition, fundamental_cycles

logger = logging.getLogger(__name__)

FluxLike = Union[FluxAssignment, Sequence[float], None]

# bound on batch size * m * m complex entries held at once
_BATCH_ENTRIES = 1 << 22


@dataclass(frozen=True)
class BondMatrices:
    S: np.ndarray
    det_S: int
    bond_order: Tuple[int, ...]

    @property
    def sqrt_det_S(self) -> complex:
        return 1.0 + 0.0j if self.det_S == 1 else 1.0j


@dataclass(frozen=True)
class PhaseMatrix:
    k: float
    entries: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.diag(self.entries)


@dataclass(frozen=True)
class SecularValue:
    k: float
    sigma: complex
    zeta: float
    residual_imag: float


def expected_det_S(graph: MetricGraph) -> int:
    """(-1)^(|E| - |V| + n) with n the number of Dirichlet leaves."""
    exponent = graph.num_edges - graph.num_vertices + len(graph.dirichlet_vertices())
    return -1 if exponent % 2 else 1


@lru_cache(maxsize=256)
def scattering_matrix(graph: MetricGraph) -> BondMatrices:
    """
    Bond scattering matrix with rows and columns in bond id order
    [0, .., |E|-1, 0bar, .., (|E|-1)bar].

    S[j', j] = 2/d - delta(j' = reversal(j)) for every j' leaving the Neumann
    terminus of j; a Dirichlet leaf reflects with amplitude -1.
    """
    m = graph.num_bonds
    S = np.zeros((m, m))
    for bond in graph.bonds:
        terminus = graph.vertex(bond.terminus)
        if terminus.condition is VertexCondition.DIRICHLET:
            S[bond.reversal, bond.id] = -1.0
            continue
        for follower in graph.outgoing(terminus.id):
            S[follower, bond.id] = 2.0 / terminus.degree - (1.0 if follower == bond.reversal else 0.0)

    det = float(la.det(S))
    det_S = int(round(det))
    if det_S not in (-1, 1) or abs(det - det_S) > 1e-9:
        raise DetSMismatch(det, expected_det_S(graph))
    S.setflags(write=False)
    return BondMatrices(S=S, det_S=det_S, bond_order=tuple(range(m)))


@lru_cache(maxsize=256)
def cycle_basis(graph: MetricGraph) -> CycleBasis:
    return fundamental_cycles(graph)


def bond_lengths(graph: MetricGraph) -> np.ndarray:
    return np.array([b.length for b in graph.bonds])


def bond_phases(graph: MetricGraph, flux: FluxLike = None) -> np.ndarray:
    """Magnetic phase of every bond, with each flux placed on its chord."""
    basis = cycle_basis(graph)
    flux = FluxAssignment.of(flux, basis.beta)
    if len(flux) != basis.beta:
        raise FluxDimensionMismatch(basis.beta, len(flux))
    theta = np.zeros(graph.num_bonds)
    for chord, alpha in zip(basis.chords, flux.values):
        theta[chord] += alpha
        theta[chord + graph.num_edges] -= alpha
    return theta


def _resolve_phases(graph: MetricGraph, flux: FluxLike, theta: Optional[Sequence[float]]) -> np.ndarray:
    if theta is None:
        return bond_phases(graph, flux)
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (graph.num_bonds,):
        raise ValueError(f"Expected {graph.num_bonds} bond phases, got shape {theta.shape}")
    reversal = np.array([b.reversal for b in graph.bonds])
    if not np.allclose(theta[reversal], -theta, atol=1e-14):
        raise ValueError("Bond phases must change sign under bond reversal")
    return theta


def phase_matrix(
    graph: MetricGraph, k: float, flux: FluxLike = None, theta: Optional[Sequence[float]] = None
) -> PhaseMatrix:
    phases = _resolve_phases(graph, flux, theta)
    return PhaseMatrix(k=float(k), entries=np.exp(1j * (float(k) * bond_lengths(graph) + phases)))


def _secular_batch(graph: MetricGraph, ks: np.ndarray, phases: np.ndarray) -> np.ndarray:
    S = scattering_matrix(graph).S
    m = graph.num_bonds
    lengths = bond_lengths(graph)
    identity = np.eye(m)
    chunk = max(1, _BATCH_ENTRIES // (m * m))
    sigma = np.empty(ks.shape[0], dtype=complex)
    for start in range(0, ks.shape[0], chunk):
        block = ks[start:start + chunk]
        diagonal = np.exp(1j * (np.outer(block, lengths) + phases))
        # S @ diag(d) scales the columns of S; np.linalg.det runs LAPACK getrf (LU, partial pivoting)
        sigma[start:start + chunk] = np.linalg.det(identity[None, :, :] - S[None, :, :] * diagonal[:, None, :])
    return sigma


def secular_values(
    graph: MetricGraph, ks: Sequence[float], flux: FluxLike = None, theta: Optional[Sequence[float]] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Batched Sigma(k) and zeta(k) on a k-grid.

    Returns the complex sigma values and the complex zeta values; the
    imaginary part of zeta is a round-off diagnostic.
    """
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    phases = _resolve_phases(graph, flux, theta)
    sigma = _secular_batch(graph, ks, phases)
    zeta = np.exp(-1j * ks * graph.total_length) / scattering_matrix(graph).sqrt_det_S * sigma
    return sigma, zeta


def zeta_real(graph: MetricGraph, ks: Sequence[float], theta: np.ndarray) -> np.ndarray:
    return secular_values(graph, ks, theta=theta)[1].real


def secular(graph: MetricGraph, k: float, flux: FluxLike = None, theta: Optional[Sequence[float]] = None) -> SecularValue:
    sigma, zeta = secular_values(graph, [k], flux, theta)
    return SecularValue(k=float(k), sigma=complex(sigma[0]), zeta=float(zeta[0].real), residual_imag=float(abs(zeta[0].imag)))


def _secular_operator(graph: MetricGraph, k: float, phases: np.ndarray) -> np.ndarray:
    S = scattering_matrix(graph).S
    diagonal = np.exp(1j * (float(k) * bond_lengths(graph) + phases))
    return np.eye(graph.num_bonds) - S * diagonal[None, :]


def singular_values(
    graph: MetricGraph, k: float, flux: FluxLike = None, theta: Optional[Sequence[float]] = None
) -> np.ndarray:
    """Singular values of I - S D(k), ascending."""
    phases = _resolve_phases(graph, flux, theta)
    values = la.svd(_secular_operator(graph, k, phases), compute_uv=False)
    return values[::-1]


def smallest_singular_value(
    graph: MetricGraph, k: float, flux: FluxLike = None, theta: Optional[Sequence[float]] = None
) -> float:
    return float(singular_values(graph, k, flux, theta)[0])


def null_dimension(
    graph: MetricGraph, k: float, flux: FluxLike = None, tol: float = 1e-8, theta: Optional[Sequence[float]] = None
) -> int:
    values = singular_values(graph, k, flux, theta)
    return int(np.sum(values < tol * max(values[-1], 1e-300)))


def null_space(
    graph: MetricGraph, k: float, flux: FluxLike = None, tol: float = 1e-8, theta: Optional[Sequence[float]] = None
) -> List[np.ndarray]:
    """
    Orthonormal basis of the numerical null space of I - S D(k).

    Singular vectors whose singular value is below tol times the largest
    singular value; the count equals the multiplicity of k^2.
    """
    phases = _resolve_phases(graph, flux, theta)
    _, values, vh = la.svd(_secular_operator(graph, k, phases))
    threshold = tol * max(values[0], 1e-300)
    vectors = [vh[i].conj() for i in range(len(values)) if values[i] < threshold]
    if not vectors:
        raise NoNullVector(float(k), float(values[-1]), threshold)
    logger.debug("Null space at k=%.12g has dimension %d", k, len(vectors))
    return vectors


if __name__ == "__main__":
    from metric_graph import build_graph

    star = build_graph([0, 1, 2, 3], [(0, 1, np.pi / 2), (0, 2, np.pi / 2), (0, 3, np.pi / 2)])
    print(scattering_matrix(star).S)
    print(secular(star, 1.0))
    print(len(null_space(star, 1.0)))
