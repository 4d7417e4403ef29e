"""
Magnetic Flux

Eigenvalue surfaces lambda_n(alpha) over the flux torus: band values at a
flux, sorted dispersion sheets, finite-difference Hessians at alpha = 0 and
the comparison of Morse index with nodal surplus.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

import secular_engine as engine
from eigenfunction_nodal import count_zeros, nodal_surplus_profile, reconstruct
from graph_errors import (
    DegenerateEigenvalue,
    DegenerateHessian,
    FluxDimensionMismatch,
    NotCritical,
    QuantumGraphError,
    SolverFailureAtGridPoint,
    SymmetryViolation,
    TheoremViolation,
)
from metric_graph import FluxAssignment, MetricGraph, VertexCondition
from spectral_solver import SolverConfig, find_spectrum, lowest_roots

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3
HESSIAN_DEGENERACY = 1e-4
TOUCHING_GAP = 1e-6
SIMPLE_GAP = 1e-9

FluxPoint = Tuple[float, ...]


@dataclass
class DispersionSheet:
    band: int
    samples: Dict[FluxPoint, float] = field(default_factory=dict)
    method: str = "sorted"
    touchings: List[FluxPoint] = field(default_factory=list)

    def values(self) -> np.ndarray:
        return np.array(list(self.samples.values()))


@dataclass
class CriticalPointReport:
    n: int
    eigenvalue: float
    gradient: np.ndarray
    hessian: np.ndarray
    hessian_eigenvalues: np.ndarray
    morse_index: int
    degenerate: bool
    step: float

    @property
    def classification(self) -> str:
        beta = len(self.gradient)
        if self.morse_index == 0:
            return "min"
        if self.morse_index == beta:
            return "max"
        return "saddle"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "lambda": self.eigenvalue,
            "gradient": self.gradient.tolist(),
            "hessian": self.hessian.tolist(),
            "morse_index": self.morse_index,
            "classification": self.classification,
            "degenerate": self.degenerate,
        }


@dataclass
class MagneticNodalRow:
    n: int
    k: float
    phi: Optional[int] = None
    surplus: Optional[int] = None
    morse_index: Optional[int] = None
    classification: Optional[str] = None
    flags: List[str] = field(default_factory=list)


@dataclass
class MagneticNodalReport:
    beta: int
    rows: List[MagneticNodalRow]

    @property
    def checked(self) -> int:
        return sum(1 for r in self.rows if not r.flags)

    @property
    def passed(self) -> bool:
        return all(r.morse_index == r.surplus for r in self.rows if not r.flags)


@dataclass
class SurplusBoundsReport:
    beta: int
    rows: List[Tuple[int, int]]
    violations: List[Tuple[int, int]]

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass
class SymmetryReport:
    rows: List[Dict[str, Any]]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max((r["deviation"] for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def _beta(graph: MetricGraph) -> int:
    return engine.cycle_basis(graph).beta


def band_k_values(
    graph: MetricGraph, flux: engine.FluxLike, n_bands: int, config: Optional[SolverConfig] = None
) -> np.ndarray:
    """Lowest n_bands k-values (multiplicities expanded, zero modes included) at one flux."""
    return np.array(lowest_roots(graph, n_bands, flux, config))


def band_values(
    graph: MetricGraph, flux: engine.FluxLike, n_bands: int, config: Optional[SolverConfig] = None
) -> np.ndarray:
    """lambda_1 .. lambda_{n_bands} at one flux."""
    return band_k_values(graph, flux, n_bands, config) ** 2


class _BandOracle:
    """Memoized band values keyed by flux vector."""

    def __init__(self, graph: MetricGraph, n_bands: int, config: SolverConfig):
        self.graph = graph
        self.n_bands = n_bands
        self.config = config
        self._memo: Dict[FluxPoint, np.ndarray] = {}

    def __call__(self, flux: Sequence[float]) -> np.ndarray:
        key = tuple(float(v) for v in flux)
        if key not in self._memo:
            self._memo[key] = band_values(self.graph, key, self.n_bands, self.config)
        return self._memo[key]


def flux_grid_1d(points: int = 101) -> List[FluxPoint]:
    return [(float(a),) for a in np.linspace(-math.pi, math.pi, points)]


def flux_grid_2d(points: int = 21) -> List[FluxPoint]:
    axis = np.linspace(-math.pi, math.pi, points)
    return [(float(a), float(b)) for a, b in itertools.product(axis, axis)]


def flux_grid(beta: int, points: Optional[int] = None) -> List[FluxPoint]:
    """Uniform grid on [-pi, pi]^beta; 101 points per axis for one flux, 21 for two, 9 beyond."""
    if beta < 1:
        raise FluxDimensionMismatch(1, beta)
    if beta == 1:
        return flux_grid_1d(points or 101)
    if beta == 2:
        return flux_grid_2d(points or 21)
    axis = [float(a) for a in np.linspace(-math.pi, math.pi, points or 9)]
    return list(itertools.product(axis, repeat=beta))


def sweep(
    graph: MetricGraph, n_bands: int, flux_grid: Sequence[Sequence[float]], config: Optional[SolverConfig] = None
) -> List[DispersionSheet]:
    """
    Lowest n_bands eigenvalues at every flux grid point, as sorted sheets.

    Grid points where adjacent bands come within TOUCHING_GAP are recorded
    on the lower sheet as touchings.
    """
    beta = _beta(graph)
    if beta == 0:
        raise FluxDimensionMismatch(0, len(flux_grid[0]) if flux_grid else 0)
    sheets = [DispersionSheet(band=n + 1) for n in range(n_bands)]
    for point in flux_grid:
        point = tuple(float(v) for v in point)
        if len(point) != beta:
            raise FluxDimensionMismatch(beta, len(point))
        try:
            values = band_values(graph, point, n_bands, config)
        except QuantumGraphError as exc:
            raise SolverFailureAtGridPoint(list(point), exc.message) from exc
        if len(values) < n_bands:
            raise SolverFailureAtGridPoint(list(point), f"only {len(values)} bands below the scan ceiling")
        for n, sheet in enumerate(sheets):
            sheet.samples[point] = float(values[n])
            if n + 1 < n_bands and values[n + 1] - values[n] < TOUCHING_GAP:
                sheet.touchings.append(point)
    logger.info("Swept %d flux points, %d bands", len(flux_grid), n_bands)
    return sheets


def _finite_differences(
    value: Any, center: float, beta: int, h: float
) -> Tuple[np.ndarray, np.ndarray]:
    basis = np.eye(beta)
    gradient = np.zeros(beta)
    hessian = np.zeros((beta, beta))
    for i in range(beta):
        plus, minus = value(h * basis[i]), value(-h * basis[i])
        gradient[i] = (plus - minus) / (2 * h)
        hessian[i, i] = (plus - 2 * center + minus) / (h * h)
    for i, j in itertools.combinations(range(beta), 2):
        mixed = (
            value(h * (basis[i] + basis[j]))
            - value(h * (basis[i] - basis[j]))
            - value(h * (basis[j] - basis[i]))
            + value(-h * (basis[i] + basis[j]))
        ) / (4 * h * h)
        hessian[i, j] = hessian[j, i] = mixed
    return gradient, hessian


def hessian_at_zero(
    graph: MetricGraph,
    n: int,
    step: float = DEFAULT_STEP,
    config: Optional[SolverConfig] = None,
    check_vertices: bool = True,
) -> CriticalPointReport:
    """
    Gradient and Hessian of lambda_n(alpha) at alpha = 0.

    Central differences at step and step/2 combined by one Richardson
    extrapolation. Raises NotCritical when the gradient is not O(step^2)
    and DegenerateHessian when an eigenvalue sits below the FD noise floor.
    """
    config = config or SolverConfig()
    config = config.replace(refine_tol=min(config.refine_tol, 1e-13))
    beta = _beta(graph)
    oracle = _BandOracle(graph, n + 1, config)
    zero = np.zeros(beta)
    bands = oracle(zero)
    center = float(bands[n - 1])
    if (n > 1 and center - bands[n - 2] < SIMPLE_GAP) or bands[n] - center < SIMPLE_GAP:
        raise DegenerateEigenvalue(n, 2)

    if check_vertices:
        spectrum = find_spectrum(graph, k_max=math.pi * (n + graph.num_edges + 2) / graph.total_length, config=config)
        count_zeros(reconstruct(graph, spectrum, n), graph)

    if beta == 0:
        empty = np.zeros(0)
        return CriticalPointReport(n, center, empty, np.zeros((0, 0)), empty, 0, False, step)

    value = lambda alpha: float(oracle(alpha)[n - 1])
    coarse_gradient, coarse = _finite_differences(value, center, beta, step)
    fine_gradient, fine = _finite_differences(value, center, beta, step / 2)
    gradient = (4 * fine_gradient - coarse_gradient) / 3
    hessian = (4 * fine - coarse) / 3
    hessian = 0.5 * (hessian + hessian.T)

    tolerance = 10 * step * step * max(1.0, abs(center))
    gradient_norm = float(np.linalg.norm(gradient))
    if gradient_norm > tolerance:
        raise NotCritical(n, gradient_norm, tolerance)

    eigenvalues = np.linalg.eigvalsh(hessian)
    scale = float(np.abs(eigenvalues).max())
    threshold = HESSIAN_DEGENERACY * scale
    if scale == 0.0 or np.any(np.abs(eigenvalues) < threshold):
        raise DegenerateHessian(n, eigenvalues.tolist())
    morse = int(np.sum(eigenvalues < -threshold))
    logger.debug("Band %d: lambda=%.12g hessian eigenvalues %s morse %d", n, center, eigenvalues, morse)
    return CriticalPointReport(n, center, gradient, hessian, eigenvalues, morse, False, step)


def verify_magnetic_nodal(
    graph: MetricGraph, k_max: float, config: Optional[SolverConfig] = None, step: float = DEFAULT_STEP
) -> MagneticNodalReport:
    """
    Morse index of lambda_n at zero flux against the nodal surplus for every
    simple, vertex-nonvanishing eigenvalue up to k_max. Other indices are
    flagged; a mismatch raises TheoremViolation.
    """
    beta = _beta(graph)
    rows = []
    for entry in nodal_surplus_profile(graph, k_max, config):
        row = MagneticNodalRow(n=entry.n, k=entry.k, phi=entry.phi, surplus=entry.surplus, flags=list(entry.flags))
        rows.append(row)
        if row.flags:
            continue
        try:
            report = hessian_at_zero(graph, entry.n, step, config, check_vertices=False)
        except (NotCritical, DegenerateHessian, DegenerateEigenvalue) as exc:
            logger.warning("n=%d skipped: %s", entry.n, exc.message)
            row.flags.append(type(exc).__name__)
            continue
        row.morse_index = report.morse_index
        row.classification = report.classification
        if report.morse_index != entry.surplus:
            raise TheoremViolation(entry.n, report.morse_index, entry.surplus)
    return MagneticNodalReport(beta=beta, rows=rows)


def is_mandarin(graph: MetricGraph) -> bool:
    return (
        graph.num_vertices == 2
        and graph.num_edges >= 2
        and all(not e.is_loop for e in graph.edges)
        and all(v.condition is VertexCondition.NEUMANN for v in graph.vertices)
    )


def mandarin_surplus_bounds(graph: MetricGraph, k_max: float, config: Optional[SolverConfig] = None) -> SurplusBoundsReport:
    """Surplus 0 for n = 1 and 1 <= surplus <= beta - 1 for n > 1 on a d-mandarin."""
    if not is_mandarin(graph):
        raise ValueError("Graph is not a mandarin (two Neumann vertices joined by parallel edges)")
    beta = _beta(graph)
    rows, violations = [], []
    for entry in nodal_surplus_profile(graph, k_max, config):
        if not entry.valid:
            continue
        rows.append((entry.n, entry.surplus))
        ok = entry.surplus == 0 if entry.n == 1 else 1 <= entry.surplus <= beta - 1
        if not ok:
            violations.append((entry.n, entry.surplus))
    return SurplusBoundsReport(beta=beta, rows=rows, violations=violations)


def verify_flux_symmetry(
    graph: MetricGraph,
    n_bands: int,
    sample_fluxes: Sequence[Sequence[float]],
    config: Optional[SolverConfig] = None,
) -> SymmetryReport:
    """k_n(alpha) against k_n(-alpha) for every sampled flux vector."""
    config = config or SolverConfig()
    tolerance = 2 * config.refine_tol
    rows = []
    for flux in sample_fluxes:
        flux = FluxAssignment.of(flux, _beta(graph))
        plus = band_k_values(graph, flux, n_bands, config)
        minus = band_k_values(graph, flux.negated(), n_bands, config)
        for n, (a, b) in enumerate(zip(plus, minus), start=1):
            deviation = float(abs(a - b))
            rows.append({"flux": list(flux.values), "band": n, "plus": float(a), "minus": float(b), "deviation": deviation})
            if deviation > tolerance:
                raise SymmetryViolation(n, list(flux.values), float(a), float(b))
    return SymmetryReport(rows=rows, tolerance=tolerance)


if __name__ == "__main__":
    from metric_graph import build_graph

    mandarin = build_graph([0, 1], [(0, 1, 1.0), (0, 1, math.sqrt(2)), (0, 1, math.sqrt(3))])
    for n in range(2, 5):
        print(hessian_at_zero(mandarin, n).to_dict())
