"""
Spectral Solver

Finds every positive root of the real secular function zeta(k) up to a scan
ceiling, assigns multiplicities from the null space of I - S D(k), and keeps
the result honest with a Weyl-law watchdog that rescans windows where the
counting function falls behind.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

import secular_engine as engine
from graph_errors import BeyondScanCeiling, InterlacingViolation, InvalidSolverConfig, NotNeumann, WeylViolation
from metric_graph import FluxAssignment, MetricGraph, VertexCondition, merge_vertices, modify_condition

logger = logging.getLogger(__name__)

# points per zoom sub-grid around a local minimum of |zeta|
_SUBGRID = 33
# a minimum whose depth relative to its neighbourhood stays above this is not a root
_SHALLOW = 1e-3
# log-spaced points resolving roots just above k = 0 (flux-lifted zero modes)
_HEAD_POINTS = 24
_WEYL_SLACK = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """
    Knobs of the root search.

    Args:
        grid_step: Scan spacing in k; None means pi / (20 * total length)
        refine_tol: Absolute accuracy of refined roots in k
        cluster_gap: Roots closer than this are re-tested as one multiple root
        max_rescans: Rounds of Weyl-watchdog rescans
        null_tol: Null-space threshold relative to the largest singular value
        min_search: Resolve local minima of |zeta| that do not change sign
        zoom_levels: Sub-grid refinements around each local minimum
    """

    grid_step: Optional[float] = None
    refine_tol: float = 1e-11
    cluster_gap: float = 1e-6
    max_rescans: int = 4
    null_tol: float = 1e-8
    min_search: bool = True
    zoom_levels: int = 2

    def __post_init__(self):
        if self.grid_step is not None and not (math.isfinite(self.grid_step) and self.grid_step > 0):
            raise InvalidSolverConfig(f"grid_step must be positive, got {self.grid_step!r}", grid_step=self.grid_step)
        for name in ("refine_tol", "cluster_gap", "null_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidSolverConfig(f"{name} must be positive, got {value!r}", **{name: value})
        if self.max_rescans < 0 or self.zoom_levels < 0:
            raise InvalidSolverConfig("max_rescans and zoom_levels must be non-negative")

    @classmethod
    def from_flags(cls, grid_step: Optional[float] = None, tol: Optional[float] = None) -> "SolverConfig":
        """Config from the command-line flags; unset flags keep the defaults."""
        changes: Dict[str, Any] = {"grid_step": grid_step}
        if tol is not None:
            changes["refine_tol"] = tol
        return cls(**changes)

    def step_for(self, graph: MetricGraph) -> float:
        return self.grid_step if self.grid_step is not None else math.pi / (20.0 * graph.total_length)

    def replace(self, **changes: Any) -> "SolverConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class SpectralRoot:
    k: float
    multiplicity: int

    @property
    def eigenvalue(self) -> float:
        return self.k * self.k


@dataclass
class SolverDiagnostics:
    grid_points: int = 0
    brackets: int = 0
    tangential_roots: int = 0
    spurious_discarded: int = 0
    clusters_merged: int = 0
    unresolved_clusters: int = 0
    rescan_rounds: int = 0
    rescans: int = 0
    recovered_roots: int = 0

    def to_dict(self) -> Dict[str, int]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class Spectrum:
    roots: Tuple[SpectralRoot, ...]
    lambda0_multiplicity: int
    k_max: float
    total_length: float
    num_edges: int
    num_vertices: int
    flux: FluxAssignment = field(default_factory=FluxAssignment)
    config: SolverConfig = field(default_factory=SolverConfig)
    diagnostics: SolverDiagnostics = field(default_factory=SolverDiagnostics, compare=False)

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.roots])

    @property
    def total_count(self) -> int:
        return self.lambda0_multiplicity + sum(r.multiplicity for r in self.roots)

    def weyl_bounds(self, k: float) -> Tuple[float, float]:
        mean = self.total_length * k / math.pi
        return mean - self.num_edges, mean + self.num_vertices

    def index_of(self, n: int) -> Tuple[int, Optional[SpectralRoot]]:
        """Position of the 1-based eigenvalue n: (root index, root), root None for lambda = 0."""
        if n <= self.lambda0_multiplicity:
            return -1, None
        position = self.lambda0_multiplicity
        for i, root in enumerate(self.roots):
            position += root.multiplicity
            if n <= position:
                return i, root
        return len(self.roots), None


@dataclass(frozen=True)
class WeylSample:
    k: float
    count: int
    gap: float


@dataclass
class InterlacingReport:
    kind: str
    original: List[float]
    modified: List[float]
    compared: int
    tolerance: float
    equalities: List[int] = field(default_factory=list)
    passed: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "compared": self.compared,
            "tolerance": self.tolerance,
            "equalities": self.equalities,
            "passed": self.passed,
        }


def zero_mode_multiplicity(graph: MetricGraph, flux: engine.FluxLike = None) -> int:
    """
    Multiplicity of lambda = 0: components with no Dirichlet vertex whose
    chord fluxes are all trivial modulo 2*pi.
    """
    basis = engine.cycle_basis(graph)
    flux = FluxAssignment.of(flux, basis.beta).canonical()
    edge_of = {e.id: e for e in graph.edges}
    count = 0
    for component in graph.components():
        if any(graph.condition(v) is VertexCondition.DIRICHLET for v in component):
            continue
        trapped = [
            alpha for chord, alpha in zip(basis.chords, flux.values)
            if edge_of[chord].tail in component and abs(alpha) > 1e-12
        ]
        if not trapped:
            count += 1
    return count


class _RootScanner:
    """Root search over one (graph, bond phases) pair."""

    def __init__(self, graph: MetricGraph, theta: np.ndarray, config: SolverConfig):
        self.graph = graph
        self.theta = theta
        self.config = config
        self.diagnostics = SolverDiagnostics()
        self._head = config.step_for(graph)

    def zeta(self, ks: np.ndarray) -> np.ndarray:
        return engine.zeta_real(self.graph, ks, self.theta)

    def sigma_min(self, k: float) -> float:
        return float(engine.singular_values(self.graph, k, theta=self.theta)[0])

    def multiplicity(self, k: float) -> int:
        return engine.null_dimension(self.graph, k, tol=self.config.null_tol, theta=self.theta)

    # grid scan

    def scan(self, lo: float, hi: float, step: float, zoom_levels: int, min_search: bool) -> List[Tuple[float, int]]:
        grid = self._grid(lo, hi, step)
        values = self.zeta(grid)
        self.diagnostics.grid_points += len(grid)
        roots = self._roots_from_signs(grid, values)

        if min_search:
            magnitude = np.abs(values)
            same_sign = values[:-1] * values[1:] > 0
            for i in range(1, len(grid) - 1):
                if not (same_sign[i - 1] and same_sign[i]):
                    continue
                if magnitude[i] <= magnitude[i - 1] and magnitude[i] < magnitude[i + 1]:
                    roots.extend(self._resolve_minimum(grid[i - 1], grid[i + 1], zoom_levels))

        logger.debug("Scan [%.6g, %.6g] step %.3g: %d grid points, %d roots", lo, hi, step, len(grid), len(roots))
        return [(k, m) for k, m in roots if lo < k <= hi]

    def _grid(self, lo: float, hi: float, step: float) -> np.ndarray:
        if lo <= 0.0:
            head = min(self._head, hi)
            start = np.geomspace(head * 1e-4, head, _HEAD_POINTS)
            body = np.linspace(head, hi, max(2, int(math.ceil((hi - head) / step)) + 1))
            return np.unique(np.concatenate([start, body]))
        return np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / step)) + 1))

    def _roots_from_signs(self, grid: np.ndarray, values: np.ndarray) -> List[Tuple[float, int]]:
        candidates = [float(grid[i]) for i in np.flatnonzero(values == 0.0)]
        for i in np.flatnonzero(values[:-1] * values[1:] < 0):
            self.diagnostics.brackets += 1
            candidates.append(self._refine(grid[i], grid[i + 1]))
        accepted = []
        for k in candidates:
            root = self._accept(k)
            if root is not None:
                accepted.append(root)
        return accepted

    def _refine(self, a: float, b: float) -> float:
        f = lambda k: float(self.zeta(np.array([k]))[0])
        return float(brentq(f, a, b, xtol=self.config.refine_tol / 4, maxiter=200))

    def _accept(self, k: float) -> Optional[Tuple[float, int]]:
        dim = self.multiplicity(k)
        if dim > 0:
            return (k, dim)
        self.diagnostics.spurious_discarded += 1
        if k < self._head:
            # round-off around the k = 0 root
            logger.debug("Discarded sign change at k=%.12g: no null vector", k)
        else:
            logger.warning("Discarded sign change at k=%.12g: no null vector", k)
        return None

    # tangential roots

    def _resolve_minimum(self, a: float, b: float, levels: int) -> List[Tuple[float, int]]:
        """Zoom into a local minimum of |zeta| that shows no sign change."""
        outer = None
        for level in range(levels):
            grid = np.linspace(a, b, _SUBGRID)
            values = self.zeta(grid)
            self.diagnostics.grid_points += _SUBGRID
            found = self._roots_from_signs(grid, values)
            if found:
                return found
            magnitude = np.abs(values)
            if outer is None:
                outer = float(magnitude.max())
            i = 1 + int(np.argmin(magnitude[1:-1]))
            if level > 0 and outer > 0 and magnitude[i] > _SHALLOW * outer:
                return []
            a, b = grid[i - 1], grid[i + 1]
        return self._minimize_singular(a, b)

    def _minimize_singular(self, a: float, b: float) -> List[Tuple[float, int]]:
        grid = np.linspace(a, b, _SUBGRID)
        sigmas = np.array([self.sigma_min(k) for k in grid])
        i = 1 + int(np.argmin(sigmas[1:-1]))
        try:
            result = minimize_scalar(
                self.sigma_min,
                bracket=(grid[i - 1], grid[i], grid[i + 1]),
                method="golden",
                tol=self.config.refine_tol / (8.0 * grid[i]),
            )
            k = float(result.x)
        except ValueError:
            k = float(grid[i])

        dim = self.multiplicity(k)
        if dim == 0:
            return []
        if dim % 2:
            split = self._split_odd(k, b - a)
            if split:
                return split
            self.diagnostics.unresolved_clusters += 1
            logger.warning("Unresolved cluster at k=%.12g: odd null dimension %d without a sign change", k, dim)
            dim += 1
        self.diagnostics.tangential_roots += 1
        return [(k, dim)]

    def _split_odd(self, k: float, width: float) -> List[Tuple[float, int]]:
        # an odd null dimension without a sign change means a partner root sits close by
        h = width
        while h > 100 * self.config.refine_tol:
            grid = np.linspace(max(k - h, 1e-300), k + h, _SUBGRID)
            found = self._roots_from_signs(grid, self.zeta(grid))
            if found:
                return found
            h /= 32.0
        return []

    # merging

    def merge(self, roots: Sequence[Tuple[float, int]]) -> List[Tuple[float, int]]:
        ordered = sorted(roots)
        deduped: List[Tuple[float, int]] = []
        for k, m in ordered:
            if deduped and k - deduped[-1][0] <= 100 * self.config.refine_tol:
                deduped[-1] = (deduped[-1][0], max(deduped[-1][1], m))
                continue
            deduped.append((k, m))

        merged: List[Tuple[float, int]] = []
        for k, m in deduped:
            if merged and k - merged[-1][0] < self.config.cluster_gap:
                mid = 0.5 * (k + merged[-1][0])
                dim = self.multiplicity(mid)
                if dim >= 2:
                    self.diagnostics.clusters_merged += 1
                    logger.warning("Merged roots %.12g and %.12g into one of multiplicity %d", merged[-1][0], k, dim)
                    merged[-1] = (mid, dim)
                    continue
            merged.append((k, m))
        return merged


def _gap_samples(
    roots: Sequence[Tuple[float, int]], lambda0: int, total_length: float, k_max: float
) -> Tuple[List[float], np.ndarray]:
    positions = [0.0]
    gaps = [float(lambda0)]
    count = lambda0
    for i, (k, m) in enumerate(roots):
        count += m
        following = roots[i + 1][0] if i + 1 < len(roots) else k_max
        mid = 0.5 * (k + following)
        positions.append(mid)
        gaps.append(count - total_length * mid / math.pi)
    positions.append(k_max)
    gaps.append(count - total_length * k_max / math.pi)
    return positions, np.array(gaps)


def _deficient_windows(
    roots: Sequence[Tuple[float, int]], lambda0: int, total_length: float, k_max: float, width: int
) -> List[Tuple[float, float]]:
    """k-windows where the Weyl gap drops by 2 below its trailing envelope and stays down."""
    positions, gaps = _gap_samples(roots, lambda0, total_length, k_max)
    windows: List[Tuple[float, float]] = []
    for j in range(1, len(gaps)):
        back = gaps[max(0, j - width):j]
        ahead = gaps[j:j + width]
        if gaps[j] <= back.max() - 2 + _WEYL_SLACK and ahead.mean() <= back.mean() - 1:
            lo, hi = positions[max(0, j - width)], positions[j]
            if windows and lo <= windows[-1][1]:
                windows[-1] = (windows[-1][0], max(hi, windows[-1][1]))
            else:
                windows.append((lo, hi))
    return windows


def _watchdog(
    scanner: _RootScanner, roots: List[Tuple[float, int]], lambda0: int, k_max: float, step: float
) -> List[Tuple[float, int]]:
    graph = scanner.graph
    width = max(10, 4 * graph.num_edges)
    confirmed: List[Tuple[float, float]] = []
    for round_number in range(1, scanner.config.max_rescans + 1):
        windows = [
            w for w in _deficient_windows(roots, lambda0, graph.total_length, k_max, width)
            if not any(c[0] <= w[0] and w[1] <= c[1] for c in confirmed)
        ]
        if not windows:
            break
        scanner.diagnostics.rescan_rounds += 1
        for lo, hi in windows:
            scanner.diagnostics.rescans += 1
            logger.warning("Weyl gap drop in [%.6g, %.6g]; rescanning (round %d)", lo, hi, round_number)
            found = scanner.scan(lo, hi, step / 16.0, zoom_levels=1 + round_number, min_search=True)
            before = sum(m for k, m in roots if lo < k < hi)
            inside = [(k, m) for k, m in found if lo < k < hi]
            after = sum(m for _, m in inside)
            if after > before:
                scanner.diagnostics.recovered_roots += after - before
                roots = scanner.merge([r for r in roots if not lo < r[0] < hi] + inside)
            else:
                confirmed.append((lo, hi))
    return roots


def check_weyl(spectrum: Spectrum) -> None:
    """Raise WeylViolation unless every root and k_max satisfy the Weyl bounds."""
    count = spectrum.lambda0_multiplicity
    for root in spectrum.roots:
        lower, upper = spectrum.weyl_bounds(root.k)
        if count < lower - _WEYL_SLACK:
            raise WeylViolation(root.k, count, lower, upper)
        count += root.multiplicity
        if count > upper + _WEYL_SLACK:
            raise WeylViolation(root.k, count, lower, upper)
    lower, upper = spectrum.weyl_bounds(spectrum.k_max)
    if not lower - _WEYL_SLACK <= count <= upper + _WEYL_SLACK:
        raise WeylViolation(spectrum.k_max, count, lower, upper)


def find_spectrum(
    graph: MetricGraph,
    flux: engine.FluxLike = None,
    k_max: float = 10.0,
    config: Optional[SolverConfig] = None,
    check: bool = True,
) -> Spectrum:
    """
    All roots of zeta in (0, k_max] with multiplicities.

    Args:
        graph: Validated metric graph
        flux: One flux per cycle-basis chord; None means no magnetic field
        k_max: Scan ceiling in k
        config: Solver knobs; defaults to SolverConfig()
        check: Raise WeylViolation when the final count breaks the Weyl bounds
    """
    if not (math.isfinite(k_max) and k_max > 0):
        raise InvalidSolverConfig(f"k_max must be positive, got {k_max!r}", k_max=k_max)
    config = config or SolverConfig()
    basis = engine.cycle_basis(graph)
    flux = FluxAssignment.of(flux, basis.beta)
    theta = engine.bond_phases(graph, flux)

    scanner = _RootScanner(graph, theta, config)
    step = config.step_for(graph)
    roots = scanner.merge(scanner.scan(0.0, k_max, step, config.zoom_levels, config.min_search))
    lambda0 = zero_mode_multiplicity(graph, flux)
    roots = _watchdog(scanner, roots, lambda0, k_max, step)

    spectrum = Spectrum(
        roots=tuple(SpectralRoot(k, m) for k, m in roots),
        lambda0_multiplicity=lambda0,
        k_max=float(k_max),
        total_length=graph.total_length,
        num_edges=graph.num_edges,
        num_vertices=graph.num_vertices,
        flux=flux,
        config=config,
        diagnostics=scanner.diagnostics,
    )
    logger.info(
        "Spectrum up to k=%.6g: %d roots (%d with multiplicity), lambda0 multiplicity %d",
        k_max, len(spectrum.roots), spectrum.total_count - lambda0, lambda0,
    )
    if check:
        check_weyl(spectrum)
    return spectrum


def counting_function(spectrum: Spectrum, k: float) -> int:
    if k > spectrum.k_max * (1 + 1e-12):
        raise BeyondScanCeiling(k, spectrum.k_max)
    return spectrum.lambda0_multiplicity + sum(r.multiplicity for r in spectrum.roots if r.k <= k)


def flat_spectrum(spectrum: Spectrum, include_zero: bool = True) -> List[float]:
    """k-values with multiplicities expanded, lambda = 0 included as k = 0."""
    values = [0.0] * spectrum.lambda0_multiplicity if include_zero else []
    for root in spectrum.roots:
        values.extend([root.k] * root.multiplicity)
    return values


def lowest_roots(
    graph: MetricGraph, count: int, flux: engine.FluxLike = None, config: Optional[SolverConfig] = None
) -> List[float]:
    """The count smallest k-values, multiplicities expanded and zero modes included."""
    # the Weyl lower bound guarantees count + 1 eigenvalues below this ceiling
    k_max = math.pi * (count + graph.num_edges + 1) / graph.total_length
    return flat_spectrum(find_spectrum(graph, flux, k_max=k_max, config=config))[:count]


def weyl_gap(spectrum: Spectrum) -> List[WeylSample]:
    """N(k) - L k / pi just below and at every root, at midpoints and at k_max."""
    slope = spectrum.total_length / math.pi
    count = spectrum.lambda0_multiplicity
    samples = [WeylSample(0.0, count, float(count))]
    for i, root in enumerate(spectrum.roots):
        samples.append(WeylSample(root.k, count, count - slope * root.k))
        count += root.multiplicity
        samples.append(WeylSample(root.k, count, count - slope * root.k))
        following = spectrum.roots[i + 1].k if i + 1 < len(spectrum.roots) else spectrum.k_max
        mid = 0.5 * (root.k + following)
        samples.append(WeylSample(mid, count, count - slope * mid))
    samples.append(WeylSample(spectrum.k_max, count, count - slope * spectrum.k_max))
    return samples


def root_order(graph: MetricGraph, k: float, flux: engine.FluxLike = None, h: float = 1e-3) -> int:
    """Order of vanishing of zeta at k from the growth of |zeta| at k +- h and k +- 2h."""
    theta = engine.bond_phases(graph, flux)
    near = np.abs(engine.zeta_real(graph, np.array([k - h, k + h]), theta))
    far = np.abs(engine.zeta_real(graph, np.array([k - 2 * h, k + 2 * h]), theta))
    orders = np.log(far / near) / math.log(2.0)
    return int(round(float(np.mean(orders))))


def interlace(original: Sequence[float], modified: Sequence[float], tol: float, kind: str) -> InterlacingReport:
    """
    Check original[n] <= modified[n] <= original[n+1] for every modified value.

    Missing original values count as +inf. Equalities within tol are flagged
    with their 1-based index; a violation raises InterlacingViolation.
    """
    report = InterlacingReport(kind=kind, original=list(original), modified=list(modified), compared=0, tolerance=tol)
    for n, value in enumerate(modified):
        lower = original[n] if n < len(original) else math.inf
        upper = original[n + 1] if n + 1 < len(original) else math.inf
        if value < lower - tol or value > upper + tol:
            report.passed = False
            raise InterlacingViolation(n + 1, lower, value, None if math.isinf(upper) else upper)
        if abs(value - lower) <= tol or abs(upper - value) <= tol:
            report.equalities.append(n + 1)
        report.compared += 1
    if report.equalities:
        logger.info("%s interlacing: equalities at n=%s", kind, report.equalities)
    return report


def verify_interlacing_ND(
    graph: MetricGraph, vertex: int, k_max: float, config: Optional[SolverConfig] = None
) -> InterlacingReport:
    """Neumann -> Dirichlet at one vertex: lambda_n(G0) <= lambda_n(G_inf) <= lambda_{n+1}(G0)."""
    config = config or SolverConfig()
    if graph.condition(vertex) is not VertexCondition.NEUMANN:
        raise NotNeumann(vertex)
    modified = modify_condition(graph, vertex, VertexCondition.DIRICHLET)
    before = flat_spectrum(find_spectrum(graph, k_max=k_max, config=config))
    after = flat_spectrum(find_spectrum(modified, k_max=k_max, config=config))
    return interlace(before, after, 2 * config.refine_tol, "neumann-dirichlet")


def verify_interlacing_merge(
    graph: MetricGraph, v1: int, v2: int, k_max: float, config: Optional[SolverConfig] = None
) -> InterlacingReport:
    """Gluing two Neumann vertices: lambda_n(G) <= lambda_n(G') <= lambda_{n+1}(G)."""
    config = config or SolverConfig()
    merged = merge_vertices(graph, v1, v2)
    before = flat_spectrum(find_spectrum(graph, k_max=k_max, config=config))
    after = flat_spectrum(find_spectrum(merged, k_max=k_max, config=config))
    return interlace(before, after, 2 * config.refine_tol, "merge")


if __name__ == "__main__":
    from metric_graph import build_graph

    interval = build_graph([0, 1], [(0, 1, 1.0)], {0: "dirichlet", 1: "dirichlet"})
    spectrum = find_spectrum(interval, k_max=20.0)
    print([round(r.k / math.pi, 12) for r in spectrum.roots])
    print(spectrum.diagnostics)
