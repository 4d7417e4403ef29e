"""
Reference Oracles

Closed-form secular functions and spectra of the worked example graphs
(intervals, stars, the lasso, mandarins, the dihedral pair, the tetrahedron
and the eight-vertex predihedral graph), plus the cross-checks that hold the
numerical engine to them.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg as la
from scipy.optimize import brentq

import secular_engine as engine
from eigenfunction_nodal import dihedral_nodal_count, dihedral_nodal_formula, nodal_surplus_profile
from graph_errors import DetSMismatch
from metric_graph import (
    MetricGraph,
    VertexCondition,
    build_graph,
    detach_edge_end,
    disjoint_union,
    merge_vertices,
    modify_condition,
)
from spectral_solver import (
    SolverConfig,
    find_spectrum,
    flat_spectrum,
    lowest_roots,
    verify_interlacing_ND,
    verify_interlacing_merge,
)

logger = logging.getLogger(__name__)

Condition = Union[VertexCondition, str]
ClosedForm = Callable[[np.ndarray], np.ndarray]


class OracleName(str, Enum):
    INTERVAL = "interval"
    NEUMANN_STAR = "neumann-star"
    DIRICHLET_STAR = "dirichlet-star"
    LASSO = "lasso"
    MANDARIN3 = "mandarin3"
    DIHEDRAL = "dihedral"
    DIHEDRAL_TREE = "dihedral-tree"
    TETRAHEDRON = "tetrahedron"
    PREDIHEDRAL = "predihedral"


@dataclass(frozen=True)
class OracleGraph:
    """A named example graph with its closed-form secular function, when one is known."""

    name: OracleName
    parameters: Tuple[float, ...]
    builder: Callable[[], MetricGraph]
    closed_form: Optional[ClosedForm] = None

    @property
    def graph(self) -> MetricGraph:
        return self.builder()


def _z(k: Union[float, np.ndarray], length: float) -> np.ndarray:
    return np.exp(1j * np.asarray(k, dtype=float) * length)


def _sign(condition: Condition) -> int:
    return 1 if VertexCondition.parse(condition) is VertexCondition.NEUMANN else -1


# builders

def interval_graph(length: float, left: Condition = "neumann", right: Condition = "neumann") -> MetricGraph:
    return build_graph([0, 1], [(0, 1, length)], {0: left, 1: right})


def star_graph(lengths: Sequence[float], leaves: Union[Condition, Sequence[Condition]] = "neumann") -> MetricGraph:
    """Center 0, leaf i + 1 at the end of leg i."""
    if isinstance(leaves, (str, VertexCondition)):
        leaves = [leaves] * len(lengths)
    edges = [(0, i + 1, length) for i, length in enumerate(lengths)]
    conditions = {i + 1: c for i, c in enumerate(leaves)}
    return build_graph(range(len(lengths) + 1), edges, conditions)


def lasso_graph(stick: float, loop: float) -> MetricGraph:
    return build_graph([0, 1], [(0, 1, stick), (0, 0, loop)])


def mandarin_graph(lengths: Sequence[float]) -> MetricGraph:
    return build_graph([0, 1], [(0, 1, length) for length in lengths])


def dihedral_graph(a: float, b: float, c: float) -> MetricGraph:
    """P(0, Dirichlet) -a- A(1) =2b,2c= B(2) -a- Q(3, Neumann)."""
    return build_graph(
        [0, 1, 2, 3],
        [(0, 1, a), (1, 2, 2 * b), (1, 2, 2 * c), (2, 3, a)],
        {0: VertexCondition.DIRICHLET},
    )


def dihedral_tree_graph(a: float, b: float, c: float) -> MetricGraph:
    """A(0) with Neumann leaves b, c; B(1) with Dirichlet leaves b, c; A -2a- B."""
    return build_graph(
        range(6),
        [(0, 1, 2 * a), (0, 2, b), (0, 3, c), (1, 4, b), (1, 5, c)],
        {4: VertexCondition.DIRICHLET, 5: VertexCondition.DIRICHLET},
    )


def tetrahedron_graph(a: float, b: float) -> MetricGraph:
    """Apex 0 joined to 1, 2, 3 by spokes b; triangle 1-2-3 of sides a."""
    return build_graph(range(4), [(0, 1, b), (0, 2, b), (0, 3, b), (1, 2, a), (2, 3, a), (1, 3, a)])


def predihedral_graph(a: float, b: float, c: float) -> MetricGraph:
    """Ring of eight Neumann vertices alternating single edges 2a and double edges 2b, 2c."""
    edges = []
    for i in range(4):
        first, second, third = 2 * i, 2 * i + 1, (2 * i + 2) % 8
        edges.append((first, second, 2 * a))
        edges.append((second, third, 2 * b))
        edges.append((second, third, 2 * c))
    return build_graph(range(8), edges)


# closed forms

def interval_spectrum(length: float, left: Condition, right: Condition, k_max: float) -> List[float]:
    """k-values of [0, L] up to k_max; NN includes k = 0."""
    left_sign, right_sign = _sign(left), _sign(right)
    if left_sign != right_sign:
        count = int(math.floor(k_max * length / math.pi + 0.5))
        return [(n - 0.5) * math.pi / length for n in range(1, count + 1)]
    count = int(math.floor(k_max * length / math.pi))
    values = [n * math.pi / length for n in range(1, count + 1)]
    return [0.0] + values if left_sign > 0 else values


def interval_secular(length: float, left: Condition, right: Condition, k: np.ndarray) -> np.ndarray:
    z2 = _z(k, 2 * length)
    return 1 - z2 if _sign(left) == _sign(right) else 1 + z2


def star_secular_neumann_general(lengths: Sequence[float], k: Union[float, np.ndarray]) -> np.ndarray:
    """sum_i sin(kL_i) prod_{j != i} cos(kL_j): tan-sum condition times prod cos."""
    k = np.asarray(k, dtype=float)
    sines = [np.sin(k * L) for L in lengths]
    cosines = [np.cos(k * L) for L in lengths]
    total = np.zeros_like(k)
    for i in range(len(lengths)):
        term = sines[i]
        for j in range(len(lengths)):
            if j != i:
                term = term * cosines[j]
        total = total + term
    return total


def star_secular_neumann(lengths: Sequence[float], k: Union[float, np.ndarray]) -> np.ndarray:
    if len(lengths) != 3:
        raise ValueError("star_secular_neumann takes three leg lengths; use star_secular_neumann_general")
    return star_secular_neumann_general(lengths, k)


def star_secular_dirichlet(lengths: Sequence[float], k: Union[float, np.ndarray]) -> np.ndarray:
    """sum_i cos(kL_i) prod_{j != i} sin(kL_j): cot-sum condition times prod sin."""
    if len(lengths) < 2:
        raise ValueError("A Dirichlet star needs at least two legs")
    k = np.asarray(k, dtype=float)
    total = np.zeros_like(k)
    for i in range(len(lengths)):
        term = np.cos(k * lengths[i])
        for j in range(len(lengths)):
            if j != i:
                term = term * np.sin(k * lengths[j])
        total = total + term
    return total


def _three_star_form(Z: Sequence[np.ndarray], signs: Sequence[int]) -> np.ndarray:
    # 1 + (1/3) sum r_i Z_i - (1/3) sum r_i r_j Z_i Z_j - r_1 r_2 r_3 Z_1 Z_2 Z_3
    r1, r2, r3 = signs
    Z1, Z2, Z3 = Z
    singles = r1 * Z1 + r2 * Z2 + r3 * Z3
    pairs = r1 * r2 * Z1 * Z2 + r2 * r3 * Z2 * Z3 + r3 * r1 * Z3 * Z1
    return 1 + singles / 3 - pairs / 3 - r1 * r2 * r3 * Z1 * Z2 * Z3


def mixed_star_secular(lengths: Sequence[float], conditions: Sequence[Condition], k: np.ndarray) -> np.ndarray:
    """Sigma of a 3-star whose leaves carry the given Neumann/Dirichlet conditions."""
    if len(lengths) != 3 or len(conditions) != 3:
        raise ValueError("mixed_star_secular takes three legs")
    return _three_star_form([_z(k, 2 * L) for L in lengths], [_sign(c) for c in conditions])


def lasso_secular(stick: float, loop: float, k: np.ndarray) -> np.ndarray:
    z1, z2 = _z(k, stick), _z(k, loop)
    return (z2 - 1) * (3 * z1 ** 2 * z2 - z1 ** 2 + z2 - 3) / 3


def mandarin_secular(L1: float, L2: float, L3: float, k: np.ndarray) -> np.ndarray:
    """Product of the Neumann-star and Dirichlet-star forms in z_j = e^{ikL_j}."""
    Z = [_z(k, L) for L in (L1, L2, L3)]
    return _three_star_form(Z, (1, 1, 1)) * _three_star_form(Z, (-1, -1, -1))


def dihedral_secular(a: float, b: float, c: float, k: np.ndarray, alpha: float = 0.0) -> np.ndarray:
    A, B, C = _z(k, 4 * a), _z(k, 4 * b), _z(k, 4 * c)
    loop = _z(k, 2 * b) * _z(k, 2 * c)
    return (
        -A * B * C
        + (A * B + B * C + C * A) / 9
        + 8 * math.cos(alpha) * (A - 1) * loop / 9
        - (A + B + C) / 9
        + 1
    )


@dataclass(frozen=True)
class SecularFactor:
    """One factor of a factorized secular function; half_length centres its phase."""

    label: str
    values: ClosedForm
    half_length: float
    power: int = 1


def tetrahedron_factors(a: float, b: float) -> List[SecularFactor]:
    def linear(k):
        return _z(k, a) - 1

    def lasso_like(k):
        za, zb2 = _z(k, a), _z(k, 2 * b)
        return 3 * za * zb2 - zb2 + za - 3

    def doublet(k):
        za, zb2 = _z(k, a), _z(k, 2 * b)
        return 3 * za ** 2 * zb2 + 2 * za * zb2 - za ** 2 + zb2 - 2 * za - 3

    return [
        SecularFactor("z_a - 1", linear, a / 2),
        SecularFactor("lasso-like", lasso_like, a / 2 + b),
        SecularFactor("doublet", doublet, a + b, power=2),
    ]


def tetrahedron_secular(a: float, b: float, k: np.ndarray) -> np.ndarray:
    total = np.ones_like(np.asarray(k, dtype=float), dtype=complex) / 27
    for factor in tetrahedron_factors(a, b):
        total = total * factor.values(k) ** factor.power
    return total


def predihedral_factors(a: float, b: float, c: float) -> List[SecularFactor]:
    factors = [SecularFactor("dihedral", lambda k: dihedral_secular(a, b, c, k), 2 * (a + b + c), power=2)]
    for conditions in ("nnn", "dnn", "ndd", "ddd"):
        factors.append(
            SecularFactor(
                f"star-{conditions}",
                lambda k, conditions=conditions: mixed_star_secular((a, b, c), tuple(conditions), k),
                a + b + c,
            )
        )
    return factors


def predihedral_secular(a: float, b: float, c: float, k: np.ndarray) -> np.ndarray:
    """Up to an overall constant."""
    total = np.ones_like(np.asarray(k, dtype=float), dtype=complex)
    for factor in predihedral_factors(a, b, c):
        total = total * factor.values(k) ** factor.power
    return total


# oracle catalogue

def interval(length: float, left: Condition = "neumann", right: Condition = "neumann") -> OracleGraph:
    return OracleGraph(
        OracleName.INTERVAL,
        (length,),
        lambda: interval_graph(length, left, right),
        lambda k: interval_secular(length, left, right, k),
    )


def neumann_star(lengths: Sequence[float]) -> OracleGraph:
    lengths = tuple(lengths)
    closed = (lambda k: mixed_star_secular(lengths, "nnn", k)) if len(lengths) == 3 else None
    return OracleGraph(OracleName.NEUMANN_STAR, lengths, lambda: star_graph(lengths, "neumann"), closed)


def dirichlet_star(lengths: Sequence[float]) -> OracleGraph:
    lengths = tuple(lengths)
    closed = (lambda k: mixed_star_secular(lengths, "ddd", k)) if len(lengths) == 3 else None
    return OracleGraph(OracleName.DIRICHLET_STAR, lengths, lambda: star_graph(lengths, "dirichlet"), closed)


def lasso(stick: float, loop: float) -> OracleGraph:
    return OracleGraph(OracleName.LASSO, (stick, loop), lambda: lasso_graph(stick, loop), lambda k: lasso_secular(stick, loop, k))


def mandarin3(L1: float, L2: float, L3: float) -> OracleGraph:
    return OracleGraph(
        OracleName.MANDARIN3, (L1, L2, L3), lambda: mandarin_graph((L1, L2, L3)), lambda k: mandarin_secular(L1, L2, L3, k)
    )


def dihedral(a: float, b: float, c: float) -> OracleGraph:
    return OracleGraph(OracleName.DIHEDRAL, (a, b, c), lambda: dihedral_graph(a, b, c), lambda k: dihedral_secular(a, b, c, k))


def dihedral_tree(a: float, b: float, c: float) -> OracleGraph:
    return OracleGraph(
        OracleName.DIHEDRAL_TREE, (a, b, c), lambda: dihedral_tree_graph(a, b, c), lambda k: dihedral_secular(a, b, c, k)
    )


def tetrahedron(a: float, b: float) -> OracleGraph:
    return OracleGraph(OracleName.TETRAHEDRON, (a, b), lambda: tetrahedron_graph(a, b), lambda k: tetrahedron_secular(a, b, k))


def predihedral(a: float, b: float, c: float) -> OracleGraph:
    return OracleGraph(
        OracleName.PREDIHEDRAL, (a, b, c), lambda: predihedral_graph(a, b, c), lambda k: predihedral_secular(a, b, c, k)
    )


def dihedral_pair(a: float, b: float, c: float) -> Tuple[OracleGraph, OracleGraph, Callable[..., np.ndarray]]:
    """The dihedral graph, its isospectral tree and their shared secular function (k, alpha=0)."""
    return dihedral(a, b, c), dihedral_tree(a, b, c), lambda k, alpha=0.0: dihedral_secular(a, b, c, k, alpha)


# cross-checks

@dataclass
class AgreementReport:
    name: str
    constant: complex
    max_deviation: float
    points: int

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_deviation <= tol


def secular_agreement(
    oracle: OracleGraph,
    ks: Sequence[float],
    flux: engine.FluxLike = None,
    closed_form: Optional[ClosedForm] = None,
) -> AgreementReport:
    """
    Engine sigma against a closed form after fixing the constant between
    them at the point where the closed form is largest.
    """
    closed_form = closed_form or oracle.closed_form
    if closed_form is None:
        raise ValueError(f"{oracle.name.value} has no closed form")
    ks = np.asarray(ks, dtype=float)
    sigma, _ = engine.secular_values(oracle.graph, ks, flux)
    expected = closed_form(ks)
    reference = int(np.argmax(np.abs(expected)))
    constant = sigma[reference] / expected[reference]
    deviation = float(np.max(np.abs(sigma - constant * expected)) / max(1.0, float(np.max(np.abs(sigma)))))
    return AgreementReport(oracle.name.value, complex(constant), deviation, len(ks))


def star_form_agreement(lengths: Sequence[float], leaves: Condition, ks: Sequence[float]) -> AgreementReport:
    """
    Engine zeta of a star against its real tan-sum (Neumann leaves) or
    cot-sum (Dirichlet leaves) form; the two differ by a real constant.
    """
    leaves = VertexCondition.parse(leaves)
    ks = np.asarray(ks, dtype=float)
    if leaves is VertexCondition.NEUMANN:
        form = star_secular_neumann if len(lengths) == 3 else star_secular_neumann_general
        name = OracleName.NEUMANN_STAR
    else:
        form, name = star_secular_dirichlet, OracleName.DIRICHLET_STAR
    _, zeta = engine.secular_values(star_graph(lengths, leaves), ks)
    expected = form(lengths, ks)
    reference = int(np.argmax(np.abs(expected)))
    constant = zeta.real[reference] / expected[reference]
    deviation = float(np.max(np.abs(zeta.real - constant * expected)) / max(1.0, float(np.max(np.abs(zeta)))))
    return AgreementReport(name.value, complex(constant), deviation, len(ks))


@dataclass
class DetSReport:
    computed: float
    expected: int
    num_edges: int
    num_vertices: int
    dirichlet: int
    orthogonality: float

    @property
    def passed(self) -> bool:
        return int(round(self.computed)) == self.expected


def verify_detS(graph: MetricGraph) -> DetSReport:
    """LU determinant of S against (-1)^(|E| - |V| + n), plus the orthogonality defect of S."""
    matrices = engine.scattering_matrix(graph)
    computed = float(la.det(matrices.S))
    expected = engine.expected_det_S(graph)
    report = DetSReport(
        computed=computed,
        expected=expected,
        num_edges=graph.num_edges,
        num_vertices=graph.num_vertices,
        dirichlet=len(graph.dirichlet_vertices()),
        orthogonality=float(np.abs(matrices.S.T @ matrices.S - np.eye(graph.num_bonds)).max()),
    )
    if not report.passed:
        raise DetSMismatch(computed, expected)
    return report


@dataclass
class SpectrumComparison:
    label: str
    first: List[float]
    second: List[float]
    tolerance: float

    @property
    def compared(self) -> int:
        return min(len(self.first), len(self.second))

    @property
    def max_deviation(self) -> float:
        if len(self.first) != len(self.second):
            return math.inf
        return max((abs(x - y) for x, y in zip(self.first, self.second)), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {"check": self.label, "compared": self.compared, "max_deviation": self.max_deviation,
                "tolerance": self.tolerance, "passed": self.passed}


def verify_isospectral(
    first: MetricGraph, second: MetricGraph, n_roots: int = 30, config: Optional[SolverConfig] = None, tol: float = 1e-8
) -> SpectrumComparison:
    """First n_roots k-values of two graphs, compared pairwise."""
    return SpectrumComparison(
        "isospectral",
        lowest_roots(first, n_roots, config=config),
        lowest_roots(second, n_roots, config=config),
        tol,
    )


def verify_mandarin_decomposition(
    lengths: Sequence[float], k_max: float, config: Optional[SolverConfig] = None, tol: float = 1e-8
) -> SpectrumComparison:
    """Mandarin with edges 2L_j against the union of the Neumann and Dirichlet stars with legs L_j."""
    mandarin = flat_spectrum(find_spectrum(mandarin_graph([2 * L for L in lengths]), k_max=k_max, config=config))
    neumann = flat_spectrum(find_spectrum(star_graph(lengths, "neumann"), k_max=k_max, config=config))
    dirichlet = flat_spectrum(find_spectrum(star_graph(lengths, "dirichlet"), k_max=k_max, config=config))
    return SpectrumComparison("mandarin-decomposition", mandarin, sorted(neumann + dirichlet), tol)


def factor_roots(factor: SecularFactor, k_max: float) -> List[float]:
    """Real roots in (0, k_max] of one factor, located on its phase-centred real form."""
    points = int(math.ceil(40 * k_max * max(factor.half_length, 1e-3) / math.pi)) + 200
    ks = np.linspace(k_max * 1e-6, k_max, points)
    centred = factor.values(ks) * np.exp(-1j * ks * factor.half_length)
    use_real = np.linalg.norm(centred.real) >= np.linalg.norm(centred.imag)

    def real_form(k: float) -> float:
        value = complex(factor.values(np.array([k]))[0] * np.exp(-1j * k * factor.half_length))
        return value.real if use_real else value.imag

    values = centred.real if use_real else centred.imag
    roots = []
    for i in np.flatnonzero(values[:-1] * values[1:] < 0):
        roots.append(float(brentq(real_form, ks[i], ks[i + 1], xtol=1e-14)))
    return roots


@dataclass
class FactorizationReport:
    name: str
    factor_roots: Dict[str, List[float]]
    failures: List[Tuple[str, float, int]]
    predicted: List[float]
    computed: List[float]
    tolerance: float = 1e-7

    @property
    def divides(self) -> bool:
        return not self.failures

    @property
    def accounts_for_spectrum(self) -> bool:
        if len(self.predicted) != len(self.computed):
            return False
        return all(abs(x - y) <= self.tolerance for x, y in zip(self.predicted, self.computed))

    @property
    def passed(self) -> bool:
        return self.divides and self.accounts_for_spectrum


def factorization_smoke_test(
    graph: MetricGraph, factors: Sequence[SecularFactor], k_max: float, name: str, config: Optional[SolverConfig] = None
) -> FactorizationReport:
    """
    Zero-set check of a factorization: wherever a factor of power p vanishes
    the engine's null space has dimension >= p, and the factor roots with
    their powers reproduce the positive spectrum.
    """
    config = config or SolverConfig()
    roots: Dict[str, List[float]] = {}
    failures = []
    predicted = []
    for factor in factors:
        roots[factor.label] = factor_roots(factor, k_max)
        for k in roots[factor.label]:
            dim = engine.null_dimension(graph, k, tol=1e-6)
            if dim < factor.power:
                failures.append((factor.label, k, dim))
            predicted.extend([k] * factor.power)
    computed = flat_spectrum(find_spectrum(graph, k_max=k_max, config=config), include_zero=False)
    # roots within the last tolerance of k_max may be missing from either side
    edge = k_max - 1e-6
    predicted = sorted(k for k in predicted if k <= edge)
    computed = [k for k in computed if k <= edge]
    if failures:
        logger.warning("%s: %d factor roots are not eigenvalues", name, len(failures))
    return FactorizationReport(name, roots, failures, predicted, computed)


def tetrahedron_smoke_test(a: float, b: float, k_max: float, config: Optional[SolverConfig] = None) -> FactorizationReport:
    return factorization_smoke_test(tetrahedron_graph(a, b), tetrahedron_factors(a, b), k_max, "tetrahedron", config)


def predihedral_smoke_test(a: float, b: float, c: float, k_max: float, config: Optional[SolverConfig] = None) -> FactorizationReport:
    return factorization_smoke_test(
        predihedral_graph(a, b, c), predihedral_factors(a, b, c), k_max, "predihedral", config
    )


# dihedral chain

@dataclass
class DihedralChain:
    """
    Two dihedral copies (gamma), Dirichlet at A of copy 1 and B of copy 2
    (gamma_hat), then the B-Q edge of copy 1 and the P-A edge of copy 2
    detached (gamma_tilde).
    """

    a: float
    b: float
    c: float
    gamma: MetricGraph
    gamma_mid: MetricGraph
    gamma_hat: MetricGraph
    gamma_tilde: MetricGraph
    vertices: Dict[str, int]

    def tilde_closed_form(self, k_max: float) -> List[float]:
        """{0} u sigma u sigma with sigma = {pi n / 2a} u {pi n / 2(b + c)}."""
        sigma = []
        for length in (2 * self.a, 2 * (self.b + self.c)):
            sigma.extend(n * math.pi / length for n in range(1, int(k_max * length / math.pi) + 1))
        return [0.0] + sorted(sigma + sigma)


def dihedral_chain(a: float, b: float, c: float) -> DihedralChain:
    single = dihedral_graph(a, b, c)
    gamma, maps = disjoint_union(single, single)
    a1, b1 = maps[0][1], maps[0][2]
    a2, b2 = maps[1][1], maps[1][2]
    gamma_mid = modify_condition(gamma, a1, VertexCondition.DIRICHLET)
    gamma_hat = modify_condition(gamma_mid, b2, VertexCondition.DIRICHLET)
    # edge 3 is B-Q of copy 1, edge 4 is P-A of copy 2
    detached, leaf1 = detach_edge_end(gamma_hat, 3, b1)
    gamma_tilde, leaf2 = detach_edge_end(detached, 4, a2)
    return DihedralChain(
        a, b, c, gamma, gamma_mid, gamma_hat, gamma_tilde,
        {"A1": a1, "B1": b1, "A2": a2, "B2": b2, "leaf1": leaf1, "leaf2": leaf2},
    )


@dataclass
class ChainCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class DihedralChainReport:
    checks: List[ChainCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(ChainCheck(name, bool(passed), detail))


def _pairs_equal(values: Sequence[float], start: int, tol: float) -> Tuple[bool, str]:
    for i in range(start, len(values) - 1, 2):
        if abs(values[i] - values[i + 1]) > tol:
            return False, f"index {i + 1}: {values[i]:.12g} != {values[i + 1]:.12g}"
    return True, ""


def verify_dihedral_chain(
    a: float, b: float, c: float, k_max: float, config: Optional[SolverConfig] = None
) -> DihedralChainReport:
    """Interlacing steps and degeneracy patterns along the dihedral chain."""
    config = config or SolverConfig()
    tol = 2 * config.refine_tol
    chain = dihedral_chain(a, b, c)
    ids = chain.vertices
    report = DihedralChainReport()

    for name, run in (
        ("dirichlet-at-A1", lambda: verify_interlacing_ND(chain.gamma, ids["A1"], k_max, config)),
        ("dirichlet-at-B2", lambda: verify_interlacing_ND(chain.gamma_mid, ids["B2"], k_max, config)),
        ("merge-leaf1", lambda: verify_interlacing_merge(chain.gamma_tilde, ids["leaf1"], ids["B1"], k_max, config)),
        (
            "merge-leaf2",
            lambda: verify_interlacing_merge(
                merge_vertices(chain.gamma_tilde, ids["leaf1"], ids["B1"]), ids["leaf2"], ids["A2"], k_max, config
            ),
        ),
    ):
        interlacing = run()
        report.add(name, interlacing.passed, f"{interlacing.compared} compared")

    s = flat_spectrum(find_spectrum(chain.gamma, k_max=k_max, config=config))
    hat = flat_spectrum(find_spectrum(chain.gamma_hat, k_max=k_max, config=config))
    tilde = flat_spectrum(find_spectrum(chain.gamma_tilde, k_max=k_max, config=config))

    ok, detail = _pairs_equal(s, 0, tol)
    report.add("gamma-doubled", ok, detail)
    pattern = True
    for i in range(0, len(hat) - 1, 2):
        if 2 * i + 1 < len(s) and s[i + 1] > hat[i] + tol:
            pattern = False
        if i + 2 < len(s) and hat[i + 1] > s[i + 2] + tol:
            pattern = False
    report.add("gamma-hat-pattern", pattern)

    ok, detail = _pairs_equal(tilde, 1, tol)
    report.add("gamma-tilde-doubled", ok and tilde[:1] == [0.0], detail)
    pattern = True
    for j in range(1, len(tilde) // 2 + 1):
        if 2 * j - 2 < len(hat) and 2 * j - 1 < len(tilde) and hat[2 * j - 2] > tilde[2 * j - 1] + tol:
            pattern = False
        if 2 * j < len(tilde) and 2 * j - 1 < len(hat) and tilde[2 * j] > hat[2 * j - 1] + tol:
            pattern = False
    report.add("gamma-tilde-pattern", pattern)

    expected = [k for k in chain.tilde_closed_form(k_max) if k <= k_max - 1e-6]
    computed = [k for k in tilde if k <= k_max - 1e-6]
    agree = len(expected) == len(computed) and all(abs(x - y) <= 1e-8 for x, y in zip(expected, computed))
    report.add("gamma-tilde-spectrum", agree, f"{len(computed)} values")

    single = flat_spectrum(find_spectrum(dihedral_graph(a, b, c), k_max=k_max, config=config))
    sigma = sorted(chain.tilde_closed_form(k_max)[1::2])
    lemma = all(
        single[n] - tol <= sigma[n] and (n + 1 >= len(single) or sigma[n] <= single[n + 1] + tol)
        for n in range(min(len(single), len(sigma)))
    )
    report.add("interval-lemma", lemma)
    return report


# nodal formula agreement

@dataclass
class DihedralFormulaRow:
    n: int
    k: float
    counted: Optional[int]
    printed: int
    derived: int


@dataclass
class DihedralFormulaReport:
    lengths: Tuple[float, float, float]
    rows: List[DihedralFormulaRow]

    def _agreement(self, attribute: str) -> float:
        valid = [r for r in self.rows if r.counted is not None]
        if not valid:
            return 0.0
        return sum(1 for r in valid if getattr(r, attribute) == r.counted) / len(valid)

    @property
    def printed_agreement(self) -> float:
        return self._agreement("printed")

    @property
    def derived_agreement(self) -> float:
        return self._agreement("derived")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lengths": list(self.lengths),
            "checked": sum(1 for r in self.rows if r.counted is not None),
            "printed_agreement": self.printed_agreement,
            "derived_agreement": self.derived_agreement,
        }


def dihedral_formula_report(
    a: float, b: float, c: float, n_max: int = 40, config: Optional[SolverConfig] = None
) -> DihedralFormulaReport:
    """Numerical zero counts of the dihedral eigenfunctions next to both closed-form counts."""
    graph = dihedral_graph(a, b, c)
    k_max = math.pi * (n_max + graph.num_edges + 1) / graph.total_length
    rows = []
    for entry in nodal_surplus_profile(graph, k_max, config):
        if entry.n > n_max:
            break
        rows.append(
            DihedralFormulaRow(
                n=entry.n,
                k=entry.k,
                counted=entry.phi if entry.valid else None,
                printed=dihedral_nodal_formula(a, b, c, entry.n),
                derived=dihedral_nodal_count(a, b, c, entry.n),
            )
        )
    return DihedralFormulaReport((a, b, c), rows)


# random corpus

def random_corpus(seed: int = 2024, count: int = 25) -> List[Tuple[str, MetricGraph]]:
    """Seeded mix of trees, stars, mandarins and lassos with at most eight edges."""
    rng = np.random.default_rng(seed)
    kinds = ("tree", "star", "mandarin", "lasso")
    corpus = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        if kind == "tree":
            size = int(rng.integers(3, 9))
            edges = [(int(rng.integers(0, v)), v, float(rng.uniform(0.5, 2.0))) for v in range(1, size)]
            degree = np.bincount([u for u, _, _ in edges] + [v for _, v, _ in edges], minlength=size)
            conditions = {v: "dirichlet" for v in range(size) if degree[v] == 1 and rng.random() < 0.3}
            graph = build_graph(range(size), edges, conditions)
        elif kind == "star":
            legs = int(rng.integers(3, 7))
            leaves = ["dirichlet" if rng.random() < 0.4 else "neumann" for _ in range(legs)]
            graph = star_graph(rng.uniform(0.5, 2.0, legs).tolist(), leaves)
        elif kind == "mandarin":
            graph = mandarin_graph(rng.uniform(0.5, 2.0, int(rng.integers(2, 6))).tolist())
        else:
            stick, loop = rng.uniform(0.5, 2.0, 2).tolist()
            graph = build_graph([0, 1], [(0, 1, stick), (0, 0, loop)], {1: "dirichlet"} if rng.random() < 0.5 else None)
        corpus.append((f"{kind}-{i}", graph))
    return corpus


if __name__ == "__main__":
    pair = dihedral_pair(math.pi, 1.0, math.sqrt(2))
    print(verify_isospectral(pair[0].graph, pair[1].graph, 10).to_dict())
    print(tetrahedron_smoke_test(1.0, math.sqrt(2), 6.0).passed)
