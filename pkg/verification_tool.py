"""
Verification Tool

Named verification suites run against the built-in oracle graphs and the
seeded random corpus. Every check lands in one ReportDocument with its
tolerance and pass/fail flag; a failed check does not stop the suite.
"""

import json
import logging
import math
from enum import Enum
from typing import Any, Callable, List, Optional, Tuple

import numpy as np

import reference_oracles as oracles
import secular_engine as engine
from graph_errors import QuantumGraphError, error_payload
from graph_file import load_problem
from magnetic_flux import is_mandarin, mandarin_surplus_bounds, verify_flux_symmetry, verify_magnetic_nodal
from metric_graph import MetricGraph, VertexCondition
from report_file_tool import ReportDocument
from spectral_solver import (
    SolverConfig,
    find_spectrum,
    flat_spectrum,
    root_order,
    verify_interlacing_ND,
    verify_interlacing_merge,
)

logger = logging.getLogger(__name__)

DIHEDRAL_LENGTHS = (math.pi, 1.0, math.sqrt(2))
# highest dihedral root of the reference table is 2.5680
DIHEDRAL_TABLE_KMAX = 2.6

CheckResult = Tuple[bool, Any, str]


class Suite(str, Enum):
    INTERLACING = "interlacing"
    ISOSPECTRAL = "isospectral"
    MAGNETIC_NODAL = "magnetic-nodal"
    ORACLES = "oracles"
    ALL = "all"

    def members(self) -> List["Suite"]:
        if self is Suite.ALL:
            return [Suite.INTERLACING, Suite.ISOSPECTRAL, Suite.MAGNETIC_NODAL, Suite.ORACLES]
        return [self]


class VerificationTool:
    """Tool for running verification suites"""

    def __init__(self):
        self.name = "Verification Tool"
        self.description = (
            "Runs a verification suite and reports every check with its tolerance. "
            "Suites: 'interlacing' - Neumann-to-Dirichlet and gluing interlacing on the corpus "
            "and the dihedral chain, 'isospectral' - dihedral graph against dihedral tree, "
            "'magnetic-nodal' - Morse index of lambda_n(alpha) at zero flux against the nodal surplus, "
            "'oracles' - engine against closed forms, det S, real zeta and factorizations, "
            "'all' - every suite."
        )

    def run_suite(
        self,
        suite: str,
        graph_path: Optional[str] = None,
        k_max: float = 10.0,
        seed: int = 2024,
        grid_step: Optional[float] = None,
        tol: Optional[float] = None,
    ) -> str:
        """
        Run a verification suite

        Args:
            suite: 'interlacing', 'isospectral', 'magnetic-nodal', 'oracles' or 'all'
            graph_path: Optional graph file; interlacing and magnetic-nodal then run on it
            k_max: Scan ceiling for suites that scan a whole spectrum
            seed: Seed of the random corpus and random length triples
            grid_step: Scan spacing; default pi / (20 L)
            tol: Root accuracy in k
        """
        try:
            selected = Suite(suite)
            config = SolverConfig.from_flags(grid_step, tol)
            graph = load_problem(graph_path)[0] if graph_path else None
            document = ReportDocument(
                "verify",
                {"suite": selected.value, "graph": graph_path, "k_max": k_max, "seed": seed, **config.to_dict()},
                ["check", "value", "tolerance", "passed", "detail"],
            )
            runners = {
                Suite.INTERLACING: lambda: self._interlacing(document, graph, k_max, seed, config),
                Suite.ISOSPECTRAL: lambda: self._isospectral(document, seed, config),
                Suite.MAGNETIC_NODAL: lambda: self._magnetic_nodal(document, graph, k_max, seed, config),
                Suite.ORACLES: lambda: self._oracles(document, seed, config),
            }
            for member in selected.members():
                logger.info("Running suite %s", member.value)
                runners[member]()
            document.rows = [[c["check"], c["value"], c["tolerance"], c["passed"], c["detail"]] for c in document.checks]
            failed = sum(1 for c in document.checks if not c["passed"])
            document.notes = {"checks": len(document.checks), "failed": failed}
            return json.dumps({"status": "success", "report": document.to_dict()}, default=str)
        except Exception as e:
            logger.debug("verify failed", exc_info=True)
            return json.dumps(error_payload(e), default=str)

    def _guard(
        self, document: ReportDocument, name: str, tolerance: Optional[float], check: Callable[[], CheckResult]
    ) -> None:
        try:
            passed, value, detail = check()
        except QuantumGraphError as exc:
            logger.warning("%s: %s", name, exc.message)
            passed, value, detail = False, None, f"{type(exc).__name__}: {exc.message}"
        document.add_check(name, passed, tolerance, value, detail)

    # interlacing

    def _interlacing(
        self, document: ReportDocument, graph: Optional[MetricGraph], k_max: float, seed: int, config: SolverConfig
    ) -> None:
        tolerance = 2 * config.refine_tol
        subjects = [("graph", graph)] if graph is not None else oracles.random_corpus(seed)
        for label, subject in subjects:
            neumann = [v.id for v in subject.vertices if v.condition is VertexCondition.NEUMANN]
            targets = neumann if graph is not None else neumann[:1]
            for v in targets:
                self._guard(
                    document,
                    f"interlacing/neumann-dirichlet/{label}/v{v}",
                    tolerance,
                    lambda v=v: self._interlacing_result(verify_interlacing_ND(subject, v, k_max, config)),
                )
            pairs = [(u, w) for i, u in enumerate(neumann) for w in neumann[i + 1:]]
            for u, w in pairs if graph is not None else pairs[:1]:
                self._guard(
                    document,
                    f"interlacing/merge/{label}/v{u}-v{w}",
                    tolerance,
                    lambda u=u, w=w: self._interlacing_result(verify_interlacing_merge(subject, u, w, k_max, config)),
                )
        if graph is None:
            a, b, c = DIHEDRAL_LENGTHS
            chain_kmax = min(k_max, 4.0)

            def chain() -> None:
                report = oracles.verify_dihedral_chain(a, b, c, chain_kmax, config)
                for step in report.checks:
                    document.add_check(f"interlacing/dihedral-chain/{step.name}", step.passed, tolerance, None, step.detail)

            try:
                chain()
            except QuantumGraphError as exc:
                document.add_check("interlacing/dihedral-chain", False, tolerance, None, exc.message)

    @staticmethod
    def _interlacing_result(report) -> CheckResult:
        detail = f"equalities at n={report.equalities}" if report.equalities else ""
        return report.passed, report.compared, detail

    # isospectrality

    def _isospectral(self, document: ReportDocument, seed: int, config: SolverConfig) -> None:
        rng = np.random.default_rng(seed)
        triples = [DIHEDRAL_LENGTHS] + [tuple(rng.uniform(0.5, 2.0, 3).tolist()) for _ in range(5)]
        for a, b, c in triples:

            def compare(a=a, b=b, c=c) -> CheckResult:
                result = oracles.verify_isospectral(
                    oracles.dihedral_graph(a, b, c), oracles.dihedral_tree_graph(a, b, c), 30, config
                )
                return result.passed, result.max_deviation, f"{result.compared} roots"

            self._guard(document, f"isospectral/dihedral-tree/({a:.6g},{b:.6g},{c:.6g})", 1e-8, compare)

        lengths = rng.uniform(0.5, 2.0, 3).tolist()

        def decomposition() -> CheckResult:
            result = oracles.verify_mandarin_decomposition(lengths, 8.0, config)
            return result.passed, result.max_deviation, f"{result.compared} values"

        self._guard(document, "isospectral/mandarin-decomposition", 1e-8, decomposition)

    # magnetic-nodal

    def _magnetic_nodal(
        self, document: ReportDocument, graph: Optional[MetricGraph], k_max: float, seed: int, config: SolverConfig
    ) -> None:
        if graph is not None:
            subjects = [("graph", graph, k_max)]
        else:
            rng = np.random.default_rng(seed)
            mandarin = oracles.mandarin_graph(rng.uniform(0.5, 2.0, 3).tolist())
            subjects = [
                ("dihedral", oracles.dihedral_graph(*DIHEDRAL_LENGTHS), DIHEDRAL_TABLE_KMAX),
                ("mandarin3", mandarin, 6 * math.pi / mandarin.total_length),
            ]
        for label, subject, ceiling in subjects:

            def morse(subject=subject, ceiling=ceiling) -> CheckResult:
                report = verify_magnetic_nodal(subject, ceiling, config)
                classes = ",".join(r.classification or "-" for r in report.rows)
                return report.passed, report.checked, f"classification {classes}"

            self._guard(document, f"magnetic-nodal/morse-equals-surplus/{label}", None, morse)
            if is_mandarin(subject):

                def bounds(subject=subject, ceiling=ceiling) -> CheckResult:
                    report = mandarin_surplus_bounds(subject, ceiling, config)
                    return report.passed, len(report.rows), f"violations {report.violations}"

                self._guard(document, f"magnetic-nodal/mandarin-surplus-bounds/{label}", None, bounds)

        if graph is None:

            def symmetry() -> CheckResult:
                dihedral = oracles.dihedral_graph(*DIHEDRAL_LENGTHS)
                report = verify_flux_symmetry(dihedral, 5, [(0.7,), (2.1,), (math.pi - 0.3,)], config)
                return report.passed, report.max_deviation, f"{len(report.rows)} samples"

            self._guard(document, "magnetic-nodal/flux-symmetry/dihedral", 2 * config.refine_tol, symmetry)

    # oracles

    def _oracles(self, document: ReportDocument, seed: int, config: SolverConfig) -> None:
        rng = np.random.default_rng(seed)
        corpus = oracles.random_corpus(seed)

        for length in (1.0, math.pi, math.sqrt(2)):
            for left, right in (("neumann", "neumann"), ("dirichlet", "dirichlet"), ("neumann", "dirichlet")):

                def interval(length=length, left=left, right=right) -> CheckResult:
                    k_max = 30.25 * math.pi / length
                    graph = oracles.interval_graph(length, left, right)
                    computed = flat_spectrum(find_spectrum(graph, k_max=k_max, config=config), include_zero=False)[:30]
                    expected = [k for k in oracles.interval_spectrum(length, left, right, k_max) if k > 0][:30]
                    if len(computed) != len(expected):
                        return False, None, f"{len(computed)} roots, expected {len(expected)}"
                    deviation = max(abs(x - y) for x, y in zip(computed, expected))
                    return deviation < 1e-10, deviation, "30 roots"

                self._guard(document, f"oracles/interval/{left[0]}{right[0]}/L={length:.6g}", 1e-10, interval)

        for label, graph in corpus:

            def det_s(graph=graph) -> CheckResult:
                report = oracles.verify_detS(graph)
                return report.passed and report.orthogonality < 1e-12, report.orthogonality, f"det S = {report.expected}"

            def real_zeta(graph=graph) -> CheckResult:
                ks = np.linspace(0.01, 20.0, 500)
                _, zeta = engine.secular_values(graph, ks)
                defect = float(np.max(np.abs(zeta.imag) / np.maximum(1.0, np.abs(zeta))))
                return defect < 1e-9, defect, "500 points"

            self._guard(document, f"oracles/det-S/{label}", 1e-12, det_s)
            self._guard(document, f"oracles/real-zeta/{label}", 1e-9, real_zeta)

        a, b, c = DIHEDRAL_LENGTHS
        catalogue = [
            (oracles.lasso(1.0, math.sqrt(2)), None, None),
            (oracles.mandarin3(1.0, math.sqrt(2), math.sqrt(3)), None, None),
            (oracles.neumann_star((1.0, math.sqrt(2), math.sqrt(3))), None, None),
            (oracles.dirichlet_star((1.0, math.sqrt(2), math.sqrt(3))), None, None),
            (oracles.dihedral(a, b, c), None, None),
            (oracles.dihedral_tree(a, b, c), None, None),
            (oracles.dihedral(a, b, c), (0.9,), lambda k: oracles.dihedral_secular(a, b, c, k, 0.9)),
        ]
        ks = rng.uniform(0.05, 10.0, 200)
        for oracle, flux, closed in catalogue:

            def agreement(oracle=oracle, flux=flux, closed=closed) -> CheckResult:
                report = oracles.secular_agreement(oracle, ks, flux, closed)
                return report.passed(), report.max_deviation, f"{report.points} points"

            suffix = "/magnetic" if flux else ""
            self._guard(document, f"oracles/closed-form/{oracle.name.value}{suffix}", 1e-10, agreement)

        star_forms = [
            ((1.0, math.sqrt(2), math.sqrt(3)), "neumann"),
            ((1.0, 1.0), "dirichlet"),
            ((1.0, math.sqrt(2), math.sqrt(3)), "dirichlet"),
            ((0.8, 1.1, math.sqrt(5), math.sqrt(7)), "dirichlet"),
        ]
        for lengths, leaves in star_forms:

            def star_form(lengths=lengths, leaves=leaves) -> CheckResult:
                report = oracles.star_form_agreement(lengths, leaves, ks)
                return report.passed(), report.max_deviation, f"zeta / form = {report.constant.real:.12g}"

            self._guard(document, f"oracles/star-form/{leaves}/N={len(lengths)}", 1e-10, star_form)

        def multiplicity() -> CheckResult:
            star = oracles.star_graph([math.pi / 2] * 3)
            spectrum = find_spectrum(star, k_max=1.5, config=config)
            roots = [r for r in spectrum.roots if abs(r.k - 1.0) < 1e-8]
            dimension = roots[0].multiplicity if roots else 0
            order = root_order(star, 1.0)
            return dimension == 2 and order == 2, dimension, f"zeta root order {order}"

        self._guard(document, "oracles/multiplicity/equilateral-star", 1e-8, multiplicity)

        def tetrahedron() -> CheckResult:
            report = oracles.tetrahedron_smoke_test(1.0, math.sqrt(2), 6.0, config)
            return report.passed, len(report.computed), f"failures {report.failures}"

        def predihedral() -> CheckResult:
            report = oracles.predihedral_smoke_test(a, b, c, 2.0, config)
            return report.passed, len(report.computed), f"failures {report.failures}"

        self._guard(document, "oracles/factorization/tetrahedron", 1e-7, tetrahedron)
        self._guard(document, "oracles/factorization/predihedral", 1e-7, predihedral)

        triples = [DIHEDRAL_LENGTHS] + [tuple(rng.uniform(0.5, 2.0, 3).tolist()) for _ in range(4)]
        for lengths in triples:

            def formula(lengths=lengths) -> CheckResult:
                report = oracles.dihedral_formula_report(*lengths, 40, config)
                summary = report.to_dict()
                detail = f"printed formula agrees on {summary['printed_agreement']:.3f} of {summary['checked']} counts"
                return summary["checked"] > 0, summary["derived_agreement"], detail

            label = ",".join(f"{x:.6g}" for x in lengths)
            self._guard(document, f"oracles/dihedral-nodal-formula/({label})", None, formula)


if __name__ == "__main__":
    tool = VerificationTool()
    print(tool.run_suite("isospectral"))
