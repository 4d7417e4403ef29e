import math

import numpy as np
import pytest
from scipy.optimize import brentq

from conftest import DIHEDRAL
from reference_oracles import (
    dihedral,
    dihedral_chain,
    dihedral_formula_report,
    dihedral_pair,
    interval,
    interval_spectrum,
    lasso,
    mandarin3,
    neumann_star,
    dirichlet_star,
    predihedral_smoke_test,
    random_corpus,
    secular_agreement,
    star_form_agreement,
    star_graph,
    star_secular_dirichlet,
    star_secular_neumann,
    tetrahedron_smoke_test,
    verify_detS,
    verify_dihedral_chain,
    verify_isospectral,
    verify_mandarin_decomposition,
)
from spectral_solver import find_spectrum

RNG_KS = np.sort(np.random.default_rng(2024).uniform(0.05, 20.0, 200))


class TestClosedForms:
    @pytest.mark.parametrize(
        "oracle",
        [
            interval(1.0, "neumann", "dirichlet"),
            interval(math.sqrt(2), "dirichlet", "dirichlet"),
            neumann_star((1.0, math.sqrt(2), math.sqrt(3))),
            dirichlet_star((0.8, 1.1, math.sqrt(5))),
            lasso(1.0, math.sqrt(2)),
            mandarin3(1.0, math.sqrt(2), math.sqrt(3)),
            dihedral(*DIHEDRAL),
        ],
        ids=lambda o: o.name.value,
    )
    def test_engine_matches_closed_form(self, oracle):
        report = secular_agreement(oracle, RNG_KS)
        assert report.passed(), report.max_deviation

    def test_dihedral_with_flux(self):
        graph, _, closed = dihedral_pair(*DIHEDRAL)
        report = secular_agreement(graph, RNG_KS, (0.9,), lambda k: closed(k, 0.9))
        assert report.passed()

    def test_isospectral_pair_shares_closed_form(self):
        _, tree, closed = dihedral_pair(*DIHEDRAL)
        assert secular_agreement(tree, RNG_KS, closed_form=closed).passed()

    def test_missing_closed_form(self):
        with pytest.raises(ValueError):
            secular_agreement(neumann_star((1.0, 2.0, 3.0, 4.0)), RNG_KS)

    def test_interval_spectrum(self):
        assert interval_spectrum(1.0, "neumann", "dirichlet", 5.0) == pytest.approx([math.pi / 2, 3 * math.pi / 2])
        assert interval_spectrum(1.0, "neumann", "neumann", 4.0)[0] == 0.0


class TestStarForms:
    def test_equilateral_neumann_star_vanishes_to_second_order(self):
        lengths = (math.pi / 2,) * 3
        h = 1e-4
        value = float(star_secular_neumann(lengths, 1.0))
        plus, minus = float(star_secular_neumann(lengths, 1 + h)), float(star_secular_neumann(lengths, 1 - h))
        assert abs(value) < 1e-12
        assert abs((plus - minus) / (2 * h)) < 1e-12
        assert abs((plus - 2 * value + minus) / (h * h)) > 1.0

    def test_neumann_form_is_tan_sum_off_poles(self):
        lengths = (1.0, math.sqrt(2), math.sqrt(3))
        cosines = np.array([np.cos(RNG_KS * L) for L in lengths])
        ks = RNG_KS[np.min(np.abs(cosines), axis=0) > 1e-2]
        tan_sum = sum(np.tan(ks * L) for L in lengths)
        product = np.prod([np.cos(ks * L) for L in lengths], axis=0)
        np.testing.assert_allclose(star_secular_neumann(lengths, ks) / product, tan_sum, rtol=1e-9, atol=1e-12)

    def test_neumann_form_takes_three_legs(self):
        with pytest.raises(ValueError):
            star_secular_neumann((1.0, 2.0), 1.0)

    @pytest.mark.parametrize(
        "lengths,leaves",
        [
            ((1.0, math.sqrt(2), math.sqrt(3)), "neumann"),
            ((0.75, 0.75), "dirichlet"),
            ((0.8, 1.1, math.sqrt(5)), "dirichlet"),
            ((0.8, 1.1, math.sqrt(5), math.sqrt(7)), "dirichlet"),
        ],
    )
    def test_engine_zeta_is_a_multiple_of_the_form(self, lengths, leaves):
        report = star_form_agreement(lengths, leaves, RNG_KS)
        assert report.passed(), report.max_deviation
        assert abs(report.constant.imag) < 1e-12

    def test_dirichlet_star_one_root_between_poles(self):
        lengths = (0.8, 1.1, math.sqrt(5))
        k_max = 12.0
        poles = sorted(m * math.pi / L for L in lengths for m in range(1, int(k_max * L / math.pi) + 1))
        edges = [poles[0] * 1e-3] + poles
        expected = [
            brentq(lambda k: float(star_secular_dirichlet(lengths, k)), lo, hi, xtol=1e-14)
            for lo, hi in zip(edges, edges[1:])
        ]
        spectrum = find_spectrum(star_graph(lengths, "dirichlet"), k_max=k_max)
        computed = [r.k for r in spectrum.roots if r.k < poles[-1]]
        assert spectrum.lambda0_multiplicity == 0
        assert all(r.multiplicity == 1 for r in spectrum.roots)
        assert computed == pytest.approx(expected, abs=1e-9)
        for root, lo, hi in zip(computed, edges, edges[1:]):
            assert lo < root < hi

    def test_two_leg_dirichlet_star_is_an_interval(self):
        L = 0.75
        ks = np.linspace(0.1, 10.0, 50)
        np.testing.assert_allclose(star_secular_dirichlet((L, L), ks), np.sin(2 * ks * L), atol=1e-12)
        spectrum = find_spectrum(star_graph((L, L), "dirichlet"), k_max=10.0)
        assert [r.k for r in spectrum.roots] == pytest.approx([n * math.pi / (2 * L) for n in range(1, 5)], abs=1e-10)

    def test_dirichlet_form_needs_two_legs(self):
        with pytest.raises(ValueError):
            star_secular_dirichlet((1.0,), 1.0)


class TestDetS:
    @pytest.mark.parametrize("name,graph", random_corpus(seed=11, count=8))
    def test_predicted_sign(self, name, graph):
        report = verify_detS(graph)
        assert report.passed
        assert abs(report.computed) == pytest.approx(1.0)


class TestIsospectral:
    def test_dihedral_pair(self):
        first, second, _ = dihedral_pair(*DIHEDRAL)
        report = verify_isospectral(first.graph, second.graph, n_roots=30)
        assert report.compared == 30
        assert report.passed, report.max_deviation

    @pytest.mark.slow
    def test_random_triples(self):
        rng = np.random.default_rng(2024)
        for _ in range(5):
            first, second, _ = dihedral_pair(*rng.uniform(0.5, 2.0, 3))
            assert verify_isospectral(first.graph, second.graph, n_roots=30).passed

    def test_mandarin_decomposition(self):
        report = verify_mandarin_decomposition((1.0, math.sqrt(2), math.sqrt(3)), k_max=8.0)
        assert report.passed, report.max_deviation
        assert report.compared > 5


class TestDihedralChain:
    def test_chain_vertices(self):
        chain = dihedral_chain(*DIHEDRAL)
        assert chain.gamma.num_edges == 8
        assert {"A1", "B2", "leaf1", "leaf2"} <= set(chain.vertices)
        assert chain.tilde_closed_form(2.0)[0] == 0.0

    @pytest.mark.slow
    def test_chain_checks_pass(self):
        report = verify_dihedral_chain(*DIHEDRAL, k_max=4.0)
        failed = [c.name for c in report.checks if not c.passed]
        assert report.passed, failed


class TestSmokeTests:
    @pytest.mark.slow
    def test_tetrahedron(self):
        report = tetrahedron_smoke_test(1.0, math.sqrt(2), k_max=6.0)
        assert report.divides and report.accounts_for_spectrum

    @pytest.mark.slow
    def test_predihedral(self):
        report = predihedral_smoke_test(*DIHEDRAL, k_max=3.0)
        assert report.passed


class TestDihedralFormula:
    def test_derived_count_beats_printed(self):
        report = dihedral_formula_report(*DIHEDRAL, n_max=9)
        assert report.derived_agreement == 1.0
        assert report.printed_agreement < 1.0
        assert report.to_dict()["checked"] == 9


class TestCorpus:
    def test_deterministic(self):
        first = random_corpus(seed=2024, count=6)
        second = random_corpus(seed=2024, count=6)
        assert [name for name, _ in first] == [name for name, _ in second]
        assert all(a == b for (_, a), (_, b) in zip(first, second))

    def test_edge_bound(self):
        assert all(graph.num_edges <= 8 for _, graph in random_corpus(count=25))
