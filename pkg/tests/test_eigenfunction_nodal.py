import math

import numpy as np
import pytest

from conftest import DIHEDRAL, DIHEDRAL_TABLE_K, DIHEDRAL_TABLE_SURPLUS, DIHEDRAL_TABLE_ZEROS
from eigenfunction_nodal import (
    CommensurateTie,
    count_sign_changes,
    count_zeros,
    cycle_zero_counts,
    dihedral_nodal_count,
    dihedral_nodal_formula,
    evaluate,
    nodal_surplus_profile,
    reconstruct,
    reconstruct_basis,
    students_count,
    students_count_bruteforce,
    vertex_residuals,
    vertex_values,
)
from graph_errors import ComplexEigenfunction, DegenerateEigenvalue, IndexBeyondSpectrum, VertexZero
from metric_graph import build_graph
from reference_oracles import random_corpus
from spectral_solver import find_spectrum


class TestReconstruct:
    def test_dirichlet_interval_sines(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=10.0)
        ef = reconstruct(dd_interval, spectrum, 2)
        assert ef.is_real_normalized
        assert ef.k == pytest.approx(2 * math.pi)
        xs = np.linspace(0.0, 1.0, 9)
        values = evaluate(ef, dd_interval, 0, xs)
        np.testing.assert_allclose(np.abs(values), np.abs(np.sin(2 * math.pi * xs)), atol=1e-8)
        assert ef.sup_norm == pytest.approx(1.0)

    def test_zero_mode_is_constant(self, lasso):
        spectrum = find_spectrum(lasso, k_max=3.0)
        ef = reconstruct(lasso, spectrum, 1)
        assert ef.k == 0.0
        values = vertex_values(ef, lasso)
        assert abs(values[0]) == pytest.approx(1.0) and abs(values[1]) == pytest.approx(1.0)

    def test_vertex_conditions_hold(self, mandarin):
        spectrum = find_spectrum(mandarin, k_max=6.0)
        for n in range(2, spectrum.total_count + 1):
            try:
                ef = reconstruct(mandarin, spectrum, n)
            except DegenerateEigenvalue:
                continue
            continuity, current = vertex_residuals(ef, mandarin)
            assert continuity < 1e-8 and current < 1e-8

    def test_degenerate_eigenvalue(self, equilateral_star):
        spectrum = find_spectrum(equilateral_star, k_max=1.5)
        index = spectrum.lambda0_multiplicity + 1
        with pytest.raises(DegenerateEigenvalue):
            reconstruct(equilateral_star, spectrum, index)
        basis = reconstruct_basis(equilateral_star, spectrum, index)
        assert len(basis) == 2
        assert all(ef.is_real_normalized for ef in basis)

    def test_index_outside_spectrum(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=10.0)
        with pytest.raises(IndexBeyondSpectrum):
            reconstruct(dd_interval, spectrum, 4)
        with pytest.raises(IndexBeyondSpectrum):
            reconstruct(dd_interval, spectrum, 0)

    def test_magnetic_eigenfunction_is_complex(self, lasso):
        spectrum = find_spectrum(lasso, (0.9,), k_max=3.0)
        ef = reconstruct(lasso, spectrum, 1)
        assert not ef.is_real_normalized
        with pytest.raises(ComplexEigenfunction):
            count_zeros(ef, lasso)


class TestCountZeros:
    def test_dirichlet_interval(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=20.0)
        for n in range(1, spectrum.total_count + 1):
            nodal = count_zeros(reconstruct(dd_interval, spectrum, n), dd_interval)
            assert nodal.phi == n - 1
            assert nodal.surplus == 0

    def test_neumann_interval(self, nn_interval):
        spectrum = find_spectrum(nn_interval, k_max=10.0)
        phis = [count_zeros(reconstruct(nn_interval, spectrum, n), nn_interval).phi for n in (1, 2, 3)]
        assert phis == [0, 1, 2]

    def test_vertex_zero(self):
        # cos(pi x / 2) on a path of two unit edges vanishes at the middle vertex
        path = build_graph([0, 1, 2], [(0, 1, 1.0), (1, 2, 1.0)])
        spectrum = find_spectrum(path, k_max=2.0)
        ef = reconstruct(path, spectrum, 2)
        assert ef.k == pytest.approx(math.pi / 2)
        with pytest.raises(VertexZero):
            count_zeros(ef, path)
        nodal = count_zeros(ef, path, strict=False)
        assert nodal.vanishes_on_vertex and nodal.vanishing_vertices == [1]

    def test_sign_changes_agree(self, dihedral):
        spectrum = find_spectrum(dihedral, k_max=2.6)
        for n in (3, 5, 8):
            ef = reconstruct(dihedral, spectrum, n)
            assert count_sign_changes(ef, dihedral) == count_zeros(ef, dihedral).phi

    def test_dihedral_table(self, dihedral):
        spectrum = find_spectrum(dihedral, k_max=2.6)
        entries = nodal_surplus_profile(dihedral, 2.6, spectrum=spectrum)[:9]
        assert [e.k for e in entries] == pytest.approx(DIHEDRAL_TABLE_K, abs=2e-3)
        assert [e.phi for e in entries] == DIHEDRAL_TABLE_ZEROS
        assert [e.surplus for e in entries] == DIHEDRAL_TABLE_SURPLUS
        assert all(e.valid for e in entries)


class TestNodalSurplus:
    @pytest.mark.slow
    def test_surplus_bounds_on_corpus(self):
        for _, graph in random_corpus(seed=2024, count=12):
            beta = graph.beta
            for entry in nodal_surplus_profile(graph, 30.0 / graph.total_length):
                if entry.valid:
                    assert 0 <= entry.surplus <= beta

    @pytest.mark.parametrize("fixture", ["lasso", "mandarin", "dihedral"])
    def test_even_zeros_on_cycles(self, request, fixture):
        graph = request.getfixturevalue(fixture)
        entries = nodal_surplus_profile(graph, 25.0 / graph.total_length)
        assert entries
        assert not any("odd-cycle" in e.flags for e in entries)

    def test_cycle_zero_counts_cover_pairs(self, mandarin):
        spectrum = find_spectrum(mandarin, k_max=6.0)
        for n in range(2, spectrum.total_count + 1):
            try:
                nodal = count_zeros(reconstruct(mandarin, spectrum, n), mandarin)
            except (DegenerateEigenvalue, VertexZero):
                continue
            counts = cycle_zero_counts(nodal, mandarin)
            # two basis cycles and their symmetric difference
            assert len(counts) == 3
            assert all(c.even for c in counts)


class TestClosedFormCounts:
    def test_dihedral_count_matches_table(self):
        assert [dihedral_nodal_count(*DIHEDRAL, n) for n in range(1, 10)] == DIHEDRAL_TABLE_ZEROS

    def test_printed_formula_has_opposite_parity_at_n1(self):
        assert dihedral_nodal_formula(*DIHEDRAL, 1) == 1
        assert dihedral_nodal_count(*DIHEDRAL, 1) == 0

    def test_students_count_against_bruteforce(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            alpha, beta = rng.uniform(0.1, 10.0, 2)
            n = int(rng.integers(1, 200))
            ratio = alpha * n / (alpha + beta)
            if abs(ratio - round(ratio)) < 1e-9:
                continue
            assert students_count(alpha, beta, n) == students_count_bruteforce(alpha, beta, n)

    def test_students_count_tie(self):
        with pytest.raises(CommensurateTie):
            students_count(1.0, 1.0, 4)
        assert students_count(1.0, 1.0, 4, strict=False) == 2
