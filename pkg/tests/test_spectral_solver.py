import math

import numpy as np
import pytest

from graph_errors import BeyondScanCeiling, InterlacingViolation, InvalidSolverConfig, NotNeumann, WeylViolation
from metric_graph import build_graph
from reference_oracles import interval_graph, interval_spectrum, lasso_graph, random_corpus
from spectral_solver import (
    SolverConfig,
    Spectrum,
    SpectralRoot,
    check_weyl,
    counting_function,
    find_spectrum,
    flat_spectrum,
    interlace,
    lowest_roots,
    root_order,
    verify_interlacing_ND,
    verify_interlacing_merge,
    weyl_gap,
    zero_mode_multiplicity,
)

CONDITIONS = [("neumann", "neumann"), ("dirichlet", "dirichlet"), ("neumann", "dirichlet")]


class TestSolverConfig:
    @pytest.mark.parametrize(
        "changes", [{"grid_step": -0.1}, {"refine_tol": 0.0}, {"cluster_gap": math.nan}, {"max_rescans": -1}]
    )
    def test_rejects_bad_values(self, changes):
        with pytest.raises(InvalidSolverConfig):
            SolverConfig(**changes)

    def test_from_flags(self):
        config = SolverConfig.from_flags(grid_step=0.01, tol=1e-9)
        assert config.grid_step == 0.01 and config.refine_tol == 1e-9
        assert SolverConfig.from_flags() == SolverConfig()

    def test_default_step(self, star):
        assert SolverConfig().step_for(star) == pytest.approx(math.pi / (20 * star.total_length))

    def test_rejects_bad_ceiling(self, star):
        with pytest.raises(InvalidSolverConfig):
            find_spectrum(star, k_max=0.0)


class TestIntervalSpectra:
    @pytest.mark.parametrize("length", [1.0, math.pi, math.sqrt(2)])
    @pytest.mark.parametrize("left,right", CONDITIONS)
    def test_first_thirty_roots(self, length, left, right):
        k_max = 30.25 * math.pi / length
        spectrum = find_spectrum(interval_graph(length, left, right), k_max=k_max)
        computed = flat_spectrum(spectrum, include_zero=False)[:30]
        expected = [k for k in interval_spectrum(length, left, right, k_max) if k > 0][:30]
        assert len(computed) == 30
        np.testing.assert_allclose(computed, expected, rtol=0, atol=1e-10)
        assert all(r.multiplicity == 1 for r in spectrum.roots)

    def test_dirichlet_interval_rows(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=10.0)
        np.testing.assert_allclose(spectrum.ks, [math.pi, 2 * math.pi, 3 * math.pi], atol=1e-10)
        assert spectrum.lambda0_multiplicity == 0
        assert spectrum.roots[0].eigenvalue == pytest.approx(math.pi ** 2)

    def test_neumann_interval_has_zero_mode(self, nn_interval):
        spectrum = find_spectrum(nn_interval, k_max=4.0)
        assert spectrum.lambda0_multiplicity == 1
        assert flat_spectrum(spectrum)[:2] == [0.0, pytest.approx(math.pi)]


class TestMultiplicity:
    def test_equilateral_star(self, equilateral_star):
        spectrum = find_spectrum(equilateral_star, k_max=3.5)
        near = [r for r in spectrum.roots if abs(r.k - 1.0) < 1e-8]
        assert len(near) == 1 and near[0].multiplicity == 2
        assert root_order(equilateral_star, 1.0) == 2

    def test_simple_root_order(self, dd_interval):
        assert root_order(dd_interval, math.pi) == 1

    def test_zero_mode_rule(self, lasso, dd_interval):
        assert zero_mode_multiplicity(lasso) == 1
        assert zero_mode_multiplicity(lasso, (0.5,)) == 0
        assert zero_mode_multiplicity(lasso, (2 * math.pi,)) == 1
        assert zero_mode_multiplicity(dd_interval) == 0

    def test_flux_lifts_zero_mode(self, lasso):
        spectrum = find_spectrum(lasso, (0.5,), k_max=3.0)
        assert spectrum.lambda0_multiplicity == 0
        assert spectrum.roots[0].k > 0


class TestWeyl:
    @pytest.mark.parametrize("seed", [2024, 7])
    def test_corpus_within_bounds(self, seed):
        for _, graph in random_corpus(seed=seed, count=8):
            spectrum = find_spectrum(graph, k_max=50.0 / graph.total_length)
            check_weyl(spectrum)

    def test_watchdog_recovers_hidden_near_double_roots(self):
        # two Dirichlet intervals of almost equal length: roots come in pairs closer than the scan step
        graph = build_graph(range(4), [(0, 1, 1.0), (2, 3, 1.001)], {v: "dirichlet" for v in range(4)})
        config = SolverConfig(grid_step=0.05, min_search=False)
        spectrum = find_spectrum(graph, k_max=20.0, config=config)
        expected = sorted([n * math.pi for n in range(1, 7)] + [n * math.pi / 1.001 for n in range(1, 7)])
        np.testing.assert_allclose(flat_spectrum(spectrum), expected, atol=1e-9)
        assert spectrum.diagnostics.recovered_roots > 0
        assert spectrum.diagnostics.rescans > 0

    def test_check_weyl_flags_missing_roots(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=20.0)
        damaged = Spectrum(
            roots=spectrum.roots[:2] + spectrum.roots[4:],
            lambda0_multiplicity=0,
            k_max=spectrum.k_max,
            total_length=spectrum.total_length,
            num_edges=spectrum.num_edges,
            num_vertices=spectrum.num_vertices,
        )
        with pytest.raises(WeylViolation):
            check_weyl(damaged)

    def test_weyl_gap_samples(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=10.0)
        samples = weyl_gap(spectrum)
        assert samples[0].k == 0.0 and samples[0].count == 0
        assert samples[-1].k == 10.0 and samples[-1].count == 3
        assert all(-1 - 1e-9 <= s.gap <= 2 + 1e-9 for s in samples)

    def test_weyl_gap_shows_plateau_for_missing_roots(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=30.0)
        damaged = Spectrum(
            roots=spectrum.roots[:3] + spectrum.roots[5:],
            lambda0_multiplicity=0,
            k_max=spectrum.k_max,
            total_length=spectrum.total_length,
            num_edges=1,
            num_vertices=2,
        )
        late = [s.gap for s in weyl_gap(damaged) if s.k > 6 * math.pi]
        assert max(late) <= -1 + 1e-9

    def test_counting_function(self, dd_interval):
        spectrum = find_spectrum(dd_interval, k_max=10.0)
        assert counting_function(spectrum, 3.0) == 0
        assert counting_function(spectrum, 7.0) == 2
        with pytest.raises(BeyondScanCeiling):
            counting_function(spectrum, 11.0)

    def test_lowest_roots(self, lasso):
        values = lowest_roots(lasso, 12)
        assert len(values) == 12
        assert values[0] == 0.0
        assert values == sorted(values)


class TestInterlacing:
    def test_interlace_accepts_and_flags_equalities(self):
        report = interlace([1.0, 2.0, 3.0], [1.5, 2.0], 1e-12, "test")
        assert report.passed and report.compared == 2
        assert report.equalities == [2]

    def test_interlace_violation(self):
        with pytest.raises(InterlacingViolation):
            interlace([1.0, 2.0, 3.0], [2.5], 1e-12, "test")

    @pytest.mark.parametrize("vertex", [0, 1, 3])
    def test_neumann_to_dirichlet(self, star, vertex):
        report = verify_interlacing_ND(star, vertex, k_max=15.0)
        assert report.passed and report.compared > 10

    def test_neumann_to_dirichlet_needs_neumann(self, dd_interval):
        with pytest.raises(NotNeumann):
            verify_interlacing_ND(dd_interval, 0, k_max=5.0)

    @pytest.mark.parametrize("pair", [(1, 2), (0, 3)])
    def test_merge(self, star, pair):
        report = verify_interlacing_merge(star, *pair, k_max=15.0)
        assert report.passed and report.compared > 10

    def test_merge_on_lasso(self):
        graph = lasso_graph(0.7, 1.9)
        assert verify_interlacing_merge(graph, 0, 1, k_max=12.0).passed

    def test_spectrum_value_type(self):
        root = SpectralRoot(2.0, 1)
        assert root.eigenvalue == 4.0
