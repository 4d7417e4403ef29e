import csv
import json
import math

import pytest
from typer.testing import CliRunner

from conftest import DIHEDRAL_TABLE_SURPLUS, DIHEDRAL_TABLE_ZEROS
from main import EXIT_BAD_INPUT, app

runner = CliRunner()


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


class TestSpectrumCommand:
    def test_dirichlet_interval(self, write_graph, dd_interval, tmp_path):
        out = tmp_path / "spectrum.csv"
        result = runner.invoke(app, ["spectrum", write_graph(dd_interval), "--kmax", "10", "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = read_csv(out)
        assert [int(r["index"]) for r in rows] == [1, 2, 3]
        assert [float(r["k"]) for r in rows] == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi], abs=1e-10)
        assert float(rows[0]["lambda"]) == pytest.approx(math.pi ** 2, rel=1e-11)

    def test_zero_mode_row(self, write_graph, lasso, tmp_path):
        out = tmp_path / "spectrum.csv"
        result = runner.invoke(app, ["spectrum", write_graph(lasso), "--kmax", "4", "--out", str(out)])
        assert result.exit_code == 0
        first = read_csv(out)[0]
        assert (first["index"], first["k"], first["multiplicity"]) == ("1", "0", "1")

    def test_flux_lifts_zero_mode(self, write_graph, lasso, tmp_path):
        out = tmp_path / "spectrum.csv"
        result = runner.invoke(app, ["spectrum", write_graph(lasso), "--kmax", "4", "--flux", "1.0", "--out", str(out)])
        assert result.exit_code == 0
        assert float(read_csv(out)[0]["k"]) > 0

    def test_output_is_deterministic(self, write_graph, mandarin):
        path = write_graph(mandarin)
        first = runner.invoke(app, ["spectrum", path, "--kmax", "8"])
        second = runner.invoke(app, ["spectrum", path, "--kmax", "8"])
        assert first.exit_code == second.exit_code == 0
        assert first.stdout == second.stdout

    def test_json_report(self, write_graph, star, tmp_path):
        out = tmp_path / "spectrum.json"
        result = runner.invoke(app, ["spectrum", write_graph(star), "--kmax", "6", "--out", str(out)])
        assert result.exit_code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["command"] == "spectrum"
        assert report["passed"] is True
        assert report["checks"][0]["check"] == "weyl-bounds"


class TestBadInput:
    def test_missing_file(self, tmp_path):
        result = runner.invoke(app, ["spectrum", str(tmp_path / "absent.qg")])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_malformed_file(self, write_graph):
        path = write_graph("[vertices]\n0\n1\n[edges]\n0 0 1 0\n")
        result = runner.invoke(app, ["spectrum", path])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_flux_dimension(self, write_graph, lasso):
        result = runner.invoke(app, ["spectrum", write_graph(lasso), "--flux", "0.1,0.2"])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_flux_not_numbers(self, write_graph, lasso):
        result = runner.invoke(app, ["spectrum", write_graph(lasso), "--flux", "abc"])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_sweep_on_tree(self, write_graph, star):
        result = runner.invoke(app, ["sweep", write_graph(star)])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_zeta_needs_positive_ceiling(self, write_graph, star):
        result = runner.invoke(app, ["zeta", write_graph(star), "--kmax", "0"])
        assert result.exit_code == EXIT_BAD_INPUT


class TestOtherCommands:
    def test_zeta_grid(self, write_graph, dd_interval, tmp_path):
        out = tmp_path / "zeta.csv"
        result = runner.invoke(
            app, ["zeta", write_graph(dd_interval), "--kmax", "3", "--grid-step", "0.5", "--out", str(out)]
        )
        assert result.exit_code == 0
        rows = read_csv(out)
        assert len(rows) == 6
        for row in rows:
            assert float(row["zeta"]) == pytest.approx(-2 * math.sin(float(row["k"])), abs=1e-11)

    def test_weylgap(self, write_graph, dd_interval, tmp_path):
        out = tmp_path / "gap.csv"
        result = runner.invoke(app, ["weylgap", write_graph(dd_interval), "--kmax", "10", "--out", str(out)])
        assert result.exit_code == 0
        rows = read_csv(out)
        assert int(rows[-1]["count"]) == 3
        assert all(-1 - 1e-9 <= float(r["gap"]) <= 2 + 1e-9 for r in rows)

    def test_nodal_on_dihedral(self, write_graph, dihedral, tmp_path):
        out = tmp_path / "nodal.csv"
        result = runner.invoke(app, ["nodal", write_graph(dihedral), "--kmax", "2.6", "--out", str(out)])
        assert result.exit_code == 0
        rows = read_csv(out)[:9]
        assert [int(r["phi"]) for r in rows] == DIHEDRAL_TABLE_ZEROS
        assert [int(r["surplus"]) for r in rows] == DIHEDRAL_TABLE_SURPLUS
        assert all(r["flags"] == "" for r in rows)

    def test_sweep(self, write_graph, lasso, tmp_path):
        out = tmp_path / "sweep.csv"
        result = runner.invoke(
            app, ["sweep", write_graph(lasso), "--bands", "2", "--flux-points", "5", "--out", str(out)]
        )
        assert result.exit_code == 0
        rows = read_csv(out)
        assert len(rows) == 10
        assert set(rows[0]) == {"flux_1", "band", "lambda"}

    @pytest.mark.slow
    def test_verify_isospectral(self, tmp_path):
        out = tmp_path / "verify.json"
        result = runner.invoke(app, ["verify", "--suite", "isospectral", "--out", str(out)])
        assert result.exit_code == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["passed"] is True
        assert all(check["passed"] for check in report["checks"])

    def test_verify_rejects_unknown_suite(self):
        result = runner.invoke(app, ["verify", "--suite", "everything"])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_log_level_checked(self, write_graph, star):
        result = runner.invoke(app, ["--log-level", "chatty", "spectrum", write_graph(star)])
        assert result.exit_code == EXIT_BAD_INPUT

    def test_log_level_from_environment_leaves_report_unchanged(self, write_graph, star, tmp_path):
        path = write_graph(star)
        quiet, chatty = tmp_path / "quiet.csv", tmp_path / "chatty.csv"
        first = runner.invoke(app, ["spectrum", path, "--kmax", "6", "--out", str(quiet)])
        second = runner.invoke(
            app, ["spectrum", path, "--kmax", "6", "--out", str(chatty)], env={"QGRAPH_LOG_LEVEL": "DEBUG"}
        )
        assert first.exit_code == second.exit_code == 0
        assert chatty.read_text(encoding="utf-8") == quiet.read_text(encoding="utf-8")

    def test_log_level_from_environment_checked(self, write_graph, star):
        result = runner.invoke(app, ["spectrum", write_graph(star)], env={"QGRAPH_LOG_LEVEL": "chatty"})
        assert result.exit_code == EXIT_BAD_INPUT

    def test_log_level_case_insensitive(self, write_graph, star):
        result = runner.invoke(app, ["--log-level", "debug", "spectrum", write_graph(star), "--kmax", "4"])
        assert result.exit_code == 0
