import math

import pytest

from graph_errors import FluxDimensionMismatch, GraphFileError, GraphSemanticError, GraphSyntaxError
from graph_file import load_problem, parse_graph_file, read_graph_file, serialize_graph
from metric_graph import FluxAssignment, VertexCondition
from reference_oracles import random_corpus

STAR_TEXT = """
# 3-star with one Dirichlet leaf
[vertices]
0
1 dirichlet
2
3 neumann
[edges]
0 0 1 1.0
1 0 2 1.5   # middle leg
2 0 3 2.0
"""


class TestParse:
    def test_minimal_interval(self):
        graph, flux = parse_graph_file("[vertices]\n0\n1\n[edges]\n0 0 1 1\n")
        assert graph.num_edges == 1 and graph.total_length == 1.0
        assert flux is None

    def test_star_with_dirichlet_leaf(self):
        graph, _ = parse_graph_file(STAR_TEXT)
        assert graph.num_vertices == 4
        assert graph.condition(1) is VertexCondition.DIRICHLET
        assert graph.condition(3) is VertexCondition.NEUMANN
        assert graph.total_length == 4.5

    def test_edge_ids_in_any_order(self):
        graph, _ = parse_graph_file("[vertices]\n0\n1\n2\n[edges]\n1 1 2 2.0\n0 0 1 1.0\n")
        assert [e.length for e in graph.edges] == [1.0, 2.0]

    @pytest.mark.parametrize("length", ["0", "-1.5", "inf", "nan"])
    def test_bad_length_is_semantic(self, length):
        with pytest.raises(GraphSemanticError) as info:
            parse_graph_file(f"[vertices]\n0\n1\n[edges]\n0 0 1 {length}\n")
        assert info.value.line == 5

    @pytest.mark.parametrize(
        "text,line,col",
        [
            ("[vertices]\n0\n1\n[edges]\n0 0 1 abc\n", 5, 7),
            ("[vertices]\n0\n1\n[edges]\n0 0 1\n", 5, 6),
            ("[vertices]\n0 robin\n", 2, 3),
            ("0 1\n", 1, 1),
            ("[nodes]\n", 1, 1),
        ],
    )
    def test_syntax_error_position(self, text, line, col):
        with pytest.raises(GraphSyntaxError) as info:
            parse_graph_file(text)
        assert (info.value.line, info.value.col) == (line, col)

    @pytest.mark.parametrize(
        "text",
        [
            "[vertices]\n0\n0\n1\n[edges]\n0 0 1 1.0\n",
            "[vertices]\n0\n1\n[edges]\n0 0 2 1.0\n",
            "[vertices]\n0\n1\n[edges]\n0 0 1 1.0\n0 0 1 2.0\n",
            "[vertices]\n0\n1\n[edges]\n1 0 1 1.0\n",
            "[vertices]\n0\n1\n2\n[edges]\n0 0 1 1.0\n",
            "[vertices]\n0\n1\n",
        ],
        ids=["duplicate-vertex", "undeclared-vertex", "duplicate-edge", "edge-ids", "isolated", "no-edges"],
    )
    def test_semantic_errors(self, text):
        with pytest.raises(GraphSemanticError):
            parse_graph_file(text)


class TestFluxes:
    LASSO = "[vertices]\n0\n1\n[edges]\n0 0 1 1.0\n1 0 0 2.0\n"

    def test_flux_on_chord(self):
        graph, flux = parse_graph_file(self.LASSO + "[fluxes]\n1 0.5\n")
        assert flux == FluxAssignment((0.5,))

    def test_flux_on_tree_edge(self):
        with pytest.raises(GraphSemanticError) as info:
            parse_graph_file(self.LASSO + "[fluxes]\n0 0.5\n")
        assert "chord" in info.value.message

    def test_duplicate_flux(self):
        with pytest.raises(GraphSemanticError):
            parse_graph_file(self.LASSO + "[fluxes]\n1 0.5\n1 0.7\n")

    def test_load_problem_override(self, write_graph):
        path = write_graph(self.LASSO + "[fluxes]\n1 0.5\n")
        assert load_problem(path)[1] == FluxAssignment((0.5,))
        assert load_problem(path, [1.25])[1] == FluxAssignment((1.25,))
        with pytest.raises(FluxDimensionMismatch):
            load_problem(path, [0.1, 0.2])

    def test_load_problem_defaults_to_zero(self, write_graph, star):
        graph, flux = load_problem(write_graph(star))
        assert graph == star
        assert flux == FluxAssignment()


class TestRoundTrip:
    @pytest.mark.parametrize("name,graph", random_corpus(seed=2024, count=12))
    def test_corpus(self, name, graph):
        parsed, flux = parse_graph_file(serialize_graph(graph))
        assert parsed == graph
        assert flux is None

    def test_flux(self, mandarin):
        flux = FluxAssignment((0.3, -math.pi / 7))
        parsed, parsed_flux = parse_graph_file(serialize_graph(mandarin, flux))
        assert parsed == mandarin
        assert parsed_flux == flux

    def test_read_from_disk(self, write_graph, dihedral):
        graph, _ = read_graph_file(write_graph(dihedral))
        assert graph == dihedral

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_graph_file(str(tmp_path / "absent.qg"))

    def test_errors_share_a_base(self):
        with pytest.raises(GraphFileError):
            parse_graph_file("[edges]\n0 0 1 x\n")
