import math
from pathlib import Path

import pytest

from graph_file import serialize_graph
from metric_graph import build_graph
from reference_oracles import dihedral_graph, lasso_graph, mandarin_graph, star_graph

DIHEDRAL = (math.pi, 1.0, math.sqrt(2))
DIHEDRAL_TABLE_K = [0.1708, 0.5359, 0.9126, 1.2294, 1.3398, 1.6225, 1.9877, 2.3349, 2.5680]
DIHEDRAL_TABLE_ZEROS = [0, 1, 3, 4, 4, 5, 7, 8, 9]
DIHEDRAL_TABLE_SURPLUS = [0, 0, 1, 1, 0, 0, 1, 1, 1]
DIHEDRAL_TABLE_CLASSES = ["min", "min", "max", "max", "min", "min", "max", "max", "max"]


@pytest.fixture
def dd_interval():
    return build_graph([0, 1], [(0, 1, 1.0)], {0: "dirichlet", 1: "dirichlet"})


@pytest.fixture
def nn_interval():
    return build_graph([0, 1], [(0, 1, 1.0)])


@pytest.fixture
def equilateral_star():
    return star_graph([math.pi / 2] * 3)


@pytest.fixture
def star():
    return star_graph([1.0, math.sqrt(2), math.sqrt(3)])


@pytest.fixture
def lasso():
    return lasso_graph(1.0, math.sqrt(2))


@pytest.fixture
def mandarin():
    return mandarin_graph([1.0, math.sqrt(2), math.sqrt(3)])


@pytest.fixture
def dihedral():
    return dihedral_graph(*DIHEDRAL)


@pytest.fixture
def write_graph(tmp_path: Path):
    """Write a graph (or raw text) to a file and return its path."""

    def write(graph_or_text, flux=None, name="graph.qg") -> str:
        text = graph_or_text if isinstance(graph_or_text, str) else serialize_graph(graph_or_text, flux)
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
