"""
Spectrum Tool

Spectrum table, secular-function grid and Weyl-gap samples of a graph file.
"""

import json
import logging
import math
from typing import List, Optional

import numpy as np

import secular_engine as engine
from graph_errors import WeylViolation, error_payload
from graph_file import load_problem
from report_file_tool import ReportDocument
from spectral_solver import SolverConfig, check_weyl, find_spectrum, weyl_gap

logger = logging.getLogger(__name__)


class SpectrumTool:
    """Tool for eigenvalue tables and secular-function samples"""

    def __init__(self):
        self.name = "Spectrum Tool"
        self.description = (
            "Computes the spectrum of a quantum graph described in a graph file. "
            "Commands: 'spectrum' - (index, k, lambda, multiplicity) rows up to k_max, "
            "'zeta' - the real secular function on a k grid, "
            "'weylgap' - N(k) - L k / pi step samples for spotting missed roots."
        )

    def get_spectrum(
        self,
        graph_path: str,
        k_max: float,
        grid_step: Optional[float] = None,
        tol: Optional[float] = None,
        flux: Optional[List[float]] = None,
    ) -> str:
        """
        Spectrum up to k_max with multiplicities

        Args:
            graph_path: Graph description file
            k_max: Scan ceiling in k
            grid_step: Scan spacing; default pi / (20 L)
            tol: Root accuracy in k
            flux: One value per cycle-basis chord, overriding the file
        """
        try:
            graph, fluxes = load_problem(graph_path, flux)
            config = SolverConfig.from_flags(grid_step, tol)
            spectrum = find_spectrum(graph, fluxes, k_max=k_max, config=config)
            document = ReportDocument(
                "spectrum",
                {"graph": graph_path, "k_max": k_max, "flux": list(fluxes.values), **config.to_dict()},
                ["index", "k", "lambda", "multiplicity"],
            )
            index = 1
            if spectrum.lambda0_multiplicity:
                document.rows.append([index, 0.0, 0.0, spectrum.lambda0_multiplicity])
                index += spectrum.lambda0_multiplicity
            for root in spectrum.roots:
                document.rows.append([index, root.k, root.eigenvalue, root.multiplicity])
                index += root.multiplicity
            document.add_check("weyl-bounds", True, detail=f"N({k_max:.12g}) = {spectrum.total_count}")
            document.notes = {"graph": graph.summary(), "diagnostics": spectrum.diagnostics.to_dict()}
            return json.dumps({"status": "success", "report": document.to_dict()})
        except Exception as e:
            logger.debug("spectrum failed", exc_info=True)
            return json.dumps(error_payload(e), default=str)

    def get_zeta(
        self,
        graph_path: str,
        k_max: float,
        grid_step: Optional[float] = None,
        flux: Optional[List[float]] = None,
    ) -> str:
        """
        Real secular function zeta(k) on a uniform grid in (0, k_max]

        Args:
            graph_path: Graph description file
            k_max: Right end of the grid
            grid_step: Grid spacing; default pi / (20 L)
            flux: One value per cycle-basis chord, overriding the file
        """
        try:
            if not k_max > 0:
                raise ValueError(f"k_max must be positive, got {k_max!r}")
            graph, fluxes = load_problem(graph_path, flux)
            step = SolverConfig.from_flags(grid_step).step_for(graph)
            points = max(2, int(math.floor(k_max / step)))
            ks = step * np.arange(1, points + 1)
            _, zeta = engine.secular_values(graph, ks, fluxes)
            values = zeta.real
            document = ReportDocument(
                "zeta",
                {"graph": graph_path, "k_max": k_max, "grid_step": step, "flux": list(fluxes.values)},
                ["k", "zeta"],
                [[float(k), float(z)] for k, z in zip(ks, values)],
            )
            return json.dumps({"status": "success", "report": document.to_dict()})
        except Exception as e:
            return json.dumps(error_payload(e), default=str)

    def get_weyl_gap(
        self,
        graph_path: str,
        k_max: float,
        grid_step: Optional[float] = None,
        tol: Optional[float] = None,
        flux: Optional[List[float]] = None,
    ) -> str:
        """
        Step samples of N(k) - L k / pi; a missed root shows up as a plateau one unit low

        Args:
            graph_path: Graph description file
            k_max: Scan ceiling in k
            grid_step: Scan spacing; default pi / (20 L)
            tol: Root accuracy in k
            flux: One value per cycle-basis chord, overriding the file
        """
        try:
            graph, fluxes = load_problem(graph_path, flux)
            config = SolverConfig.from_flags(grid_step, tol)
            spectrum = find_spectrum(graph, fluxes, k_max=k_max, config=config, check=False)
            document = ReportDocument(
                "weylgap",
                {"graph": graph_path, "k_max": k_max, "flux": list(fluxes.values), **config.to_dict()},
                ["k", "count", "gap"],
                [[s.k, s.count, s.gap] for s in weyl_gap(spectrum)],
            )
            try:
                check_weyl(spectrum)
                document.add_check("weyl-bounds", True, value=-graph.num_edges, detail=f"upper {graph.num_vertices}")
            except WeylViolation as exc:
                logger.warning("%s", exc.message)
                document.add_check("weyl-bounds", False, detail=exc.message)
            return json.dumps({"status": "success", "report": document.to_dict()})
        except Exception as e:
            return json.dumps(error_payload(e), default=str)


if __name__ == "__main__":
    import sys

    tool = SpectrumTool()
    print(tool.get_spectrum(sys.argv[1], 10.0))
