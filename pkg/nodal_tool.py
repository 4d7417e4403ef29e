"""
Nodal Tool

Zero counts and nodal surpluses of the eigenfunctions of a graph file.
"""

import json
import logging
from typing import Optional

from eigenfunction_nodal import nodal_surplus_profile
from graph_errors import error_payload
from graph_file import load_problem
from report_file_tool import ReportDocument
from spectral_solver import SolverConfig, find_spectrum

logger = logging.getLogger(__name__)


class NodalTool:
    """Tool for nodal counts of eigenfunctions"""

    def __init__(self):
        self.name = "Nodal Tool"
        self.description = (
            "Reconstructs every eigenfunction up to k_max at zero flux and reports "
            "(n, k, phi, surplus, flags). Degenerate eigenvalues and eigenfunctions "
            "vanishing at a vertex are flagged instead of counted."
        )

    def get_nodal_counts(
        self,
        graph_path: str,
        k_max: float,
        grid_step: Optional[float] = None,
        tol: Optional[float] = None,
    ) -> str:
        """
        Nodal count table

        Args:
            graph_path: Graph description file; a [fluxes] section is ignored
            k_max: Scan ceiling in k
            grid_step: Scan spacing; default pi / (20 L)
            tol: Root accuracy in k
        """
        try:
            graph, flux = load_problem(graph_path)
            if not flux.is_zero():
                logger.warning("Nodal counts are taken at zero flux; ignoring fluxes %s", list(flux.values))
            config = SolverConfig.from_flags(grid_step, tol)
            spectrum = find_spectrum(graph, k_max=k_max, config=config)
            entries = nodal_surplus_profile(graph, k_max, config, spectrum=spectrum)
            beta = graph.beta
            document = ReportDocument(
                "nodal",
                {"graph": graph_path, "k_max": k_max, **config.to_dict()},
                ["n", "k", "phi", "surplus", "flags"],
                [[e.n, e.k, e.phi, e.surplus, e.flags] for e in entries],
            )
            valid = [e for e in entries if e.valid]
            bounded = all(0 <= e.surplus <= beta for e in valid)
            document.add_check("surplus-bounds", bounded, value=beta, detail=f"{len(valid)} valid of {len(entries)}")
            return json.dumps({"status": "success", "report": document.to_dict()})
        except Exception as e:
            logger.debug("nodal failed", exc_info=True)
            return json.dumps(error_payload(e), default=str)


if __name__ == "__main__":
    import sys

    tool = NodalTool()
    print(tool.get_nodal_counts(sys.argv[1], 3.0))
