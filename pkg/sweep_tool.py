"""
Sweep Tool

Dispersion sheets lambda_1 .. lambda_bands over a flux grid.
"""

import json
import logging
from typing import Optional

from graph_errors import error_payload
from graph_file import load_problem
from magnetic_flux import flux_grid, sweep
from report_file_tool import ReportDocument
from spectral_solver import SolverConfig

logger = logging.getLogger(__name__)


class SweepTool:
    """Tool for eigenvalue sweeps over the flux torus"""

    def __init__(self):
        self.name = "Sweep Tool"
        self.description = (
            "Samples the lowest eigenvalues on a uniform grid over [-pi, pi]^beta and "
            "emits (flux_1, ..., flux_beta, band, lambda) rows, one per band and grid point."
        )

    def get_sweep(
        self,
        graph_path: str,
        bands: int,
        flux_points: Optional[int] = None,
        grid_step: Optional[float] = None,
        tol: Optional[float] = None,
    ) -> str:
        """
        Flux sweep

        Args:
            graph_path: Graph description file
            bands: Number of eigenvalue sheets
            flux_points: Grid points per flux axis; default depends on beta
            grid_step: Scan spacing; default pi / (20 L)
            tol: Root accuracy in k
        """
        try:
            if bands < 1:
                raise ValueError(f"bands must be at least 1, got {bands}")
            graph, _ = load_problem(graph_path)
            config = SolverConfig.from_flags(grid_step, tol)
            grid = flux_grid(graph.beta, flux_points)
            sheets = sweep(graph, bands, grid, config)
            columns = [f"flux_{i + 1}" for i in range(graph.beta)] + ["band", "lambda"]
            rows = []
            for point in grid:
                for sheet in sheets:
                    rows.append(list(point) + [sheet.band, sheet.samples[tuple(point)]])
            touchings = sum(len(sheet.touchings) for sheet in sheets)
            document = ReportDocument(
                "sweep",
                {"graph": graph_path, "bands": bands, "flux_points": len(grid), **config.to_dict()},
                columns,
                rows,
                notes={"touchings": touchings},
            )
            logger.info("Sweep found %d near-touchings of adjacent sheets", touchings)
            return json.dumps({"status": "success", "report": document.to_dict()})
        except Exception as e:
            return json.dumps(error_payload(e), default=str)


if __name__ == "__main__":
    import sys

    tool = SweepTool()
    print(tool.get_sweep(sys.argv[1], 3, 11))
