"""
qgraph command line

Commands: spectrum, zeta, weylgap, nodal, sweep, verify. Tables go to stdout
as CSV (verify prints its JSON report) unless --out names a file; a .json
suffix writes the full report document instead of the table. Logs go to
stderr.

Exit codes: 0 success, 1 failed computation or failed check, 2 bad input.

Every numerical setting is a flag. The one value read from the environment
(or a .env file) is QGRAPH_LOG_LEVEL, the fallback for --log-level; it only
changes what goes to stderr, never a table or report.
"""

import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

import typer
from dotenv import load_dotenv

from nodal_tool import NodalTool
from report_file_tool import ReportDocument, ReportFileTool
from spectrum_tool import SpectrumTool
from sweep_tool import SweepTool
from verification_tool import Suite, VerificationTool

EXIT_FAILURE = 1
EXIT_BAD_INPUT = 2

app = typer.Typer(
    name="qgraph",
    help="Spectra, nodal counts and magnetic response of quantum graphs.",
    no_args_is_help=True,
    add_completion=False,
)

spectrum_tool = SpectrumTool()
nodal_tool = NodalTool()
sweep_tool = SweepTool()
verification_tool = VerificationTool()
report_tool = ReportFileTool()

GraphArgument = typer.Argument(..., help="Graph description file", exists=True, dir_okay=False, readable=True)
KmaxOption = typer.Option(10.0, "--kmax", help="Scan ceiling in k", min=0.0)
GridStepOption = typer.Option(None, "--grid-step", help="Scan spacing in k (default pi / (20 L))")
TolOption = typer.Option(None, "--tol", help="Root accuracy in k (default 1e-11)")
FluxOption = typer.Option(None, "--flux", help="Comma-separated fluxes, one per cycle-basis chord")
OutOption = typer.Option(None, "--out", help="Write to this file; a .json suffix writes the full report")


def _parse_flux(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise typer.BadParameter(f"expected comma-separated numbers, got {text!r}", param_hint="--flux") from None


def _emit(response: str, out: Optional[Path], json_default: bool = False) -> None:
    payload = json.loads(response)
    if payload["status"] == "error":
        typer.echo(f"error: {payload['error']}: {payload['message']}", err=True)
        raise typer.Exit(EXIT_BAD_INPUT if payload.get("category") == "input" else EXIT_FAILURE)

    document = ReportDocument.from_dict(payload["report"])
    as_json = out.suffix.lower() == ".json" if out is not None else json_default
    text = report_tool.render(document, as_json=as_json)
    if out is None:
        sys.stdout.write(text)
    else:
        saved = json.loads(report_tool.save_report(str(out), text))
        if saved["status"] == "error":
            typer.echo(f"error: {saved['message']}", err=True)
            raise typer.Exit(EXIT_BAD_INPUT)
        logging.getLogger(__name__).info(saved["message"])

    for check in document.checks:
        if not check["passed"]:
            typer.echo(f"FAILED {check['check']}: {check['detail']}", err=True)
    if not document.passed:
        raise typer.Exit(EXIT_FAILURE)


@app.callback()
def configure(
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING or ERROR"),
) -> None:
    """Load .env and set up logging on stderr."""
    load_dotenv()
    level = (log_level or os.getenv("QGRAPH_LOG_LEVEL") or "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise typer.BadParameter(f"unknown log level {level!r}", param_hint="--log-level")
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


@app.command()
def spectrum(
    graph: Path = GraphArgument,
    kmax: float = KmaxOption,
    grid_step: Optional[float] = GridStepOption,
    tol: Optional[float] = TolOption,
    flux: Optional[str] = FluxOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Eigenvalues up to --kmax as (index, k, lambda, multiplicity)."""
    _emit(spectrum_tool.get_spectrum(str(graph), kmax, grid_step, tol, _parse_flux(flux)), out)


@app.command()
def zeta(
    graph: Path = GraphArgument,
    kmax: float = KmaxOption,
    grid_step: Optional[float] = GridStepOption,
    flux: Optional[str] = FluxOption,
    out: Optional[Path] = OutOption,
) -> None:
    """The real secular function on a k grid as (k, zeta)."""
    _emit(spectrum_tool.get_zeta(str(graph), kmax, grid_step, _parse_flux(flux)), out)


@app.command()
def weylgap(
    graph: Path = GraphArgument,
    kmax: float = KmaxOption,
    grid_step: Optional[float] = GridStepOption,
    tol: Optional[float] = TolOption,
    flux: Optional[str] = FluxOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Counting function minus its Weyl term as (k, count, gap)."""
    _emit(spectrum_tool.get_weyl_gap(str(graph), kmax, grid_step, tol, _parse_flux(flux)), out)


@app.command()
def nodal(
    graph: Path = GraphArgument,
    kmax: float = KmaxOption,
    grid_step: Optional[float] = GridStepOption,
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Zero counts and surpluses as (n, k, phi, surplus, flags)."""
    _emit(nodal_tool.get_nodal_counts(str(graph), kmax, grid_step, tol), out)


@app.command()
def sweep(
    graph: Path = GraphArgument,
    bands: int = typer.Option(4, "--bands", help="Number of eigenvalue sheets", min=1),
    flux_points: Optional[int] = typer.Option(None, "--flux-points", help="Grid points per flux axis", min=2),
    grid_step: Optional[float] = GridStepOption,
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Lowest eigenvalues over the flux torus as (flux_1..flux_beta, band, lambda)."""
    _emit(sweep_tool.get_sweep(str(graph), bands, flux_points, grid_step, tol), out)


@app.command()
def verify(
    suite: Suite = typer.Option(Suite.ALL, "--suite", help="Verification suite"),
    graph: Optional[Path] = typer.Option(None, "--graph", help="Run interlacing / magnetic-nodal on this file"),
    kmax: float = KmaxOption,
    seed: int = typer.Option(2024, "--seed", help="Seed of the random corpus"),
    grid_step: Optional[float] = GridStepOption,
    tol: Optional[float] = TolOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Run a verification suite and print its report."""
    graph_path = str(graph) if graph is not None else None
    _emit(verification_tool.run_suite(suite.value, graph_path, kmax, seed, grid_step, tol), out, json_default=True)


if __name__ == "__main__":
    app()
