"""
Graph Errors

Exception hierarchy for the quantum graph toolkit. Library code raises these;
the tool classes turn them into {"status": "error", ...} JSON responses.
"""

from typing import Any, Dict, Optional


class QuantumGraphError(Exception):
    """Base class for every failure raised by the toolkit"""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        payload = {"status": "error", "error": type(self).__name__, "message": self.message}
        if self.context:
            payload["context"] = self.context
        return payload


# graph-core

class GraphValidationError(QuantumGraphError):
    pass


class NonPositiveLength(GraphValidationError):
    def __init__(self, edge: int, length: float):
        super().__init__(f"Edge {edge} has non-positive or non-finite length {length!r}", edge=edge, length=length)


class DanglingEndpoint(GraphValidationError):
    def __init__(self, edge: int, vertex: int):
        super().__init__(f"Edge {edge} references undeclared vertex {vertex}", edge=edge, vertex=vertex)


class EmptyGraph(GraphValidationError):
    def __init__(self):
        super().__init__("Graph has no edges")


class IsolatedVertex(GraphValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"Vertex {vertex} has no incident edge", vertex=vertex)


class DuplicateVertex(GraphValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"Vertex {vertex} is declared twice", vertex=vertex)


class UnknownVertex(GraphValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"Vertex {vertex} does not exist", vertex=vertex)


class UnknownEdge(GraphValidationError):
    def __init__(self, edge: int):
        super().__init__(f"Edge {edge} does not exist", edge=edge)


class NotNeumann(GraphValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"Vertex {vertex} is not a Neumann vertex", vertex=vertex)


class SameVertex(GraphValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"Cannot merge vertex {vertex} with itself", vertex=vertex)


# secular-engine

class FluxDimensionMismatch(QuantumGraphError):
    def __init__(self, expected: int, received: int):
        super().__init__(
            f"Flux assignment has {received} values but the graph has {expected} independent cycles",
            expected=expected,
            received=received,
        )


class NoNullVector(QuantumGraphError):
    def __init__(self, k: float, smallest_singular_value: float, tol: float):
        super().__init__(
            f"k={k:.12g} is not an eigenvalue: smallest singular value {smallest_singular_value:.3e} exceeds {tol:.3e}",
            k=k,
            smallest_singular_value=smallest_singular_value,
            tol=tol,
        )


class DetSMismatch(QuantumGraphError):
    def __init__(self, computed: float, expected: int):
        super().__init__(f"det S = {computed:.12g}, expected {expected}", computed=computed, expected=expected)


# spectral-solver

class InvalidSolverConfig(QuantumGraphError):
    pass


class WeylViolation(QuantumGraphError):
    def __init__(self, k: float, count: int, lower: float, upper: float):
        super().__init__(
            f"Counting function N({k:.12g}) = {count} lies outside the Weyl bounds [{lower:.6g}, {upper:.6g}]",
            k=k,
            count=count,
            lower=lower,
            upper=upper,
        )


class BeyondScanCeiling(QuantumGraphError):
    def __init__(self, k: float, k_max: float):
        super().__init__(f"k={k:.12g} exceeds the scan ceiling k_max={k_max:.12g}", k=k, k_max=k_max)


class InterlacingViolation(QuantumGraphError):
    def __init__(self, index: int, lower: float, value: float, upper: Optional[float]):
        super().__init__(
            f"Interlacing fails at n={index}: expected {lower:.12g} <= {value:.12g} <= {upper}",
            index=index,
            lower=lower,
            value=value,
            upper=upper,
        )


# eigenfunction-nodal

class DegenerateEigenvalue(QuantumGraphError):
    def __init__(self, n: int, multiplicity: int):
        super().__init__(
            f"Eigenvalue n={n} has multiplicity {multiplicity}; use reconstruct_basis", n=n, multiplicity=multiplicity
        )


class ResidualTooLarge(QuantumGraphError):
    def __init__(self, residual: float, tol: float):
        super().__init__(f"Vertex condition residual {residual:.3e} exceeds {tol:.3e}", residual=residual, tol=tol)


class VertexZero(QuantumGraphError):
    def __init__(self, vertex: int, value: float):
        super().__init__(f"Eigenfunction vanishes at vertex {vertex} (|f| = {value:.3e})", vertex=vertex, value=value)


class IndexBeyondSpectrum(QuantumGraphError):
    def __init__(self, n: int, count: int):
        super().__init__(f"Eigenvalue index n={n} outside 1..{count} of the computed spectrum", n=n, count=count)


class ComplexEigenfunction(QuantumGraphError):
    def __init__(self, n: int):
        super().__init__(f"Eigenfunction n={n} has no real normal form; zero counting needs zero flux", n=n)


class CommensurateTie(QuantumGraphError):
    def __init__(self, alpha: float, beta: float, n: int):
        super().__init__(
            f"alpha*n/(alpha+beta) is an integer for alpha={alpha!r}, beta={beta!r}, n={n}", alpha=alpha, beta=beta, n=n
        )


# magnetic

class NotCritical(QuantumGraphError):
    def __init__(self, n: int, gradient_norm: float, tol: float):
        super().__init__(
            f"Band {n} is not critical at zero flux: |grad| = {gradient_norm:.3e} > {tol:.3e}",
            n=n,
            gradient_norm=gradient_norm,
            tol=tol,
        )


class DegenerateHessian(QuantumGraphError):
    def __init__(self, n: int, eigenvalues: list):
        super().__init__(f"Hessian of band {n} is degenerate, eigenvalues {eigenvalues}", n=n, eigenvalues=eigenvalues)


class TheoremViolation(QuantumGraphError):
    def __init__(self, n: int, morse_index: int, surplus: int):
        super().__init__(
            f"Band {n}: Morse index {morse_index} differs from nodal surplus {surplus}",
            n=n,
            morse_index=morse_index,
            surplus=surplus,
        )


class SymmetryViolation(QuantumGraphError):
    def __init__(self, band: int, flux: list, plus: float, minus: float):
        super().__init__(
            f"Band {band}: lambda(alpha)={plus:.12g} differs from lambda(-alpha)={minus:.12g} at alpha={flux}",
            band=band,
            flux=flux,
            plus=plus,
            minus=minus,
        )


class SolverFailureAtGridPoint(QuantumGraphError):
    def __init__(self, flux: list, reason: str):
        super().__init__(f"Solver failed at flux {flux}: {reason}", flux=flux, reason=reason)


# cli-io

class GraphFileError(QuantumGraphError):
    pass


class GraphSyntaxError(GraphFileError):
    def __init__(self, line: int, col: int, detail: str):
        super().__init__(f"line {line}, col {col}: {detail}", line=line, col=col)
        self.line = line
        self.col = col


class GraphSemanticError(GraphFileError):
    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: {detail}", line=line)
        self.line = line


# errors caused by what the caller passed in, as opposed to failed computations
INPUT_ERRORS = (
    GraphValidationError,
    GraphFileError,
    InvalidSolverConfig,
    FluxDimensionMismatch,
    IndexBeyondSpectrum,
    BeyondScanCeiling,
    ValueError,
    OSError,
)


def error_payload(exc: Exception) -> Dict[str, Any]:
    """{"status": "error", ...} response for any exception, tagged input or computation."""
    if isinstance(exc, QuantumGraphError):
        payload = exc.to_dict()
    else:
        payload = {"status": "error", "error": type(exc).__name__, "message": str(exc)}
    payload["category"] = "input" if isinstance(exc, INPUT_ERRORS) else "computation"
    return payload
