"""Exception hierarchy for sfvem."""

from collections.abc import Sequence


class SfvemError(Exception):
    """Base exception class for all sfvem errors."""

    pass


class MeshGenerationError(SfvemError):
    """Raised when a generated cell is not simple or not star-shaped."""

    def __init__(self, message: str, cell_id: int | None = None) -> None:
        super().__init__(message if cell_id is None else f"cell {cell_id}: {message}")
        self.cell_id = cell_id


class MeshFormatError(SfvemError):
    """Raised when a mesh file or cell list is structurally malformed."""

    pass


class QuadratureError(SfvemError):
    """Raised when a quadrature rule cannot be built for a cell or degree."""

    pass


class ElementError(SfvemError):
    """Raised when a local projector or local matrix cannot be computed."""

    def __init__(self, message: str, cell_id: int | None = None) -> None:
        super().__init__(message if cell_id is None else f"cell {cell_id}: {message}")
        self.cell_id = cell_id


class ProblemSpecError(SfvemError):
    """Raised when coefficients or discretization parameters are invalid."""

    pass


class SolverError(SfvemError):
    """Raised when a linear or eigenvalue solve fails."""

    pass


class FactorizationError(SolverError):
    """Raised when a sparse factorization is singular."""

    pass


class SolverConvergenceError(SolverError):
    """Raised when an iterative solve stops short of the requested accuracy."""

    def __init__(self, message: str, residuals: Sequence[float] = ()) -> None:
        super().__init__(message)
        self.residuals = list(residuals)


class StudyError(SfvemError):
    """Raised when a convergence study is misconfigured."""

    pass


class OutputError(SfvemError):
    """Raised when study artifacts cannot be written."""

    pass
