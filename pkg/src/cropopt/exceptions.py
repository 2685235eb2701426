"""Exception hierarchy for cropopt."""


class CropOptError(Exception):
    """Base class for all package errors."""


class InvalidSpecError(CropOptError, ValueError):
    """Raised when a domain description cannot produce a valid mesh."""


class DimensionError(CropOptError, ValueError):
    """Raised when a field does not match the mesh it is used with."""


class AssemblyError(CropOptError):
    """Raised when a finite element matrix cannot be assembled."""


class ParameterError(CropOptError, ValueError):
    """Raised for out-of-range physical or algorithmic parameters."""


class SolverError(CropOptError):
    """Raised when the linear solver fails to reach its tolerance.

    Parameters
    ----------
    message : str
        Diagnostic text.
    residual : float
        Relative residual at the last iterate.
    """

    def __init__(self, message, residual):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


class BudgetError(CropOptError, ValueError):
    """Raised when the intervention budget lies outside [0, |domain|]."""


class DomainError(CropOptError, ValueError):
    """Raised when an operation is applied to an unsupported domain."""


class AsymmetricMeshError(CropOptError, ValueError):
    """Raised when a mesh has no mirror image under a reflection."""


class DivergenceError(CropOptError):
    """Raised when an iterative optimisation produces non-finite values."""

    def __init__(self, message, iteration):
        super().__init__(f"{message} at iteration {iteration}")
        self.iteration = iteration


class ConfigError(CropOptError, ValueError):
    """Raised for malformed run configuration files."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno
