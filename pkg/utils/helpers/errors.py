from typing import Optional

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DOMAIN = 2
EXIT_NUMERICAL = 3


class RieszError(Exception):
    """Base class for every error raised by the library."""

    exit_code: int = EXIT_NUMERICAL

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class BodyError(RieszError, ValueError):
    """Invalid or degenerate body geometry."""

    exit_code = EXIT_INPUT


class BodyFileError(BodyError):
    """A body file could not be parsed or violates the schema."""


class ConfigurationError(RieszError, ValueError):
    """Invalid environment setting or command-line value."""

    exit_code = EXIT_INPUT


class DomainError(RieszError, ValueError):
    """The potential (or a derived quantity) is undefined for the request."""

    exit_code = EXIT_DOMAIN


class NotStarShapedError(DomainError):
    pass


class UnsupportedAlphaError(DomainError):
    pass


class RayGrazingError(RieszError):
    """A ray kept hitting a vertex or a tangency after all micro-rotations."""

    def __init__(self, message: str, direction: Optional[tuple] = None):
        super().__init__(message)
        self.direction = direction


class QuadratureError(RieszError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class SolverError(RieszError):
    pass


class OracleResolutionError(RieszError):
    """The brute-force grid is too coarse for the requested tolerance."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error
