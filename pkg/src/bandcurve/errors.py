"""Exception types shared across the package."""


class CurveFitError(Exception):
    """Base class for all bandcurve errors."""


class InputSizeError(CurveFitError):
    """Too few points or samples for the requested operation."""


class DegenerateInputError(CurveFitError):
    """Degenerate geometry: duplicate points, zero-length directions."""


class DomainError(CurveFitError):
    """Parameter or argument outside its admissible domain."""


class SingularSystemError(CurveFitError):
    """A linear solve hit a zero pivot or a numerically singular matrix."""


class SingularParametrizationError(CurveFitError):
    """The parametrization speed vanished or became non-finite."""


class NonPeriodicIntegrandError(CurveFitError):
    """Fourier integration of a series with a non-negligible mean term."""


class NotClosedError(CurveFitError):
    """Closed-curve reconstruction attempted on a state that is not closed."""


class ConvergenceError(CurveFitError):
    """An iterative refinement failed to converge."""


class ConfigError(CurveFitError):
    """Invalid fitting configuration."""


class ParseError(CurveFitError):
    """Malformed input file; the message carries file and line context."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = str(path)
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line
