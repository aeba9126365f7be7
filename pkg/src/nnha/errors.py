"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Shape or length mismatch between arguments."""


class ParameterError(ValueError):
    """Invalid, infeasible, or contract-violating parameter value."""


class ResourceError(RuntimeError):
    """Problem size exceeds a configured emulation cap."""


class NumericalError(ArithmeticError):
    """A numerical tolerance was violated during computation."""


class FormatError(ValueError):
    """Malformed input file."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}:"
        if line is not None:
            loc = f"{loc}{line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line


class ConfigError(ValueError):
    """Invalid experiment configuration."""
