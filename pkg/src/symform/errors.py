"""Exception hierarchy for symform.

Every error carries the process exit code the CLI reports for it.
"""


class SymformError(Exception):
    """Base class for all symform errors."""

    exit_code = 2


class InvalidInput(SymformError, ValueError):
    """Input has the wrong shape, structure, range or contains non-finite values."""


class ConfigError(InvalidInput):
    """Configuration key or value is not accepted."""


class PreconditionFailed(SymformError, ValueError):
    """A hypothesis required by an operation does not hold on its inputs."""


class ResourceLimit(SymformError):
    """An enumeration would exceed its hard cap."""


class NumericalFailure(SymformError, ArithmeticError):
    """A numerical routine produced a non-finite or inconsistent result."""

    exit_code = 3


class SingularSpectrum(NumericalFailure):
    """A spectral function is undefined at some eigenvalue."""

    def __init__(self, message: str, eigenvalue: float) -> None:
        super().__init__(f"{message} (eigenvalue {eigenvalue!r})")
        self.eigenvalue = eigenvalue


class IllConditioned(NumericalFailure):
    """Matrix is too close to singular for the requested decomposition."""

    def __init__(self, message: str, ratio: float) -> None:
        super().__init__(f"{message} (singular value ratio {ratio:.3e})")
        self.ratio = ratio
