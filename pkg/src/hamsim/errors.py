"""Exception hierarchy shared by the library and the command line."""


class HamsimError(Exception):
    """Base class for all library errors."""


class ContractViolation(HamsimError, ValueError):
    """An input broke a documented precondition (non-Hermitian, wrong shape, ...)."""


class CapacityError(ContractViolation):
    """Requested size is outside the supported range."""


class NumericError(HamsimError, ArithmeticError):
    """A numerical routine failed to converge."""

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class GeometryError(HamsimError):
    """A point is not where an operation requires it to be (e.g. not on the boundary)."""


class DegenerateInputError(HamsimError):
    """Input is zero or otherwise degenerate for the requested operation."""


class NoSimulationError(HamsimError):
    """The source Hamiltonian is local and cannot simulate anything nonlocal."""
