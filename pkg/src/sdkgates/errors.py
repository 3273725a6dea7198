"""Exception types shared by the numerical modules.

The CLI maps ``DomainError`` (and its subclasses) to exit code 2 and
``NumericalError`` (and its subclasses) to exit code 1.
"""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


class DivergenceError(DomainError):
    """A lattice sum was requested for an exponent where it diverges."""


class UnknownSpeciesError(DomainError, KeyError):
    """Species name not present in the database."""

    def __str__(self):
        return ValueError.__str__(self)


class NumericalError(ArithmeticError):
    """A numerical procedure failed."""


class InstabilityError(NumericalError):
    """The crystal (or dispersion) has a non-positive squared frequency."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ConvergenceError(NumericalError):
    """An iterative solver did not converge."""
