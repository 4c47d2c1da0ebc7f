"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An operation was asked for outside the range where it is defined."""


class MixedSideError(DomainError):
    """A left-sided operator met a right-sided power term, or vice versa."""


class MissingVariable(KeyError):
    """A polynomial was evaluated without a value for one of its variables."""


class VariableOutOfScope(ValueError):
    """A generating function uses variables its kind does not allow."""


class NonInvertibleMomenta(ValueError):
    """The velocity Hessian of a Lagrangian is singular."""


class InconsistentSystem(ArithmeticError):
    """The two momentum brackets of a Hamiltonian disagree."""


class NonContractive(RuntimeError):
    """The Neumann series cannot be guaranteed to converge.

    ``contraction_estimate`` carries the bound that triggered the refusal.
    """

    def __init__(self, message, contraction_estimate):
        super().__init__(message)
        self.contraction_estimate = contraction_estimate


class MaxIterExceeded(RuntimeError):
    """Fixed-point iteration hit its cap; ``report`` holds the partial result."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class DivergentForcing(RuntimeWarning):
    """The oscillator forcing term is unbounded at the right endpoint."""
