"""Exception hierarchy shared by all modules."""


class SlicelifeError(Exception):
    """Base class for every error raised by this package."""


class InputError(SlicelifeError, ValueError):
    """Malformed or out-of-range input (non-finite values, bad tolerances)."""


class ValidationError(InputError):
    """Parameters violate the admissibility conditions on the exponents."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class DomainError(SlicelifeError, ValueError):
    """A function was evaluated outside its domain of definition."""


class SingularityError(DomainError):
    """An endpoint singularity is not integrable."""


class DegenerateExponentError(SlicelifeError, ValueError):
    """The lifespan exponent denominator is not positive."""


class SpecError(InputError):
    """Inconsistent solver settings."""


class NumericalFailure(SlicelifeError, ArithmeticError):
    """A non-finite value appeared where the dynamics should stay finite."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class OracleFailure(NumericalFailure):
    """Adaptive quadrature refinement stopped converging."""
