"""Slicing-method blow-up machinery for a class of integral inequality systems.

Lifespan bounds, lower-bound frames, an equality-dynamics solver and an
auditor for the inequality chain.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DegenerateExponentError,
    DomainError,
    InputError,
    NumericalFailure,
    OracleFailure,
    SingularityError,
    SlicelifeError,
    SpecError,
    ValidationError,
)
from .exponents import (  # noqa: F401
    DerivedConstants,
    ProblemParams,
    ValidationReport,
    canonical,
    constant_C,
    constant_D,
    derived,
    r_infinity,
    validate,
)
from .frames import Frame, IndexMode, advance, closed_form, eval_log, initial_frame, q_value  # noqa: F401
from .lifespan import LifespanBound, bound, critical_time_identity, glassey_bound  # noqa: F401
from .volterra import Solution, SolveSpec, blowup_time, solve  # noqa: F401
