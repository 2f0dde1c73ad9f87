"""Exponent tuples, admissibility checks and the derived constants C, D, R_inf.

The integral inequality system is parameterised by seven exponents
``(a, b, c, x, y, z, p)`` and three constants ``(A, B, R)``::

    H(t) >= A t^a (log t)^-b (log t/R)^c
    H(t) >= B (log t)^x int_R^t ds int_R^s r^y (log r/R)^z |H(r)|^p dr

Everything here is a pure function of an immutable :class:`ProblemParams`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import List

from .errors import InputError

Y_TOL = 1e-12  # absolute tolerance on y + p*a == -1


@dataclass(frozen=True)
class ProblemParams:
    a: float
    b: float
    c: float
    x: float
    y: float
    z: float
    p: float
    A: float = 1.0
    B: float = 1.0
    R: float = 2.0

    @property
    def theta(self) -> float:
        """Denominator of the lifespan exponent, x + z + 1 + (c - b)(p - 1)."""
        return self.x + self.z + 1.0 + (self.c - self.b) * (self.p - 1.0)

    def replace(self, **changes) -> "ProblemParams":
        d = asdict(self)
        d.update(changes)
        return ProblemParams(**d)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, mapping) -> "ProblemParams":
        names = [f.name for f in fields(cls)]
        unknown = set(mapping) - set(names)
        if unknown:
            raise InputError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        try:
            return cls(**{k: float(v) for k, v in mapping.items()})
        except TypeError as exc:
            raise InputError(str(exc)) from None
        except ValueError as exc:
            raise InputError(f"parameter is not a number: {exc}") from None


def canonical(p: float = 2.0, A: float = 100.0, B: float = 1.0, R: float = 2.0) -> ProblemParams:
    """The derivative-nonlinearity tuple a=1, b=0, c=1, x=-p, y=-p-1, z=1."""
    return ProblemParams(a=1.0, b=0.0, c=1.0, x=-p, y=-p - 1.0, z=1.0, p=p, A=A, B=B, R=R)


@dataclass
class ValidationReport:
    ok: bool
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate(params: ProblemParams) -> ValidationReport:
    """Check the admissibility conditions; theta <= 0 only warns."""
    for name, value in params.as_dict().items():
        if not math.isfinite(value):
            raise InputError(f"parameter {name} is not finite: {value!r}")

    P = params
    bad = []
    if not P.p > 1:
        bad.append("p > 1")
    if not P.a <= 1:
        bad.append("a <= 1")
    if P.p > 1 and not P.b >= max(0.0, P.x / (P.p - 1.0)):
        bad.append("b >= max{0, x/(p-1)}")
    if not abs(P.y + P.p * P.a + 1.0) <= Y_TOL:
        bad.append(f"y + p*a = -1 (got {P.y + P.p * P.a!r})")
    if not P.z + P.c * P.p > -1:
        bad.append("z + c*p > -1")
    if not P.z + P.c * P.p >= P.c - 1:
        bad.append("z + c*p >= c - 1")
    if not P.A > 0:
        bad.append("A > 0")
    if not P.B > 0:
        bad.append("B > 0")
    if not P.R > 1:
        bad.append("R > 1")

    warnings = []
    if not bad:
        # consequences used by the frame closed forms
        assert P.b - P.x / (P.p - 1.0) >= 0.0
        assert P.c + (P.z + 1.0) / (P.p - 1.0) >= -1e-12
        if P.theta <= 0:
            warnings.append(
                f"theta = x+z+1+(c-b)(p-1) = {P.theta!r} <= 0: lifespan formula branch is degenerate"
            )
    return ValidationReport(ok=not bad, violations=bad, warnings=warnings)


def constant_C(params: ProblemParams) -> float:
    P = params
    return max(P.c + (P.z + 1.0) / (P.p - 1.0), P.c + (P.z + 1.0) / P.p) / P.B


def log_constant_D(params: ProblemParams) -> float:
    """log D with D = 2^(c + (p + (z+1)(p-1))/(p-1)^2) p^(p/(p-1)^2) C^(1/(p-1))."""
    P = params
    q = P.p - 1.0
    return (
        (P.c + (P.p + (P.z + 1.0) * q) / q**2) * math.log(2.0)
        + P.p / q**2 * math.log(P.p)
        + math.log(constant_C(P)) / q
    )


def constant_D(params: ProblemParams) -> float:
    P = params
    q = P.p - 1.0
    return (
        2.0 ** (P.c + (P.p + (P.z + 1.0) * q) / q**2)
        * P.p ** (P.p / q**2)
        * constant_C(P) ** (1.0 / q)
    )


def constant_D_factored(params: ProblemParams) -> float:
    """Same value as :func:`constant_D`, written as 2^(c+(z+1)/(p-1)) (2p)^(p/(p-1)^2) C^(1/(p-1))."""
    P = params
    q = P.p - 1.0
    return (
        2.0 ** (P.c + (P.z + 1.0) / q)
        * (2.0 * P.p) ** (P.p / q**2)
        * constant_C(P) ** (1.0 / q)
    )


def tail_terms(tol: float) -> int:
    """Smallest K >= 1 with 2^-K <= tol."""
    if not tol > 0 or not math.isfinite(tol):
        raise InputError(f"tol must be a positive finite number, got {tol!r}")
    return max(1, math.ceil(-math.log2(tol)))


def r_infinity(R: float, tol: float = 1e-12) -> float:
    """Truncated product R * prod_{k=1}^K (1 + 2^-k).

    The omitted log-tail is below 2^-K <= tol, so the result under-approximates
    the infinite product with relative error at most ``tol``.
    """
    if not R > 0 or not math.isfinite(R):
        raise InputError(f"R must be positive and finite, got {R!r}")
    K = tail_terms(tol)
    prod = 1.0
    for k in range(1, K + 1):
        prod *= 1.0 + 2.0**-k
    return R * prod


@dataclass(frozen=True)
class DerivedConstants:
    C: float
    D: float
    theta: float
    r_infinity: float
    lifespan_exponent: float  # (p-1)/theta, nan when theta == 0


def derived(params: ProblemParams, tol: float = 1e-12) -> DerivedConstants:
    theta = params.theta
    expo = (params.p - 1.0) / theta if theta != 0 else math.nan
    return DerivedConstants(
        C=constant_C(params),
        D=constant_D(params),
        theta=theta,
        r_infinity=r_infinity(params.R, tol),
        lifespan_exponent=expo,
    )
