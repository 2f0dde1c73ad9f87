"""Upper bound on the lifespan and its small-data translation."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateExponentError, InputError
from .exponents import ProblemParams, canonical, log_constant_D, r_infinity, tail_terms
from .frames import IndexMode, log_q_value, q_value, slice_width  # noqa: F401  (re-exported)

PRODUCT = "product"
FORMULA = "formula"
TIE_TOL = 1e-12


@dataclass(frozen=True)
class LifespanBound:
    T_bound: float
    log_T_bound: float
    branch: str
    theta: float
    mode: IndexMode
    tie: bool = False
    product_value: float = math.nan  # 2 log R_sup
    formula_value: float = math.nan  # (D/A)^((p-1)/theta)


def sup_slice_radius(R: float, mode=IndexMode.AS_PRINTED, tol: float = 1e-12) -> float:
    """Radius entering the product branch.

    As-printed mode uses R_inf exactly as the bound is stated.  Strict mode
    uses the supremum of its own radii R prod_{k>=1}(1 + 2^-k), truncated to
    the same tolerance; the two coincide.
    """
    mode = IndexMode.parse(mode)
    if mode is IndexMode.AS_PRINTED:
        return r_infinity(R, tol)
    prod = 1.0
    for j in range(tail_terms(tol)):
        prod *= 1.0 + slice_width(j, mode)
    return R * prod


def bound(params: ProblemParams, mode=IndexMode.AS_PRINTED) -> LifespanBound:
    mode = IndexMode.parse(mode)
    theta = params.theta
    if not theta > 0:
        raise DegenerateExponentError(
            f"theta = {theta!r} <= 0: the lifespan formula is degenerate (validator warns about this)"
        )
    product = 2.0 * math.log(sup_slice_radius(params.R, mode))
    log_base = log_constant_D(params) - math.log(params.A)
    expo = (params.p - 1.0) / theta
    try:
        formula = math.exp(expo * log_base)
    except OverflowError:
        formula = math.inf
    tie = abs(formula - product) <= TIE_TOL * max(abs(formula), abs(product))
    if tie or formula > product:
        branch, log_T = FORMULA, formula
    else:
        branch, log_T = PRODUCT, product
    try:
        T = math.exp(log_T)
    except OverflowError:
        T = math.inf
    return LifespanBound(
        T_bound=T,
        log_T_bound=log_T,
        branch=branch,
        theta=theta,
        mode=mode,
        tie=tie,
        product_value=product,
        formula_value=formula,
    )


def critical_time_identity(params: ProblemParams) -> float:
    """Blow-up quotient at log T = (D/A)^((p-1)/theta); equals 1 by construction of D."""
    theta = params.theta
    if not theta > 0:
        raise DegenerateExponentError(f"theta = {theta!r} <= 0")
    log_T = math.exp((params.p - 1.0) / theta * (log_constant_D(params) - math.log(params.A)))
    return q_value(params, log_T=log_T)


def glassey_exponent(n: int) -> float:
    """p_G(n) = (n+1)/(n-1)."""
    if n < 2:
        raise InputError(f"space dimension must be >= 2, got {n!r}")
    return (n + 1.0) / (n - 1.0)


@dataclass(frozen=True)
class GlasseyBound:
    n: int
    p: float
    eps: float
    eps_exponent: float  # log T_bound ~ eps^-eps_exponent on the formula branch
    params: ProblemParams
    lifespan: LifespanBound

    @property
    def T_bound(self) -> float:
        return self.lifespan.T_bound


def glassey_bound(
    n: int,
    eps: float,
    kappa: float = 1.0,
    m: float = 1.0,
    B: float = 1.0,
    R: float = 2.0,
    mode=IndexMode.AS_PRINTED,
) -> GlasseyBound:
    """Lifespan bound for the derivative-type tuple at p = p_G(n) with A = kappa eps^m."""
    p = glassey_exponent(n)
    if not (eps > 0 and kappa > 0):
        raise InputError("eps and kappa must be positive")
    params = canonical(p=p, A=kappa * eps**m, B=B, R=R)
    lb = bound(params, mode)
    return GlasseyBound(
        n=n,
        p=p,
        eps=eps,
        eps_exponent=m * (p - 1.0) / params.theta,
        params=params,
        lifespan=lb,
    )
