"""Forward marching for the equality version of the inequality system,

    H(t) = F(t) + B (log t)^x int_R^t ds int_R^s r^y (log r/R)^z H(r)^p dr,
    F(t) = A t^a (log t)^-b (log t/R)^c,

with blow-up reported as the first grid time at which H crosses a cap.
Any solution of the equality is a solution of the inequalities, so the
cap-crossing time is bounded by the lifespan bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Union

import numpy as np

from .errors import InputError, NumericalFailure, SpecError, ValidationError
from .exponents import ProblemParams, validate
from .frames import IndexMode
from .integrals import LogGrid, first_cell
from .lifespan import bound

DEFAULT_H = 1e-3
DEFAULT_CAP_FACTOR = 1e12
HORIZON_FACTOR = 1.2


@dataclass(frozen=True)
class SolveSpec:
    h: float = DEFAULT_H
    cap: Optional[float] = None  # default: 1e12 * max(1, sup F)
    horizon: Optional[float] = None  # sigma_max; default 1.2 * log T_bound
    sweeps: int = 1
    mode: IndexMode = IndexMode.AS_PRINTED

    def __post_init__(self):
        if not self.h > 0:
            raise SpecError(f"h must be positive, got {self.h!r}")
        if self.sweeps < 1:
            raise SpecError("at least one corrector sweep is required")
        if self.horizon is not None and not self.horizon > 0:
            raise SpecError(f"horizon must be positive, got {self.horizon!r}")
        if self.cap is not None and not self.cap > 0:
            raise SpecError(f"cap must be positive, got {self.cap!r}")


@dataclass(frozen=True)
class BlewUp:
    T_num: float
    node: int
    forcing_dominated: bool = False

    @property
    def log_T_num(self) -> float:
        return math.log(self.T_num)


@dataclass(frozen=True)
class Survived:
    horizon: float  # sigma_max reached


Status = Union[BlewUp, Survived]


@dataclass
class Solution:
    params: ProblemParams
    spec: SolveSpec  # fully resolved: cap and horizon filled in
    grid: LogGrid
    t: np.ndarray
    sigma: np.ndarray
    F: np.ndarray
    H: np.ndarray
    I: np.ndarray
    J: np.ndarray
    status: Status
    diagnostics: dict = field(default_factory=dict)

    @property
    def blew_up(self) -> bool:
        return isinstance(self.status, BlewUp)


def forcing(params: ProblemParams, t):
    """F(t) = A t^a (log t)^-b (log t/R)^c, with F(R) = 0 when c > 0."""
    P = params
    t = np.asarray(t, dtype=float)
    if P.c < 0:
        raise InputError("c < 0 makes the forcing singular at t = R; no continuous solution")
    with np.errstate(divide="ignore"):
        s = np.log(t / P.R)
        s = np.where(s < 0, 0.0, s)
        out = P.A * t**P.a * np.log(t) ** (-P.b) * (s**P.c if P.c != 0 else 1.0)
    return out


def resolve_spec(params: ProblemParams, spec: SolveSpec) -> SolveSpec:
    """Fill in the default horizon and cap."""
    horizon = spec.horizon
    if horizon is None:
        horizon = HORIZON_FACTOR * bound(params, spec.mode).log_T_bound
        if not math.isfinite(horizon):
            raise SpecError("lifespan bound is infinite; give an explicit horizon")
    cap = spec.cap
    if cap is None:
        grid = LogGrid.covering(params.R, spec.h, horizon)
        cap = DEFAULT_CAP_FACTOR * max(1.0, float(np.max(forcing(params, grid.t))))
    return replace(spec, horizon=horizon, cap=cap)


def solve(params: ProblemParams, spec: SolveSpec = SolveSpec(), *, check: bool = True) -> Solution:
    """March the equality dynamics until H crosses the cap or the horizon is reached.

    ``check=False`` skips parameter validation (used for B = 0 test runs).
    """
    if check:
        report = validate(params)
        if not report.ok:
            raise ValidationError("invalid parameters: " + "; ".join(report.violations), report.violations)
    spec = resolve_spec(params, spec)
    P = params
    grid = LogGrid.covering(P.R, spec.h, spec.horizon)
    n = grid.n_max
    h = grid.h
    t = grid.t
    sigma = grid.sigma
    F = forcing(P, t)
    if not np.all(np.isfinite(F)):
        raise NumericalFailure("forcing is not finite on the grid")

    cap = spec.cap
    forcing_dominated_start = F[1] > cap
    if not forcing_dominated_start and float(np.max(F)) >= cap:
        raise SpecError(f"cap {cap!r} is below the forcing maximum {float(np.max(F))!r} on the grid")

    H = np.empty(n)
    I = np.zeros(n)
    J = np.zeros(n)
    H[0] = F[0]
    # local model for the first cell: F ~ A R^a (log R)^-b (log r/R)^c
    kappa = P.A * P.R**P.a * math.log(P.R) ** (-P.b)
    y1 = P.y + 1.0
    Ry1 = P.R**y1
    g_prev = 0.0
    max_ratio = 0.0
    status: Status = Survived(horizon=spec.horizon)
    last = n - 1

    for k in range(1, n):
        tk = float(t[k])
        prefac = P.B * math.log(tk) ** P.x
        w = Ry1 * math.exp(y1 * sigma[k]) * sigma[k] ** P.z
        half_prev = 0.5 * h * I[k - 1] * t[k - 1]

        if k == 1:
            Ik = first_cell(grid, P.y, P.z, P.p, kappa, P.c)
            Jk = J[0] + half_prev + 0.5 * h * Ik * tk
            Hk = F[k] + prefac * Jk
        else:
            # predictor drops node k's own contribution
            Ik = I[k - 1] + 0.5 * h * g_prev
            Jk = J[k - 1] + half_prev + 0.5 * h * Ik * tk
            Hk = F[k] + prefac * Jk
            for _ in range(spec.sweeps):
                if not (math.isfinite(Hk) and Hk <= cap):
                    break
                try:
                    g_k = w * Hk**P.p
                except OverflowError:
                    g_k = math.inf
                Ik = I[k - 1] + 0.5 * h * (g_prev + g_k)
                Jk = J[k - 1] + half_prev + 0.5 * h * Ik * tk
                Hk = F[k] + prefac * Jk

        if math.isnan(Hk):
            raise NumericalFailure(f"non-finite H at node {k} (t = {tk!r})", node=k)
        H[k], I[k], J[k] = Hk, Ik, Jk
        if H[k - 1] > 0 and math.isfinite(Hk):
            max_ratio = max(max_ratio, Hk / H[k - 1])
        if Hk > cap or math.isinf(Hk):
            status = BlewUp(T_num=tk, node=k, forcing_dominated=bool(F[k] > cap))
            last = k
            break
        if not Hk > 0:
            raise NumericalFailure(f"H lost positivity at node {k}", node=k)
        try:
            g_prev = w * Hk**P.p
        except OverflowError:
            g_prev = math.inf
        if not math.isfinite(g_prev):
            raise NumericalFailure(f"integrand overflow below the cap at node {k}", node=k)

    sl = slice(0, last + 1)
    return Solution(
        params=P,
        spec=spec,
        grid=grid,
        t=t[sl].copy(),
        sigma=sigma[sl].copy(),
        F=F[sl].copy(),
        H=H[sl].copy(),
        I=I[sl].copy(),
        J=J[sl].copy(),
        status=status,
        diagnostics={
            "max_growth_ratio": max_ratio,
            "nodes": last + 1,
            "forcing_dominated_start": bool(forcing_dominated_start),
        },
    )


@dataclass
class BlowupEstimate:
    T_num: Optional[float]
    log_T_num: Optional[float]
    levels: List[float]  # h per level
    log_T_levels: List[Optional[float]]
    deltas: List[float]  # |delta log T_num| between successive levels
    converged: bool
    survived: bool = False
    forcing_dominated: bool = False
    note: str = ""
    solutions: List[Solution] = field(default_factory=list, repr=False)


def blowup_time(
    params: ProblemParams,
    spec: SolveSpec = SolveSpec(),
    refinements: int = 3,
    *,
    rel_tol: float = 0.01,
    keep_solutions: bool = False,
) -> BlowupEstimate:
    """Solve on h, h/2, h/4, ... and report the finest cap-crossing time."""
    if refinements < 2:
        raise InputError("refinement study needs at least two levels")
    spec = resolve_spec(params, spec)
    hs, logs, sols = [], [], []
    forcing_dom = False
    for level in range(refinements):
        s = replace(spec, h=spec.h / 2**level)
        sol = solve(params, s)
        hs.append(s.h)
        if keep_solutions:
            sols.append(sol)
        if not sol.blew_up:
            logs.append(None)
            return BlowupEstimate(
                T_num=None,
                log_T_num=None,
                levels=hs,
                log_T_levels=logs,
                deltas=[],
                converged=False,
                survived=True,
                note=f"no blow-up before horizon sigma = {spec.horizon:.6g} at h = {s.h:.3g}",
                solutions=sols,
            )
        forcing_dom = forcing_dom or sol.status.forcing_dominated
        logs.append(sol.status.log_T_num)

    deltas = [abs(b - a) for a, b in zip(logs, logs[1:])]
    final = logs[-1]
    converged = deltas[-1] < rel_tol * abs(final)
    note = ""
    if forcing_dom:
        note = "forcing-dominated: the forcing alone crosses the cap"
    elif not converged:
        monotone = all(d2 <= d1 for d1, d2 in zip(deltas, deltas[1:]))
        note = "refinement not converged" + ("" if monotone else "; changes are not decreasing")
    return BlowupEstimate(
        T_num=math.exp(final),
        log_T_num=final,
        levels=hs,
        log_T_levels=logs,
        deltas=deltas,
        converged=converged,
        forcing_dominated=forcing_dom,
        note=note,
        solutions=sols,
    )


def trace_rows(solution: Solution):
    """Per-node rows (t, sigma, F, H, I, J)."""
    return [
        {"t": a, "sigma": b, "F": c, "H": d, "I": e, "J": f}
        for a, b, c, d, e, f in zip(
            solution.t.tolist(),
            solution.sigma.tolist(),
            solution.F.tolist(),
            solution.H.tolist(),
            solution.I.tolist(),
            solution.J.tolist(),
        )
    ]
