"""Amplitude sweeps: solver against bound, and the log-lifespan scaling fit."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .errors import InputError, SlicelifeError
from .exponents import ProblemParams, constant_D, validate
from .lifespan import bound
from .volterra import SolveSpec, blowup_time, resolve_spec

COLUMNS = [
    "A", "p", "B", "R", "theta", "branch", "log_T_bound",
    "log_T_num", "margin", "h", "cap", "converged",
]
MAX_NODES = 20000  # coarsest-grid node budget per solve


@dataclass(frozen=True)
class SweepRecord:
    A: float
    p: float
    B: float
    R: float
    theta: float
    branch: Optional[str]
    log_T_bound: Optional[float]
    log_T_num: Optional[float]  # None when the solve survived or failed
    margin: Optional[float]  # log T_bound - log T_num
    h: float
    cap: Optional[float]
    converged: bool
    note: str = ""

    @property
    def blew_up(self) -> bool:
        return self.log_T_num is not None

    def row(self) -> dict:
        return {k: getattr(self, k) for k in COLUMNS}

    def as_dict(self) -> dict:
        return asdict(self)


def default_amplitudes(params: ProblemParams, n: int = 4) -> List[float]:
    """Geometric amplitudes in [D/13, D]."""
    D = constant_D(params)
    return np.geomspace(D / 13.0, D, n).tolist()


def _one(base: ProblemParams, A: float, spec: SolveSpec, refinements: int, max_nodes: int) -> SweepRecord:
    params = base.replace(A=A)
    empty = dict(
        A=A, p=base.p, B=base.B, R=base.R, theta=base.theta, branch=None,
        log_T_bound=None, log_T_num=None, margin=None, h=spec.h, cap=spec.cap, converged=False,
    )
    try:
        report = validate(params)
        if not report.ok:
            return SweepRecord(**empty, note="invalid: " + "; ".join(report.violations))
        lb = bound(params, spec.mode)
        empty.update(branch=lb.branch, log_T_bound=lb.log_T_bound)
        horizon = spec.horizon if spec.horizon is not None else 1.2 * lb.log_T_bound
        if not math.isfinite(horizon) or horizon / spec.h > max_nodes:
            return SweepRecord(**empty, note="horizon too large for the node budget")
        rs = resolve_spec(params, replace(spec, horizon=horizon))
        empty.update(cap=rs.cap)
        est = blowup_time(params, rs, refinements)
    except SlicelifeError as exc:
        return SweepRecord(**empty, note=f"{type(exc).__name__}: {exc}")
    if est.survived:
        return SweepRecord(**empty, note=est.note)
    empty.update(
        log_T_num=est.log_T_num,
        margin=lb.log_T_bound - est.log_T_num,
        converged=est.converged and not est.forcing_dominated,
    )
    return SweepRecord(**empty, note=est.note)


def run_sweep(
    base: ProblemParams,
    amplitudes: Sequence[float],
    spec: SolveSpec = SolveSpec(),
    refinements: int = 3,
    *,
    workers: int = 1,
    max_nodes: int = MAX_NODES,
) -> List[SweepRecord]:
    """One record per amplitude, in input order; failures stay in their record."""
    amplitudes = [float(a) for a in amplitudes]
    if not amplitudes:
        raise InputError("amplitude list is empty")
    args = [(base, A, spec, refinements, max_nodes) for A in amplitudes]
    if workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_one, *zip(*args)))
    return [_one(*a) for a in args]


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    n: int


def scaling_fit(records: Sequence[SweepRecord], theta: Optional[float] = None) -> ScalingFit:
    """Least squares of log T_num against A^(-(p-1)/theta) over converged blow-ups."""
    use = [r for r in records if r.blew_up and r.converged]
    if len(use) < 3:
        raise InputError(f"scaling fit needs >= 3 converged blow-up records, got {len(use)}")
    th = use[0].theta if theta is None else theta
    xs = np.array([r.A ** (-(r.p - 1.0) / th) for r in use])
    ys = np.array([r.log_T_num for r in use])
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(slope), float(intercept), r2, len(use))
