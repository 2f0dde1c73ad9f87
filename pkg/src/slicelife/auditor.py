"""Numerical checks of the inequality chain behind the lifespan bound.

Every comparison involving frames is done in log-space, since frame values
leave the floating-point range after a handful of iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import DomainError, InputError
from .frames import Frame, IndexMode, advance, eval_log, iterate_frames
from .integrals import double_integral_oracle
from .volterra import Solution

FIRST_INEQ_TOL = 1e-12
STEP_TOL = 1e-6
MAX_STEP_J = 6
LOG_TINY = math.log(np.finfo(float).tiny)


@dataclass
class AuditReport:
    check: str
    j: int
    passed: bool
    worst_margin: float
    checked: int = 0
    skipped: int = 0
    trivial: int = 0
    violations: List[int] = field(default_factory=list)  # node or sample indices
    notes: List[str] = field(default_factory=list)
    margins: Optional[np.ndarray] = field(default=None, repr=False)

    def row(self) -> dict:
        return {
            "check": self.check,
            "j": self.j,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "checked": self.checked,
            "skipped": self.skipped,
        }


def check_first_inequality(solution: Solution, params=None) -> AuditReport:
    """H(t_k) >= F(t_k) at every node; margin is (H - F)/F where F > 0."""
    H, F = solution.H, solution.F
    ok = H >= F * (1.0 - FIRST_INEQ_TOL)
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = np.where(F > 0, (H - F) / F, H - F)
    bad = np.flatnonzero(~ok).tolist()
    return AuditReport(
        check="first_inequality",
        j=0,
        passed=not bad,
        worst_margin=float(np.min(margin)),
        checked=len(H),
        violations=bad,
        margins=margin,
    )


def check_frame_dominates(
    solution: Solution,
    frame: Frame,
    rel_tol: float = STEP_TOL,
    mode: Optional[IndexMode] = None,
) -> AuditReport:
    """log H(t_k) >= log frame(t_k) - rel_tol for every node beyond R_j."""
    if mode is not None and IndexMode.parse(mode) is not frame.mode:
        raise InputError(f"frame built in {frame.mode.value!r} mode, audit requested {IndexMode.parse(mode).value!r}")
    if frame.params is not None and frame.params != solution.params:
        raise InputError("frame and solution come from different parameters")
    if getattr(solution.status, "forcing_dominated", False):
        raise InputError("solution is forcing-dominated; domination checks are meaningless")

    sel = np.flatnonzero((solution.t >= frame.slice_radius * (1.0 + 1e-9)) & (solution.t > frame.slice_radius))
    logs_frame = eval_log(frame, solution.t[sel]) if len(sel) else np.empty(0)
    with np.errstate(divide="ignore"):
        logs_h = np.log(solution.H[sel])
    trivial = logs_frame < LOG_TINY
    margin = logs_h - logs_frame
    real = ~trivial
    bad = sel[real & (margin < -rel_tol)].tolist()
    worst = float(np.min(margin[real])) if np.any(real) else math.inf
    notes = []
    if np.any(trivial):
        notes.append(f"{int(np.sum(trivial))} node(s) trivially dominated (frame below representable range)")
    return AuditReport(
        check="frame_dominates",
        j=frame.j,
        passed=not bad,
        worst_margin=worst,
        checked=int(np.sum(real)),
        trivial=int(np.sum(trivial)),
        violations=bad,
        notes=notes,
        margins=margin,
    )


def default_sample_times(frame_next: Frame, n: int = 20, span: float = 5.0) -> np.ndarray:
    """Geometric samples in [1.01 R_{j+1}, span R_{j+1}]."""
    r = frame_next.slice_radius
    return r * np.geomspace(1.01, span, n)


def check_iteration_step(
    frame_j: Frame,
    params,
    sample_times: Optional[Sequence[float]] = None,
    *,
    tol: float = STEP_TOL,
    march_h: float = 1e-3,
    rtol: float = 1e-10,
    allow_large_j: bool = False,
) -> AuditReport:
    """Full right-hand side driven by frame j must dominate frame j+1.

    RHS_j(t) = B (log t)^x int_R^t ds int_R^s r^y (log r/R)^z frame_j(r)^p dr
    is evaluated by the adaptive oracle, with frame_j set to zero below R_j.
    """
    if frame_j.j > MAX_STEP_J and not allow_large_j:
        raise InputError(f"iteration-step checks are capped at j <= {MAX_STEP_J}")
    P = params
    nxt = advance(frame_j, P, frame_j.mode)
    ts = default_sample_times(nxt) if sample_times is None else np.asarray(sample_times, dtype=float)

    margins = np.full(len(ts), np.nan)
    bad, notes = [], []
    skipped = boundary = 0
    lower = frame_j.slice_radius
    for i, t in enumerate(ts.tolist()):
        if t <= nxt.slice_radius:
            # frame j+1 vanishes here and RHS >= 0
            margins[i] = math.inf
            boundary += 1
            continue
        probe = lower + (t - lower) * np.array([0.25, 0.5, 0.75, 1.0])
        shift = float(np.max(eval_log(frame_j, probe)))
        if not math.isfinite(shift) or shift < LOG_TINY:
            skipped += 1
            notes.append(f"sample {i} (t={t:.6g}) skipped: frame {frame_j.j} underflows")
            continue

        def phi(r, _shift=shift):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            inside = r > lower
            out[inside] = np.exp(eval_log(frame_j, r[inside]) - _shift)
            return out

        alpha = None if lower == P.R else P.p * frame_j.slicedlog_exponent
        res = double_integral_oracle(t, phi, P, lower=lower, alpha=alpha, rtol=rtol, march_h=march_h)
        if not res.value > 0:
            skipped += 1
            notes.append(f"sample {i} (t={t:.6g}) skipped: scaled integral underflows")
            continue
        log_rhs = math.log(P.B) + P.x * math.log(math.log(t)) + math.log(res.value) + P.p * shift
        try:
            log_next = eval_log(nxt, t)
        except DomainError:
            log_next = -math.inf
        margins[i] = log_rhs - log_next
        if margins[i] < -tol:
            bad.append(i)

    finite = margins[np.isfinite(margins)]
    worst = float(np.min(finite)) if len(finite) else math.inf
    if boundary:
        notes.append(f"{boundary} sample(s) at or below R_(j+1): frame j+1 vanishes there")
    return AuditReport(
        check="iteration_step",
        j=frame_j.j,
        passed=not bad,
        worst_margin=worst,
        checked=len(ts) - skipped,
        skipped=skipped,
        violations=bad,
        notes=notes,
        margins=margins,
    )


def audit(
    solution: Solution,
    params,
    mode=IndexMode.AS_PRINTED,
    dominate_jmax: int = 4,
    step_jmax: int = 3,
    rel_tol: float = STEP_TOL,
    n_samples: int = 20,
) -> List[AuditReport]:
    """The full battery: first inequality, frame domination, iteration steps."""
    frames = iterate_frames(params, max(dominate_jmax, step_jmax), mode)
    reports = [check_first_inequality(solution, params)]
    for fr in frames[: dominate_jmax + 1]:
        reports.append(check_frame_dominates(solution, fr, rel_tol))
    for fr in frames[: step_jmax + 1]:
        nxt = advance(fr, params, mode)
        reports.append(check_iteration_step(fr, params, default_sample_times(nxt, n_samples)))
    return reports
