"""Lower-bound frames of the slicing iteration.

A frame is the function ``A_j t^a (log t)^-b_j (log t/R_j)^c_j``.  One
iteration feeds frame j through the double integral, keeps only the slice
``s in [t/(1+delta), t]`` and produces frame j+1 with

    b_{j+1} = p b_j - x
    c_{j+1} = p c_j + z + 1
    R_{j+1} = (1 + delta) R_j
    log A_{j+1} = p log A_j + log B - log(1 + 1/delta) - log c_{j+1}

Amplitudes grow or decay doubly exponentially in j, so they are only ever
held as logarithms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .errors import DomainError, InputError
from .exponents import ProblemParams, constant_C, log_constant_D, r_infinity

DEFAULT_JMAX = 40


class IndexMode(str, enum.Enum):
    """Which slice-width schedule to use.

    ``AS_PRINTED`` takes delta_j = 2^-j from j = 0, so R_j tends to 2 R_inf.
    ``STRICT`` takes delta_j = 2^-(j+1), so R_j tends to R_inf.
    """

    AS_PRINTED = "as-printed"
    STRICT = "strict"

    @classmethod
    def parse(cls, value) -> "IndexMode":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            raise InputError(f"unknown index mode {value!r}; use 'as-printed' or 'strict'") from None


def slice_width(j: int, mode: IndexMode = IndexMode.AS_PRINTED) -> float:
    mode = IndexMode.parse(mode)
    return 2.0 ** -(j if mode is IndexMode.AS_PRINTED else j + 1)


@dataclass(frozen=True)
class Frame:
    j: int
    log_amplitude: float
    power: float
    loglog_exponent: float
    slicedlog_exponent: float
    slice_radius: float
    mode: IndexMode = IndexMode.AS_PRINTED
    lower_bound: bool = False  # True for the closed-form amplitude estimate
    params: Optional[ProblemParams] = None


def initial_frame(params: ProblemParams, mode: IndexMode = IndexMode.AS_PRINTED) -> Frame:
    return Frame(
        j=0,
        log_amplitude=math.log(params.A),
        power=params.a,
        loglog_exponent=params.b,
        slicedlog_exponent=params.c,
        slice_radius=params.R,
        mode=IndexMode.parse(mode),
        params=params,
    )


def advance(frame: Frame, params: ProblemParams, mode: Optional[IndexMode] = None) -> Frame:
    mode = frame.mode if mode is None else IndexMode.parse(mode)
    P = params
    delta = slice_width(frame.j, mode)
    c_next = P.p * frame.slicedlog_exponent + P.z + 1.0
    log_a = (
        P.p * frame.log_amplitude
        + math.log(P.B)
        - math.log1p(1.0 / delta)
        - math.log(c_next)
    )
    return Frame(
        j=frame.j + 1,
        log_amplitude=log_a,
        power=frame.power,
        loglog_exponent=P.p * frame.loglog_exponent - P.x,
        slicedlog_exponent=c_next,
        slice_radius=(1.0 + delta) * frame.slice_radius,
        mode=mode,
        params=params,
    )


def iterate_frames(params: ProblemParams, jmax: int = DEFAULT_JMAX, mode=IndexMode.AS_PRINTED) -> List[Frame]:
    """Frames 0..jmax by exact recursion."""
    out = [initial_frame(params, mode)]
    for _ in range(jmax):
        out.append(advance(out[-1], params, mode))
    return out


def slice_radius(j: int, R: float, mode=IndexMode.AS_PRINTED) -> float:
    r = R
    for k in range(j):
        r *= 1.0 + slice_width(k, mode)
    return r


def log_amplitude_floor(j: int, params: ProblemParams) -> float:
    """Closed-form lower bound on log A_j.

    p^j log(A/K) + j log(2p)/(p-1) + log K  with  K = (2p)^(p/(p-1)^2) C^(1/(p-1)).
    """
    P = params
    q = P.p - 1.0
    log_k = P.p / q**2 * math.log(2.0 * P.p) + math.log(constant_C(P)) / q
    return P.p**j * (math.log(P.A) - log_k) + j * math.log(2.0 * P.p) / q + log_k


def closed_form(j: int, params: ProblemParams, mode=IndexMode.AS_PRINTED) -> Frame:
    if j < 0:
        raise InputError(f"frame index must be >= 0, got {j}")
    P = params
    q = P.p - 1.0
    pj = P.p**j
    return Frame(
        j=j,
        log_amplitude=log_amplitude_floor(j, P),
        power=P.a,
        loglog_exponent=pj * (P.b - P.x / q) + P.x / q,
        slicedlog_exponent=pj * (P.c + (P.z + 1.0) / q) - (P.z + 1.0) / q,
        slice_radius=slice_radius(j, P.R, mode),
        mode=IndexMode.parse(mode),
        lower_bound=True,
        params=params,
    )


def eval_log(frame: Frame, t):
    """log of the frame value at ``t``; accepts a scalar or an array.

    Never forms the frame value itself.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= frame.slice_radius) or np.any(t_arr <= 1.0):
        raise DomainError(f"frame {frame.j} is only defined for t > R_j = {frame.slice_radius!r}")
    with np.errstate(divide="ignore"):
        logt = np.log(t_arr)
        out = (
            frame.log_amplitude
            + frame.power * logt
            - frame.loglog_exponent * np.log(logt)
            + frame.slicedlog_exponent * np.log(np.log(t_arr / frame.slice_radius))
        )
    if out.ndim == 0:
        return float(out)
    return out


def frame_value(frame: Frame, t):
    """Frame value, zero for t <= R_j.

    Only meaningful where the value is representable; use :func:`eval_log`
    otherwise.
    """
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr)
    inside = t_arr > frame.slice_radius
    if np.any(inside):
        out[inside] = np.exp(eval_log(frame, t_arr[inside]))
    if out.ndim == 0:
        return float(out)
    return out


def log_q_value(params: ProblemParams, T: Optional[float] = None, *, log_T: Optional[float] = None) -> float:
    P = params
    if (T is None) == (log_T is None):
        raise InputError("give exactly one of T or log_T")
    if log_T is None:
        if not T > 1:
            raise DomainError(f"T must exceed 1, got {T!r}")
        log_T = math.log(T)
    theta = P.theta
    if theta == 0:
        raise DomainError("theta == 0: blow-up criterion does not depend on T")
    threshold = 2.0 * math.log(r_infinity(P.R))
    if not log_T > threshold:
        raise DomainError(
            f"criterion applies only for T > R_inf^2 (log T = {log_T!r} <= {threshold!r})"
        )
    return math.log(P.A) + theta / (P.p - 1.0) * math.log(log_T) - log_constant_D(P)


def q_value(params: ProblemParams, T: Optional[float] = None, *, log_T: Optional[float] = None) -> float:
    """Blow-up quotient A (log T)^(theta/(p-1)) / D; a value above 1 forces blow-up by T."""
    return math.exp(log_q_value(params, T, log_T=log_T))


def frame_table(params: ProblemParams, jmax: int = DEFAULT_JMAX, mode=IndexMode.AS_PRINTED):
    """Rows (j, b_j, c_j, R_j, log A_j exact, log A_j closed-form floor)."""
    rows = []
    for fr in iterate_frames(params, jmax, mode):
        rows.append(
            {
                "j": fr.j,
                "b_j": fr.loglog_exponent,
                "c_j": fr.slicedlog_exponent,
                "R_j": fr.slice_radius,
                "log_A_exact": fr.log_amplitude,
                "log_A_closed": log_amplitude_floor(fr.j, params),
            }
        )
    return rows


def with_log_amplitude(frame: Frame, log_amplitude: float) -> Frame:
    return replace(frame, log_amplitude=log_amplitude)
