"""Quadrature for the iterated integral

    J(t) = int_R^t ds int_R^s r^y (log r/R)^z phi(r)^p dr

Two independent routes are provided.  The marching route works on a uniform
grid in sigma = log(t/R), accumulates the inner integral I and the outer
integral J cell by cell with the trapezoid rule, and treats the first cell
(where (log r/R)^z phi^p may be singular) with a closed form.  The oracle
swaps the order of integration, J(t) = int_R^t (t - r) g(r) dr, removes the
endpoint singularity by a power substitution and integrates adaptively with
Gauss-Legendre cells and Richardson error estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError, OracleFailure, SingularityError


@dataclass(frozen=True)
class LogGrid:
    R: float
    h: float
    n_max: int

    def __post_init__(self):
        if not self.h > 0:
            raise InputError(f"grid step must be positive, got {self.h!r}")
        if self.n_max < 2:
            raise InputError("grid needs at least two nodes")

    @classmethod
    def covering(cls, R: float, h: float, sigma_max: float) -> "LogGrid":
        return cls(R=R, h=h, n_max=int(math.ceil(sigma_max / h)) + 1)

    @property
    def sigma(self) -> np.ndarray:
        return np.arange(self.n_max) * self.h

    @property
    def t(self) -> np.ndarray:
        return self.R * np.exp(self.sigma)

    def t_at(self, k: int) -> float:
        return self.R * math.exp(k * self.h)


@dataclass(frozen=True)
class MarchState:
    k: int = 0
    inner: float = 0.0  # I_k
    outer: float = 0.0  # J_k
    g_prev: float = 0.0  # integrand (per unit sigma) at node k


def first_cell(grid: LogGrid, y: float, z: float, p: float, kappa: float, c_loc: float) -> float:
    """Inner integral over the first cell for phi ~ kappa (log r/R)^c_loc.

    The factor e^((y+1)u) is frozen at the cell midpoint; the rest is exact.
    """
    if kappa < 0:
        raise InputError(f"local amplitude must be >= 0, got {kappa!r}")
    alpha = z + p * c_loc
    if not alpha > -1:
        raise SingularityError(f"z + p*c_loc = {alpha!r} <= -1: first cell integral diverges")
    if kappa == 0:
        return 0.0
    h = grid.h
    return (
        kappa**p
        * grid.R ** (y + 1.0)
        * math.exp((y + 1.0) * h / 2.0)
        * h ** (alpha + 1.0)
        / (alpha + 1.0)
    )


def march_step(
    state: MarchState,
    grid: LogGrid,
    k: int,
    phi_k: float,
    y: float,
    z: float,
    p: float,
    local=None,
) -> MarchState:
    """Advance the accumulators from node k-1 to node k.

    ``phi_k`` is the (nonnegative) value at node k; the value at node k-1 is
    already folded into ``state.g_prev``.  ``local = (kappa, c_loc)`` is the
    model used for the first cell.
    """
    if k < 1 or state.k != k - 1:
        raise InputError(f"march_step expects node {state.k + 1}, got {k}")
    if not phi_k >= 0:
        raise InputError(f"phi must be finite and >= 0 (pass |phi|), got {phi_k!r} at node {k}")
    h = grid.h
    sigma = k * h
    g = grid.R ** (y + 1.0) * math.exp((y + 1.0) * sigma) * sigma**z * phi_k**p
    if k == 1:
        if local is None:
            raise InputError("first cell needs a local model (kappa, c_loc)")
        inner = first_cell(grid, y, z, p, *local)
    else:
        inner = state.inner + 0.5 * h * (state.g_prev + g)
    t_prev = grid.R * math.exp((k - 1) * h)
    t_k = grid.R * math.exp(sigma)
    outer = state.outer + 0.5 * h * (state.inner * t_prev + inner * t_k)
    return MarchState(k=k, inner=inner, outer=outer, g_prev=g)


def march(grid: LogGrid, phi: np.ndarray, y: float, z: float, p: float, local) -> tuple:
    """Run :func:`march_step` over all nodes; returns arrays (I, J)."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (grid.n_max,):
        raise InputError("phi must hold one value per grid node")
    inner = np.zeros(grid.n_max)
    outer = np.zeros(grid.n_max)
    state = MarchState()
    for k in range(1, grid.n_max):
        state = march_step(state, grid, k, float(phi[k]), y, z, p, local)
        inner[k] = state.inner
        outer[k] = state.outer
    return inner, outer


# ---------------------------------------------------------------------------
# Oracle

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)
_RICH = 2.0**8 - 1.0  # 4-point Gauss-Legendre is exact to degree 7


@dataclass(frozen=True)
class OracleResult:
    value: float
    error: float
    nodes: int
    levels: int


def _gauss_cells(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _GL_X[None, :]
    return half * (f(x) @ _GL_W)


def double_integral_oracle(
    t: float,
    phi: Callable[[np.ndarray], np.ndarray],
    params,
    *,
    lower: Optional[float] = None,
    alpha: Optional[float] = None,
    rtol: float = 1e-12,
    march_h: float = 1e-3,
    max_levels: int = 40,
) -> OracleResult:
    """Adaptive evaluation of int_R^t ds int_R^s r^y (log r/R)^z phi(r)^p dr.

    ``phi`` must vanish below ``lower`` (default ``params.R``), where it may
    behave like (log r/lower)^c_loc.  ``alpha`` is the algebraic exponent of
    the integrand at ``lower``; by default z + p*c when lower == R.
    """
    R, y, z, p = params.R, params.y, params.z, params.p
    lower = R if lower is None else float(lower)
    if not t > lower or lower < R:
        raise InputError(f"need R <= lower < t, got lower={lower!r}, t={t!r}")
    if alpha is None:
        alpha = z + p * params.c if lower == R else p * params.c
    if not alpha > -1:
        raise SingularityError(f"endpoint exponent {alpha!r} <= -1")

    span = math.log(t / lower)
    m = max(1, math.ceil(alpha + 1.0 - 1e-12))
    q = m / (alpha + 1.0)

    def integrand(w):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            v = span * w**q
            r = lower * np.exp(v)
            jac = span * q * w ** (q - 1.0)
            vals = (t - r) * r ** (y + 1.0) * np.log(r / R) ** z * np.abs(phi(r)) ** p * jac
        return vals

    # at least ten times the node count of a marching grid on [R, t]
    nodes_per_cell = 3 * len(_GL_X)
    n0 = max(16, math.ceil(10.0 * (math.log(t / R) / march_h + 1.0) / nodes_per_cell))
    edges = np.linspace(0.0, 1.0, n0 + 1)
    a, b = edges[:-1], edges[1:]

    done_val = 0.0
    done_err = 0.0
    nodes = 0
    history = []
    for level in range(1, max_levels + 1):
        mid = 0.5 * (a + b)
        g1 = _gauss_cells(integrand, a, b)
        g2 = _gauss_cells(integrand, a, mid) + _gauss_cells(integrand, mid, b)
        nodes += 3 * len(_GL_X) * len(a)
        est = (g2 - g1) / _RICH
        val = g2 + est
        err = np.abs(est)
        if not (np.all(np.isfinite(val)) and np.all(np.isfinite(err))):
            raise OracleFailure(f"non-finite integrand values at refinement level {level}")

        total_val = done_val + float(np.sum(val))
        total_err = done_err + float(np.sum(err))
        scale = done_val + float(np.sum(np.abs(val)))
        target = max(rtol * abs(total_val), 64 * np.finfo(float).eps * scale)
        history.append(total_err)
        if total_err <= target or total_err == 0.0:
            return OracleResult(total_val, total_err, nodes, level)

        # cells whose error density is acceptable are frozen
        width = b - a
        keep = err > target * width * 0.5
        done_val += float(np.sum(val[~keep]))
        done_err += float(np.sum(err[~keep]))
        a, b = a[keep], b[keep]
        if len(a) == 0:
            return OracleResult(total_val, total_err, nodes, level)
        mid = 0.5 * (a + b)
        a, b = np.concatenate([a, mid]), np.concatenate([mid, b])
        order = np.argsort(a, kind="stable")
        a, b = a[order], b[order]
        if len(history) >= 4 and not min(history[-3:]) < history[-4]:
            raise OracleFailure(
                f"error estimate stopped decreasing at level {level}: {history[-4:]!r}"
            )
    raise OracleFailure(f"no convergence after {max_levels} refinement levels (error {history[-1]!r})")
