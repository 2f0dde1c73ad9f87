import math

import numpy as np
import pytest

from slicelife.errors import InputError, OracleFailure, SingularityError
from slicelife.exponents import ProblemParams, canonical
from slicelife.integrals import (
    LogGrid,
    MarchState,
    double_integral_oracle,
    first_cell,
    march,
    march_step,
)


def calib_params(z):
    # only y, z, p, R, c enter the integral
    return ProblemParams(a=0, b=0, c=0, x=0, y=-1, z=z, p=1.5, A=1, B=1, R=1)


def exact_J(z, t):
    L = math.log(t)
    if z == 0:
        return t * L - t + 1
    return t * (L * L / 2 - L + 1) - 1


def exact_I(z, t):
    L = math.log(t)
    return L if z == 0 else L * L / 2


def grid_to(t, h):
    n = round(math.log(t) / h)
    return LogGrid(R=1.0, h=math.log(t) / n, n_max=n + 1)


CASES = [(0, math.e), (1, math.e**2)]


@pytest.mark.parametrize("z, t", CASES)
def test_march_closed_forms(z, t):
    g = grid_to(t, 1e-3)
    I, J = march(g, np.ones(g.n_max), -1, z, 1.5, (1.0, 0.0))
    assert I[-1] == pytest.approx(exact_I(z, t), rel=1e-6)
    assert J[-1] == pytest.approx(exact_J(z, t), rel=1e-6)


def test_named_values():
    assert exact_J(0, math.e) == pytest.approx(1.0)
    assert exact_I(1, math.e**2) == pytest.approx(2.0)


@pytest.mark.parametrize("z, t", CASES)
def test_second_order_convergence(z, t):
    errs = []
    for h in (2e-3, 1e-3, 5e-4):
        g = grid_to(t, h)
        _, J = march(g, np.ones(g.n_max), -1, z, 1.5, (1.0, 0.0))
        errs.append(abs(J[-1] - exact_J(z, t)))
    for e1, e2 in zip(errs, errs[1:]):
        assert 3.6 < e1 / e2 < 4.4


def test_zero_phi():
    g = LogGrid(R=2.0, h=1e-2, n_max=200)
    I, J = march(g, np.zeros(g.n_max), -3, 1, 2, (0.0, 1.0))
    assert not I.any() and not J.any()


def test_accumulators_monotone():
    P = canonical()
    g = LogGrid(R=P.R, h=1e-2, n_max=300)
    phi = np.abs(np.sin(g.sigma * 3)) * g.sigma
    I, J = march(g, phi, P.y, P.z, P.p, (1.0, 1.0))
    assert np.all(np.diff(I) >= 0) and np.all(np.diff(J) >= 0)


def test_march_step_rejects_negative_phi():
    g = LogGrid(R=1.0, h=1e-2, n_max=10)
    with pytest.raises(InputError):
        march_step(MarchState(), g, 1, -1.0, -1, 0, 2, (1.0, 0.0))


def test_march_step_order():
    g = LogGrid(R=1.0, h=1e-2, n_max=10)
    with pytest.raises(InputError):
        march_step(MarchState(), g, 2, 1.0, -1, 0, 2, (1.0, 0.0))


def test_first_cell_examples():
    g = LogGrid(R=1.0, h=1e-3, n_max=3)
    assert first_cell(g, -1, 0, 2, 0.0, 0.0) == 0.0
    assert first_cell(g, -1, 0, 2, 1.0, 0.0) == pytest.approx(1e-3, rel=1e-14)


def test_first_cell_power_scaling():
    P = canonical()
    g1 = LogGrid(R=P.R, h=1e-3, n_max=3)
    g2 = LogGrid(R=P.R, h=5e-4, n_max=3)
    ratio = first_cell(g1, P.y, P.z, P.p, 1.0, P.c) / first_cell(g2, P.y, P.z, P.p, 1.0, P.c)
    # h^4 scaling, up to the frozen factor e^{(y+1)h/4}
    assert ratio == pytest.approx(16.0, rel=1e-3)


def test_first_cell_consistency():
    P = canonical()
    xs, ws = np.polynomial.legendre.leggauss(30)
    for h in (1e-1, 1e-2, 1e-3):
        u = 0.5 * h * (xs + 1)
        exact = 0.5 * h * np.sum(ws * P.R ** (P.y + 1) * np.exp((P.y + 1) * u) * u**3)
        approx = first_cell(LogGrid(R=P.R, h=h, n_max=3), P.y, P.z, P.p, 1.0, P.c)
        assert abs(approx / exact - 1) < h  # frozen-midpoint factor is first order


def test_first_cell_singular():
    g = LogGrid(R=1.0, h=1e-3, n_max=3)
    with pytest.raises(SingularityError):
        first_cell(g, -1, -1.5, 2, 1.0, 0.25)
    with pytest.raises(InputError):
        first_cell(g, -1, 0, 2, -1.0, 0.0)


@pytest.mark.parametrize("z, t", CASES)
def test_oracle_closed_forms(z, t):
    res = double_integral_oracle(t, np.ones_like, calib_params(z), alpha=z)
    assert res.value == pytest.approx(exact_J(z, t), rel=1e-8)
    assert res.error <= 1e-8 * res.value


@pytest.mark.parametrize("z, t", CASES)
def test_oracle_agrees_with_march(z, t):
    g = grid_to(t, 1e-3)
    _, J = march(g, np.ones(g.n_max), -1, z, 1.5, (1.0, 0.0))
    res = double_integral_oracle(t, np.ones_like, calib_params(z), alpha=z)
    assert res.nodes >= 10 * g.n_max
    assert J[-1] == pytest.approx(res.value, rel=1e-6)


def test_oracle_zero():
    res = double_integral_oracle(3.0, np.zeros_like, canonical())
    assert res.value == 0.0 and res.error == 0.0


def test_oracle_monotone_in_t():
    P = canonical()
    phi = lambda r: r * np.log(r / P.R)
    vals = [double_integral_oracle(t, phi, P).value for t in np.linspace(2.5, 12, 8)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_oracle_singular_endpoint():
    # z = -1/2, phi = 1: int_1^t (t - r) r^-1 (log r)^-1/2 dr, against a u = w^2 substitution
    P = ProblemParams(a=0, b=0, c=0, x=0, y=-1, z=-0.5, p=2, R=1.0)
    t = math.e
    res = double_integral_oracle(t, np.ones_like, P)
    xs, ws = np.polynomial.legendre.leggauss(60)
    w = 0.5 * (xs + 1)
    # u = w^2, du = 2w dw, u^-1/2 = 1/w
    ref = 0.5 * np.sum(ws * (t - np.exp(w**2)) * 2.0)
    assert res.value == pytest.approx(ref, rel=1e-10)


def test_oracle_failure_is_reported():
    rng = np.random.default_rng(0)
    noisy = lambda r: rng.uniform(0.5, 1.5, size=np.shape(r))
    with pytest.raises(OracleFailure):
        double_integral_oracle(10.0, noisy, canonical(), max_levels=12)
    with pytest.raises(OracleFailure):
        double_integral_oracle(10.0, lambda r: np.full(np.shape(r), np.nan), canonical())


def test_loggrid_validation():
    with pytest.raises(InputError):
        LogGrid(R=2.0, h=0.0, n_max=10)
    g = LogGrid.covering(2.0, 0.1, 1.0)
    assert g.sigma[0] == 0.0 and g.sigma[-1] >= 1.0
    assert np.all(np.diff(g.t) > 0)
