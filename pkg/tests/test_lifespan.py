import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicelife.errors import DegenerateExponentError, InputError
from slicelife.exponents import ProblemParams, canonical, r_infinity
from slicelife.frames import IndexMode
from slicelife.lifespan import (
    FORMULA,
    PRODUCT,
    bound,
    critical_time_identity,
    glassey_bound,
    glassey_exponent,
    sup_slice_radius,
)

from .conftest import random_valid_tuple


def test_canonical_formula_branch(canon):
    lb = bound(canon)
    assert lb.branch == FORMULA
    assert lb.log_T_bound == pytest.approx(3.84, rel=1e-12)
    assert lb.product_value == pytest.approx(2 * math.log(4.76846), abs=1e-4)
    assert lb.T_bound == pytest.approx(math.exp(3.84), rel=1e-12)


def test_canonical_product_branch():
    lb = bound(canonical(A=400.0))
    assert lb.formula_value == pytest.approx(0.96, rel=1e-12)
    assert lb.branch == PRODUCT
    assert lb.T_bound == pytest.approx(r_infinity(2.0) ** 2, rel=1e-12)


def test_remark_exponent():
    for p in (1.5, 2.0, 3.0):
        P = canonical(p=p)
        assert (P.p - 1) / P.theta == pytest.approx(P.p - 1)


def test_tie_goes_to_formula():
    P = canonical()
    product = 2 * math.log(r_infinity(P.R))
    A = 384.0 / product  # formula value equals the product value
    lb = bound(P.replace(A=A))
    assert lb.tie and lb.branch == FORMULA


def test_degenerate_theta():
    P = ProblemParams(a=1, b=1, c=0.2, x=0, y=-3, z=-0.5, p=2)
    with pytest.raises(DegenerateExponentError):
        bound(P)


def test_strict_not_above_printed(rng):
    for _ in range(10):
        P = random_valid_tuple(rng)
        assert bound(P, IndexMode.STRICT).log_T_bound <= bound(P, IndexMode.AS_PRINTED).log_T_bound
    assert sup_slice_radius(2.0, IndexMode.STRICT) == pytest.approx(r_infinity(2.0), rel=1e-15)


@settings(max_examples=100, deadline=None)
@given(A1=st.floats(1e-3, 1e4), A2=st.floats(1e-3, 1e4))
def test_bound_non_increasing_in_A(A1, A2):
    lo, hi = sorted((A1, A2))
    b_lo, b_hi = bound(canonical(A=lo)), bound(canonical(A=hi))
    assert b_hi.log_T_bound <= b_lo.log_T_bound
    if b_lo.branch == PRODUCT:
        assert b_hi.log_T_bound == b_lo.log_T_bound


@pytest.mark.parametrize("A", [100.0, 1.0])
def test_critical_identity_canonical(A):
    assert critical_time_identity(canonical(A=A)) == pytest.approx(1.0, rel=1e-12)


def test_critical_identity_random(rng):
    for _ in range(20):
        P = random_valid_tuple(rng, target_log_T=rng.uniform(4, 30))
        assert critical_time_identity(P) == pytest.approx(1.0, rel=1e-12)


def test_glassey_exponents():
    assert glassey_exponent(3) == 2.0
    assert glassey_exponent(2) == 3.0
    g3 = glassey_bound(3, 0.01)
    assert g3.p == 2.0 and g3.eps_exponent == 1.0
    g2 = glassey_bound(2, 0.01)
    assert g2.p == 3.0 and g2.eps_exponent == 2.0
    with pytest.raises(InputError):
        glassey_bound(1, 0.01)


def test_glassey_halving_eps():
    a = glassey_bound(3, 0.02)
    b = glassey_bound(3, 0.01)
    assert a.lifespan.branch == FORMULA and b.lifespan.branch == FORMULA
    assert b.lifespan.log_T_bound == pytest.approx(2 * a.lifespan.log_T_bound, rel=1e-12)


def test_glassey_eps_scaling_n2():
    a = glassey_bound(2, 0.02)
    b = glassey_bound(2, 0.01)
    assert b.lifespan.log_T_bound == pytest.approx(4 * a.lifespan.log_T_bound, rel=1e-12)
