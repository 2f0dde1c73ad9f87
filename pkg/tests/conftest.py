import math

import numpy as np
import pytest

from slicelife.exponents import ProblemParams, canonical, log_constant_D


def random_valid_tuple(rng, need_positive_theta=True, target_log_T=None):
    """Draw an admissible exponent tuple.

    With ``target_log_T`` the amplitude is chosen so that the formula branch
    equals that value of log T.
    """
    while True:
        p = rng.uniform(1.2, 3.0)
        a = rng.uniform(-1.0, 1.0)
        x = rng.uniform(-3.0, 2.0)
        b = max(0.0, x / (p - 1.0)) + rng.uniform(0.0, 1.0)
        c = rng.uniform(0.0, 2.0)
        z = max(-1.0 - c * p, c - 1.0 - c * p) + rng.uniform(0.05, 1.5)
        params = ProblemParams(
            a=a, b=b, c=c, x=x, y=-1.0 - p * a, z=z, p=p,
            A=1.0, B=rng.uniform(0.5, 2.0), R=rng.uniform(1.5, 3.0),
        )
        if need_positive_theta and not params.theta > 0.05:
            continue
        if target_log_T is not None:
            log_A = log_constant_D(params) - params.theta / (p - 1.0) * math.log(target_log_T)
            params = params.replace(A=math.exp(log_A))
        return params


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def canon():
    return canonical(p=2.0, A=100.0, B=1.0, R=2.0)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.VERDICTS:
            terminalreporter.write_line(line)
