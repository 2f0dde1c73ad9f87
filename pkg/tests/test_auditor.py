import math
from dataclasses import replace

import numpy as np
import pytest

from slicelife.auditor import (
    audit,
    check_first_inequality,
    check_frame_dominates,
    check_iteration_step,
    default_sample_times,
)
from slicelife.errors import InputError
from slicelife.exponents import canonical
from slicelife.frames import IndexMode, advance, initial_frame, iterate_frames, with_log_amplitude
from slicelife.volterra import SolveSpec, solve


@pytest.fixture(scope="module")
def sol100():
    return solve(canonical(A=100.0))


def test_first_inequality_no_feedback():
    P = canonical(B=0.0)
    sol = solve(P, SolveSpec(horizon=2.0, cap=1e12), check=False)
    rep = check_first_inequality(sol, P)
    assert rep.passed and rep.worst_margin == 0.0
    assert np.all(rep.margins == 0.0)


def test_first_inequality_canonical(sol100):
    rep = check_first_inequality(sol100)
    assert rep.passed and rep.worst_margin >= 0.0


def test_first_inequality_corrupted(sol100):
    H = sol100.H.copy()
    H[500] *= 0.5
    rep = check_first_inequality(replace(sol100, H=H))
    assert not rep.passed and rep.violations == [500]


def test_frame0_matches_first_inequality(sol100):
    rep = check_frame_dominates(sol100, initial_frame(sol100.params))
    assert rep.passed
    assert rep.worst_margin >= -1e-12


@pytest.mark.parametrize("mode", [IndexMode.AS_PRINTED, IndexMode.STRICT])
def test_frames_dominated(sol100, mode):
    for fr in iterate_frames(sol100.params, 4, mode)[1:]:
        rep = check_frame_dominates(sol100, fr, 1e-6)
        assert rep.passed, rep


def test_strict_frames_reach_more_nodes(sol100):
    printed = iterate_frames(sol100.params, 4, IndexMode.AS_PRINTED)
    strict = iterate_frames(sol100.params, 4, IndexMode.STRICT)
    n_p = [check_frame_dominates(sol100, f).checked for f in printed]
    n_s = [check_frame_dominates(sol100, f).checked for f in strict]
    assert all(s >= p for s, p in zip(n_s, n_p))
    assert all(n > 0 for n in n_s)


def test_trivially_dominated(sol100):
    fr = with_log_amplitude(initial_frame(sol100.params), -1e6)
    rep = check_frame_dominates(sol100, fr)
    assert rep.passed and rep.checked == 0 and rep.trivial > 0


def test_mode_mismatch(sol100):
    fr = initial_frame(sol100.params, IndexMode.STRICT)
    with pytest.raises(InputError):
        check_frame_dominates(sol100, fr, mode=IndexMode.AS_PRINTED)
    other = initial_frame(canonical(A=200.0))
    with pytest.raises(InputError):
        check_frame_dominates(sol100, other)


def test_step_at_boundary():
    P = canonical()
    f0 = initial_frame(P)
    f1 = advance(f0, P)
    rep = check_iteration_step(f0, P, [f1.slice_radius])
    assert rep.passed and rep.margins[0] == math.inf


def test_step_j0_named_samples():
    P = canonical()
    f0 = initial_frame(P)
    r1 = advance(f0, P).slice_radius
    rep = check_iteration_step(f0, P, [1.1 * r1, 2 * r1, 5 * r1])
    assert rep.passed
    assert np.all(rep.margins > 0)


def test_step_modes():
    P = canonical()
    ts = np.geomspace(3.5, 12.0, 10)
    counts = {}
    for mode in IndexMode:
        f0 = initial_frame(P, mode)
        rep = check_iteration_step(f0, P, ts)
        assert rep.passed
        counts[mode] = int(np.sum(ts > advance(f0, P).slice_radius))
    assert counts[IndexMode.STRICT] > counts[IndexMode.AS_PRINTED]


def test_step_cap():
    P = canonical()
    fr = iterate_frames(P, 7)[-1]
    with pytest.raises(InputError):
        check_iteration_step(fr, P)


def test_default_samples():
    P = canonical()
    f1 = advance(initial_frame(P), P)
    ts = default_sample_times(f1, 20)
    assert len(ts) == 20 and ts[0] == pytest.approx(1.01 * f1.slice_radius)


def test_audit_battery(sol100):
    reports = audit(sol100, sol100.params)
    assert len(reports) == 1 + 5 + 4
    assert all(r.passed for r in reports)
    again = audit(sol100, sol100.params)
    assert [r.row() for r in reports] == [r.row() for r in again]
