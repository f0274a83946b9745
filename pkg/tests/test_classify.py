import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iffm.classify import (EPS_SIGN, Monotone, PointSummary, Sign, Witness, analyze_sweeps,
                           cdr_monotonicity, combine, combine_signs, dr_monotonicity,
                           sign_profile, summarize_point, theorem1_certificate,
                           theorem2_witness, verdict)
from iffm.integrator import SimConfig, kernel, simulate
from iffm.motifs import make_motif
from iffm.response import STATUS_OK, SweepRecord, SweepResult

from conftest import scalar_init, sec5_init

FAST = SimConfig(n_samples=201)


def _result(d, dr=None, fd=None):
    dr = np.arange(len(d), dtype=float) if dr is None else dr
    fd = d if fd is None else fd
    recs = [SweepRecord(float(10.0 ** i), float(r), 0.0, float(v), float(v), float(f), STATUS_OK)
            for i, (v, r, f) in enumerate(zip(d, dr, fd))]
    return SweepResult("m", "i", recs)


def test_sign_profile_basic():
    assert sign_profile([0.0, 1.0, 2.0]).value is Sign.NONNEGATIVE
    assert sign_profile([0.0, -1.0]).value is Sign.NONPOSITIVE
    assert sign_profile([0.0, 1e-12, -1e-12]).value is Sign.ZERO
    prof = sign_profile([1.0, -0.5, 2.0], t=[0.0, 0.5, 1.0])
    assert prof.value is Sign.MIXED and not prof.fixed
    assert prof.worst_violation == pytest.approx(0.5) and prof.where == 0.5


def test_sign_profile_band_scales_with_running_max():
    # band at an entry is eps (1 + max |v| so far)
    assert sign_profile([1e6, -1e-4]).value is Sign.NONNEGATIVE
    assert sign_profile([-1e-4, 1e6]).value is Sign.MIXED


@settings(max_examples=80)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
def test_sign_profile_is_antisymmetric(values):
    flip = {Sign.NONNEGATIVE: Sign.NONPOSITIVE, Sign.NONPOSITIVE: Sign.NONNEGATIVE,
            Sign.ZERO: Sign.ZERO, Sign.MIXED: Sign.MIXED}
    assert sign_profile([-v for v in values]).value is flip[sign_profile(values).value]


@settings(max_examples=80)
@given(st.lists(st.floats(0.0, 1e3), min_size=1, max_size=40))
def test_nonnegative_samples_never_mixed(values):
    assert sign_profile(values).value in (Sign.NONNEGATIVE, Sign.ZERO)


def test_combine_rules():
    N, I, C = Monotone.NONDECREASING, Monotone.NONINCREASING, Monotone.CONSTANT
    assert combine([N, N]) is N
    assert combine([N, C]) is N
    assert combine([N, I]) is Monotone.INIT_DEPENDENT
    assert combine([N, Monotone.NONMONOTONE]) is Monotone.NONMONOTONE
    assert combine([N, Monotone.INCONCLUSIVE]) is Monotone.INCONCLUSIVE
    assert combine_signs([Sign.ZERO, Sign.NONNEGATIVE]) is Sign.NONNEGATIVE
    assert combine_signs([Sign.NONPOSITIVE, Sign.NONNEGATIVE]) is Sign.MIXED
    assert combine_signs([Sign.ZERO]) is Sign.ZERO


def test_cdr_monotonicity_from_derivative_signs():
    assert cdr_monotonicity(_result([0.3, 0.2, 0.0])) is Monotone.NONDECREASING
    assert cdr_monotonicity(_result([-0.3, -1e-12])) is Monotone.NONINCREASING
    assert cdr_monotonicity(_result([0.3, -0.2])) is Monotone.NONMONOTONE
    # opposite signs without finite-difference agreement cannot be confirmed
    assert cdr_monotonicity(_result([0.3, -0.2], fd=[0.3, 0.1])) is Monotone.INCONCLUSIVE


def test_dr_monotonicity_from_differences():
    assert dr_monotonicity(_result([0, 0, 0], dr=[1.0, 2.0, 3.0])) is Monotone.NONDECREASING
    assert dr_monotonicity(_result([0, 0, 0], dr=[1.0, 2.0, 1.5])) is Monotone.NONMONOTONE
    assert dr_monotonicity(_result([0], dr=[1.0])) is Monotone.INCONCLUSIVE


def test_witness_is_ordered_by_input():
    w = theorem2_witness(_result([-0.1, 0.05, 0.4, -0.3]))
    assert w == Witness(u_minus=100.0, u_plus=1000.0, d_minus=0.4, d_plus=-0.3)
    assert w.u_pos == 100.0 and w.u_neg == 1000.0
    assert theorem2_witness(_result([0.1, -1e-9])) is None
    assert theorem2_witness(_result([0.1, 0.2])) is None


def test_iffm3_kernel_certificate(sec5):
    # a = d u > 0 and lambda > 0; G <= 0 drives the derivative negative
    traj = simulate(sec5, make_motif("iffm-3"), 1.0, sec5_init("iffm-3", 0), FAST)
    cert = theorem1_certificate(traj, kernel(traj))
    assert cert is not None and cert.direction is Monotone.NONINCREASING
    assert str(cert).startswith("Thm1-")
    summary = summarize_point(traj, kernel(traj))
    assert summary.a_sign is Sign.NONNEGATIVE and summary.G_sign is Sign.NONPOSITIVE


def test_analyze_sweeps_requires_summaries():
    with pytest.raises(ValueError):
        analyze_sweeps(make_motif("iffm-1"), [_result([0.1, 0.2])])
    with pytest.raises(ValueError):
        analyze_sweeps(make_motif("iffm-1"), [])


@pytest.mark.parametrize("k,expected", [(1, Monotone.NONINCREASING), (3, Monotone.NONDECREASING),
                                        (5, Monotone.NONDECREASING), (8, Monotone.NONINCREASING)])
def test_scalar_verdicts_on_short_grid(unit, k, expected):
    v = verdict(make_motif(f"scalar-{k}"), unit, [scalar_init(0.5), scalar_init(2.0)], FAST,
                np.logspace(-1, 1, 9))
    assert v.cdr_monotone is expected
    assert all(isinstance(r.detail, PointSummary) for s in v.sweeps for r in s.records)
    assert v.to_dict()["cdr"] == expected.value


def test_iffm4_verdict_has_witness(sec5):
    v = verdict(make_motif("iffm-4"), sec5, [sec5_init("iffm-4", 0)], FAST, np.logspace(-3, 3, 13))
    assert v.cdr_monotone is Monotone.NONMONOTONE
    assert v.witnesses.u_pos < v.witnesses.u_neg
    assert v.per_init[0].witness == v.witnesses


def test_eps_default():
    assert EPS_SIGN == 1e-9
