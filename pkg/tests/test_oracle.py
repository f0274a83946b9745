import math

import numpy as np
import pytest

from iffm.errors import ValidationError
from iffm.integrator import SimConfig, kernel, simulate
from iffm.motifs import make_motif
from iffm.oracle import (OracleReport, closed_form_report, constant_rate_kernel_report,
                         fd_sensitivity, identity_report, kernel_quadrature_report,
                         lambda_by_quadrature, q_terminal_report, richardson_dcdr,
                         richardson_report, scalar_closed_form_gap)

from conftest import scalar_init, sec5_init


def test_report_gaps():
    r = OracleReport("x", 1.0 + 1e-6, 1.0, 1e-5)
    assert r.abs_gap == pytest.approx(1e-6) and r.rel_gap == pytest.approx(1e-6)
    assert r.passed
    assert not OracleReport("x", 2.0, 1.0, 0.5).passed
    assert OracleReport("x", 1e-3, 0.0, 1e-2, relative=False).passed
    nan = OracleReport("x", float("nan"), 1.0, 1.0)
    assert not nan.passed
    d = r.to_dict()
    assert d["name"] == "x" and d["passed"] is True


def test_fd_sensitivity_matches_q(sec5):
    init = sec5_init("iffm-1", 1)
    traj = simulate(sec5, make_motif("iffm-1"), 2.0, init)
    fd = fd_sensitivity(sec5, make_motif("iffm-1"), 2.0, init)
    np.testing.assert_allclose(fd, traj.q, rtol=1e-5, atol=1e-9)
    with pytest.raises(ValidationError):
        fd_sensitivity(sec5, make_motif("iffm-1"), 1.0, init, h=2.0)


def test_richardson_matches_reference(sec5):
    d = richardson_dcdr(sec5, make_motif("iffm-3"), 1.0, sec5_init("iffm-3", 0))
    assert d == pytest.approx(-0.2701720141371859, rel=1e-7)


def test_lambda_by_quadrature(sec5):
    traj = simulate(sec5, make_motif("iffm-3"), 2.0, sec5_init("iffm-3", 0))
    a = 1.2 * 2.0
    assert lambda_by_quadrature(traj, 0.5) == pytest.approx((1 - math.exp(-a)) / a, abs=1e-10)
    assert lambda_by_quadrature(traj, 1.5) == 0.0
    with pytest.raises(ValidationError):
        lambda_by_quadrature(traj, 2.0)


def test_closed_form_gap_small(unit):
    traj = simulate(unit, make_motif("scalar-6"), 10.0, scalar_init(0.5))
    assert scalar_closed_form_gap(traj) < 1e-9
    assert closed_form_report(traj).passed


@pytest.mark.parametrize("name", ["iffm-1", "iffm-2", "iffm-3", "iffm-4"])
def test_report_builders_pass_on_benchmark(sec5, name):
    motif, init = make_motif(name), sec5_init(name, 0)
    traj = simulate(sec5, motif, 1.0, init)
    reports = [q_terminal_report(sec5, motif, 1.0, init), identity_report(traj),
               kernel_quadrature_report(traj, 0.3), richardson_report(sec5, motif, 1.0, init)]
    if name == "iffm-3":
        reports.append(constant_rate_kernel_report(traj, 1.2, 0.7))
    for r in reports:
        assert r.passed, r.to_dict()


def test_reports_detect_mismatch(sec5):
    traj = simulate(sec5, make_motif("iffm-2"), 1.0, sec5_init("iffm-2", 0))
    # the wrong rate gives a different kernel
    assert not constant_rate_kernel_report(traj, 5.0, 0.0).passed
