import json
import math

import numpy as np
import pytest

from iffm.errors import ValidationError
from iffm.integrator import SimConfig, simulate
from iffm.motifs import make_motif
from iffm.response import (STATUS_DOMAIN, STATUS_OK, SweepRecord, SweepResult, dose_response,
                           log_grid, sweep, sweep_many, sweep_point)

from conftest import scalar_init, sec5_init

FAST = SimConfig(n_samples=201)


def test_log_grid_default():
    g = log_grid()
    assert g.size == 121 and g[0] == pytest.approx(1e-3) and g[-1] == pytest.approx(1e3)
    assert g[60] == pytest.approx(1.0)
    assert np.allclose(np.diff(np.log10(g)), 0.05)
    with pytest.raises(ValidationError):
        log_grid(1.0, 0.5)


def test_dose_response_reads_final_values(sec5):
    traj = simulate(sec5, make_motif("iffm-2"), 1.0, sec5_init("iffm-2", 0), FAST)
    dr, cdr = dose_response(traj)
    assert dr == pytest.approx(0.7816262126209785, rel=1e-8)
    assert cdr == pytest.approx(1.7181103346001847, rel=1e-8)


@pytest.mark.parametrize("name", ["iffm-1", "iffm-2", "iffm-3", "iffm-4"])
def test_three_derivative_estimates_agree(sec5, name):
    res = sweep(sec5, make_motif(name), sec5_init(name, 1), FAST, [0.05, 0.8, 12.0])
    assert res.all_ok
    assert res.identity_gap() < 1e-7
    assert res.fd_gap() < 1e-5


def test_fd_uses_fixed_initial_output(sec5):
    # adapted y0 depends on u; the FD runs must reuse the nominal one
    rec = sweep_point(sec5, make_motif("iffm-1"), sec5_init("iffm-1", 0), FAST, 1.0)
    assert rec.d_cdr_fd == pytest.approx(0.22530193072859786, rel=1e-6)


def test_domain_violation_is_recorded_not_raised(unit):
    res = sweep(unit, make_motif("scalar-4"), scalar_init(0.0), FAST, [0.5, 1.0])
    assert [r.status for r in res.records] == [STATUS_DOMAIN, STATUS_DOMAIN]
    assert len(res.failures()) == 2 and not res.all_ok
    assert math.isnan(res.records[0].DR)
    assert math.isnan(res.identity_gap())


def test_grid_validation(sec5):
    motif, init = make_motif("iffm-2"), sec5_init("iffm-2", 0)
    for bad in ([], [1.0, 0.5], [0.0, 1.0]):
        with pytest.raises(ValidationError):
            sweep(sec5, motif, init, FAST, bad)


def test_small_inputs_warn_for_inverse_square_kinds(sec5):
    with pytest.warns(UserWarning, match="1/u"):
        sweep(sec5, make_motif("iffm-4"), sec5_init("iffm-4", 0), FAST, [5e-4])


def test_parallel_sweep_matches_serial(sec5):
    cases = [(sec5, make_motif(n), sec5_init(n, 0)) for n in ("iffm-1", "iffm-4")]
    grid = [0.1, 1.0, 10.0]
    serial = sweep_many(cases, FAST, grid, jobs=1)
    parallel = sweep_many(cases, FAST, grid, jobs=3)
    for a, b in zip(serial, parallel):
        assert (a.motif, a.init) == (b.motif, b.init)
        assert a.rows() == b.rows()


def test_sweep_result_accessors():
    nan = float("nan")
    recs = [SweepRecord(1.0, 0.5, 1.0, 0.2, 0.2, 0.2, STATUS_OK),
            SweepRecord(2.0, nan, nan, nan, nan, nan, STATUS_DOMAIN),
            SweepRecord(3.0, 0.6, 1.1, -0.1, -0.1 + 1e-9, -0.1, STATUS_OK)]
    res = SweepResult("iffm-1", "x0-1", recs)
    assert res.u_grid.tolist() == [1.0, 2.0, 3.0]
    assert res.column("DR", ok_only=True).tolist() == [0.5, 0.6]
    assert res.identity_gap() == pytest.approx(1e-9 / 1.1)
    assert res.fd_gap() == 0.0
    data = json.loads(res.dumps())
    assert data["columns"] == list(SweepResult.COLUMNS)
    assert data["rows"][1][-1] == STATUS_DOMAIN
