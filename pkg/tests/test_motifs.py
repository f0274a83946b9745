import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iffm.errors import DomainViolation, ValidationError
from iffm.motifs import (IFFM_SYSTEM, InitialPolicy, a_and_g, canonical_names, f_eval, make_motif,
                         parse_name, partials, y_steady)


def test_named_motif_crosswalk():
    assert IFFM_SYSTEM == {1: 5, 2: 3, 3: 2, 4: 4}
    assert make_motif("iffm-1").system == 5
    assert make_motif("IFFM-3").name == "iffm-3"
    assert make_motif("vec-2").name == "iffm-3"
    assert make_motif("vec-7").name == "vec-7"


def test_unknown_name_suggests_closest():
    with pytest.raises(ValidationError, match="did you mean 'iffm-1'"):
        parse_name("ifm-1")
    with pytest.raises(ValidationError):
        parse_name("scalar-9")


def test_canonical_names_parse():
    for name in canonical_names():
        assert make_motif(name).name in canonical_names()


def test_parameter_validation():
    with pytest.raises(ValidationError):
        make_motif("iffm-2", K=0.0)
    with pytest.raises(ValidationError):
        make_motif("iffm-1", d=-1.0)
    with pytest.raises(ValidationError):
        make_motif("iffm-1", c=(1.0, 0.0, 1.0, 1.0, 1.0))
    assert make_motif("iffm-4", gamma=0.8).gamma == 0.8


# scalar right-hand sides at (x, y, u) = (2, 3, 5), by hand
SCALAR_VALUES = {1: 2 / 5 - 3, 2: 2 - 15, 3: 5 / 2 - 3, 4: 1 / 2 - 3 / 5, 5: 5 - 6,
                 6: 1 - 6 / 5, 7: 1 / 5 - 3 / 2, 8: 1 - 15 / 2}


@pytest.mark.parametrize("k", range(1, 9))
def test_scalar_forms(k):
    assert f_eval(make_motif(f"scalar-{k}"), [2.0], 3.0, 5.0) == pytest.approx(SCALAR_VALUES[k])


def test_vector_forms_at_benchmark_parameters():
    x = np.array([0.1, 0.2, 0.3, 0.4, 0.5])
    z = float(np.dot([0.9, 0.7, 0.8, 0.6, 0.5], x))
    y, u = 0.7, 2.0
    assert f_eval(make_motif("iffm-1"), x, y, u) == pytest.approx(-z * y + 1.2 * u)
    assert f_eval(make_motif("iffm-2"), x, y, u) == pytest.approx(1.5 * u / (0.8 + z) - 1.2 * y)
    assert f_eval(make_motif("iffm-3"), x, y, u) == pytest.approx(z - 1.2 * u * y)
    assert f_eval(make_motif("iffm-4"), x, y, u) == pytest.approx(1 / (0.8 + z) - 1.2 * y / (1.5 * u))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.floats(0.1, 5.0), st.floats(0.0, 5.0), st.floats(0.05, 20.0))
def test_partials_match_finite_differences(k, x, y, u):
    m = make_motif(f"scalar-{k}")
    Fx, Fy, Fu = partials(m, [x], y, u)
    h = 1e-6
    fd_x = (f_eval(m, [x * (1 + h)], y, u) - f_eval(m, [x * (1 - h)], y, u)) / (2 * h * x)
    fd_y = (f_eval(m, [x], y + h, u) - f_eval(m, [x], y - h, u)) / (2 * h)
    fd_u = (f_eval(m, [x], y, u * (1 + h)) - f_eval(m, [x], y, u * (1 - h))) / (2 * h * u)
    for exact, approx in ((Fx[0], fd_x), (Fy, fd_y), (Fu, fd_u)):
        assert exact == pytest.approx(approx, rel=1e-5, abs=1e-6)


def test_a_and_g_definitions():
    m = make_motif("scalar-5")
    a, g = a_and_g(m, [2.0], [0.4], 1.5, 3.0)
    assert a == pytest.approx(2.0)          # a = x
    assert g == pytest.approx(1 - 1.5 * 0.4)  # g = 1 - y p


@pytest.mark.parametrize("k", range(1, 9))
def test_scalar_steady_output_is_one(unit, k):
    assert y_steady(make_motif(f"scalar-{k}"), unit, 2.5) == pytest.approx(1.0)


@pytest.mark.parametrize("name", ["iffm-1", "iffm-2", "iffm-3", "iffm-4"])
def test_steady_output_zeroes_rhs(sec5, name):
    m = make_motif(name)
    u = 0.7
    x_ss = sec5.gain() * u
    assert f_eval(m, x_ss, y_steady(m, sec5, u), u) == pytest.approx(0.0, abs=1e-13)


def test_guard_raises_domain_violation():
    with pytest.raises(DomainViolation):
        f_eval(make_motif("scalar-4"), [0.0], 1.0, 1.0)


def test_initial_policies(sec5):
    m = make_motif("iffm-4")
    x0 = np.array([0.5, 0.6, 0.7, 0.8, 0.9])
    _, y0 = InitialPolicy.explicit(x0, "michaelis").resolve(sec5, m, 3.0)
    assert y0 == pytest.approx(1.5 / (1.2 * (0.8 + np.dot([0.9, 0.7, 0.8, 0.6, 0.5], x0))))
    x_ray, _ = InitialPolicy.steady_ray(2.0, 1.0).resolve(sec5, m, 3.0)
    np.testing.assert_allclose(x_ray, sec5.gain() * 2.0)
    with pytest.raises(ValidationError):
        InitialPolicy.explicit(-x0).resolve(sec5, m, 1.0)
    assert InitialPolicy.explicit(x0, 0.3).to_dict()["y0"] == 0.3
