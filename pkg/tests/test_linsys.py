import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from iffm.errors import NonPositiveInput, NotHurwitz, NotMetzler, ValidationError
from iffm.linsys import propagate, steady_state, transition, validate


def test_rejects_negative_off_diagonal():
    with pytest.raises(NotMetzler) as err:
        validate([[-1.0, -0.1], [0.0, -1.0]], [1.0, 1.0])
    assert (err.value.i, err.value.j) == (0, 1)


def test_rejects_unstable_and_marginal():
    with pytest.raises(NotHurwitz):
        validate([[0.5]], [1.0])
    with pytest.raises(NotHurwitz):
        validate([[-1e-10]], [1.0])


def test_rejects_nonpositive_input_vector():
    with pytest.raises(NonPositiveInput) as err:
        validate([[-1.0, 0.0], [0.0, -1.0]], [1.0, 0.0])
    assert err.value.index == 1


@pytest.mark.parametrize("A,b", [([[-1.0, 0.0]], [1.0]), ([[-1.0]], [1.0, 2.0]),
                                 ([[float("nan")]], [1.0])])
def test_rejects_malformed_shapes(A, b):
    with pytest.raises(ValidationError):
        validate(A, b)


def test_validated_arrays_are_read_only(sec5):
    with pytest.raises(ValueError):
        sec5.A[0, 0] = 1.0


def test_steady_state_solves_linear_system(sec5):
    x = steady_state(sec5, 2.0)
    np.testing.assert_allclose(sec5.A @ x + sec5.b * 2.0, 0.0, atol=1e-14)
    assert np.all(x > 0)
    np.testing.assert_allclose(sec5.gain() * 2.0, x, rtol=1e-15)


def test_steady_state_needs_positive_input(sec5):
    with pytest.raises(ValidationError):
        steady_state(sec5, 0.0)


def test_propagate_scalar_matches_formula(unit):
    x, p = propagate(unit, 0.5, [2.0], 1.0)
    assert x[0] == pytest.approx(0.5 + 1.5 * np.exp(-1.0), abs=1e-15)
    assert p[0] == pytest.approx(1.0 - np.exp(-1.0), abs=1e-15)


def test_propagate_matches_independent_ode_solve(sec5):
    x0 = np.array([0.5, 0.6, 0.7, 0.8, 0.9])
    u = 1.7
    sol = solve_ivp(lambda t, s: np.concatenate([sec5.A @ s[:5] + sec5.b * u, sec5.A @ s[5:] + sec5.b]),
                    (0, 1.5), np.concatenate([x0, np.zeros(5)]), rtol=1e-13, atol=1e-15,
                    method="DOP853")
    x, p = propagate(sec5, u, x0, 1.5)
    np.testing.assert_allclose(x, sol.y[:5, -1], rtol=1e-11)
    np.testing.assert_allclose(p, sol.y[5:, -1], rtol=1e-11)


def test_propagate_validates_arguments(sec5):
    with pytest.raises(ValidationError):
        propagate(sec5, 1.0, np.zeros(5), -0.1)
    with pytest.raises(ValidationError):
        propagate(sec5, 1.0, np.zeros(4), 0.1)
    with pytest.raises(ValidationError):
        propagate(sec5, 1.0, -np.ones(5), 0.1)


@st.composite
def metzler_hurwitz(draw):
    n = draw(st.integers(1, 4))
    off = draw(st.lists(st.floats(0.0, 1.0), min_size=n * n, max_size=n * n))
    A = np.array(off).reshape(n, n)
    np.fill_diagonal(A, 0.0)
    # strict row diagonal dominance makes A Hurwitz
    A -= np.diag(A.sum(axis=1) + draw(st.floats(0.1, 3.0)))
    b = np.array(draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n)))
    return A, b


@settings(max_examples=40, deadline=None)
@given(metzler_hurwitz(), st.floats(0.0, 3.0))
def test_transition_is_elementwise_nonnegative(sys_ab, t):
    sys = validate(*sys_ab)
    assert np.all(transition(sys, t) >= -1e-14)


@settings(max_examples=40, deadline=None)
@given(metzler_hurwitz(), st.floats(0.01, 2.0), st.floats(0.01, 2.0), st.floats(1e-3, 10.0))
def test_propagation_is_a_semiflow_and_stays_positive(sys_ab, t1, t2, u):
    sys = validate(*sys_ab)
    x0 = np.linspace(0.0, 1.0, sys.n)
    x_mid, _ = propagate(sys, u, x0, t1)
    x_end, _ = propagate(sys, u, x_mid, t2)
    x_direct, p_direct = propagate(sys, u, x0, t1 + t2)
    np.testing.assert_allclose(x_end, x_direct, rtol=1e-10, atol=1e-12)
    assert np.all(x_direct >= 0) and np.all(p_direct >= 0)
