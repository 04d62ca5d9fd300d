import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h3mag import printed
from h3mag.dynamics import (State, SystemKind, covariant_accel_frame, first_integral,
                            lorentz_force, lorentz_rhs, speed_squared, state_derivative)
from h3mag.geometry import ModelParams, christoffel_numeric, coordinate_to_frame

lams = st.sampled_from([0.5, 1.0, 2.0])
vals = st.floats(-2, 2, allow_nan=False)
states = st.tuples(vals, vals, vals, vals, vals, vals)
systems = st.sampled_from(["geodesic", "k1", "k2", "k3", "k4"])


def levi_civita_accel(p, s, acc):
    """nabla_t t from numeric Christoffel symbols, in frame components."""
    pos, vel = np.array(s[:3]), np.array(s[3:6])
    gamma = christoffel_numeric(p, pos)
    return coordinate_to_frame(p, pos, np.asarray(acc) + np.einsum("kij,i,j->k", gamma, vel, vel))


def test_covariant_accel_example():
    p = ModelParams(1.0)
    s = State(1.0, 0.0, 0.0, 1.0, 2.0, 3.0)
    got = covariant_accel_frame(p, s, 0.0, 0.0, 0.0)
    # the Christoffel computation decides the e2 sign
    oracle = levi_civita_accel(p, s, (0, 0, 0))
    np.testing.assert_allclose(oracle, (5, -10, 2), atol=1e-7)
    np.testing.assert_allclose(got, oracle, atol=1e-7)
    # the published expansion carries the opposite e2 sign
    j = (1.0, 0.0, 0.0, 1.0, 2.0, 3.0, 0.0, 0.0, 0.0)
    assert printed.covariant_accel(1.0, j) == pytest.approx((5, 10, 2))


def test_covariant_accel_zero():
    assert covariant_accel_frame(ModelParams(2.0), State(1, 2, 3, 0, 0, 0), 0, 0, 0) == (0, 0, 0)


@settings(max_examples=40, deadline=None)
@given(lams, states, st.tuples(vals, vals, vals))
def test_covariant_accel_matches_christoffel(lam, s, acc):
    p = ModelParams(lam)
    np.testing.assert_allclose(covariant_accel_frame(p, s, *acc),
                               levi_civita_accel(p, s, acc), atol=1e-6)


@given(lams, states, systems)
def test_rhs_solves_lorentz_equation(lam, s, name):
    p, sys_kind = ModelParams(lam), SystemKind.parse(name)
    acc = lorentz_rhs(p, sys_kind, s)
    np.testing.assert_allclose(covariant_accel_frame(p, s, *acc),
                               lorentz_force(p, sys_kind, s), atol=1e-9)


def test_geodesic_at_rest():
    assert lorentz_rhs(ModelParams(1.0), SystemKind.geodesic(), State(1, 2, 3, 0, 0, 0)) == (0, 0, 0)


@given(lams, states, systems)
def test_speed_and_first_integral_are_conserved_to_first_order(lam, s, name):
    p, sys_kind = ModelParams(lam), SystemKind.parse(name)
    ds = state_derivative(p, sys_kind, s)
    h = 1e-6
    s = np.array(s)
    for f in (lambda q: speed_squared(p, q), lambda q: first_integral(p, sys_kind, q)):
        rate = (f(s + h * ds) - f(s - h * ds)) / (2 * h)
        assert abs(rate) < 1e-6 * (1 + np.abs(ds).max() ** 2)


def test_speed_squared_examples():
    assert speed_squared(ModelParams(1.0), State(3, 3, 3, 0, 0, 0)) == 0
    assert speed_squared(ModelParams(1.0), State(0, 0, 0, 1, 1, 0)) == pytest.approx(2)


def test_first_integral_examples():
    p = ModelParams(1.0)
    assert first_integral(p, SystemKind.parse("k4"), State(1, 1, 0, 0, 0, 0)) == pytest.approx(1)
    assert first_integral(p, SystemKind.geodesic(), State(1, 2, 3, 0, 0, 0)) == 0
    for lam in (0.5, 2.0):
        for c0 in (-1.3, 0.0, 2.5):
            x = lam * c0
            s = State(x, 0.0, 0.0, 0.0, 0.0, 2 * c0)
            assert first_integral(ModelParams(lam), SystemKind.parse("k2"), s) == pytest.approx(c0)


def test_first_integral_rejects_scaled_field():
    with pytest.raises(ValueError):
        first_integral(ModelParams(1.0), SystemKind.magnetic("K1", 2.0), State(0, 0, 0, 1, 0, 0))


def test_system_kind_parse():
    assert SystemKind.parse("Geodesic").is_geodesic
    assert SystemKind.parse("k3").code == 3
    assert SystemKind.magnetic("K2", 0.5).name == "k2*0.5"
    with pytest.raises(ValueError):
        SystemKind.parse("k9")


@given(lams, st.tuples(*[vals] * 9))
def test_published_k2_system_differs_only_in_e2_sign(lam, j):
    pub = printed.system_k2(lam, j)
    lc = printed.LC_SYSTEMS["K2"](lam, j)
    w = j[5] + j[0] * j[4]
    assert pub[0] == pytest.approx(lc[0], abs=1e-9)
    assert pub[2] == pytest.approx(lc[2], abs=1e-9)
    assert pub[1] - lc[1] == pytest.approx(2 * lam * j[4] * w, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(lams, states, st.sampled_from(["geodesic", "K1", "K2", "K3", "K4"]))
def test_levi_civita_transcriptions_vanish_on_solutions(lam, s, tag):
    p = ModelParams(lam)
    acc = lorentz_rhs(p, SystemKind.parse(tag), s)
    j = tuple(s) + tuple(acc)
    assert max(abs(v) for v in printed.LC_SYSTEMS[tag](lam, j)) < 1e-9 * (1 + max(map(abs, j)) ** 3)
