import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h3mag.geometry import (KillingFieldId, ModelParams, christoffel_numeric,
                            connection_table, coordinate_to_frame, cross, frame_bracket_numeric,
                            frame_to_coordinate, inner, k4_printed_field, killing_field,
                            killing_field_frame, killing_residual, metric_matrix,
                            non_killing_control, volume_form)

lams = st.sampled_from([0.5, 1.0, 2.0, 3.0])
coords = st.floats(-3, 3, allow_nan=False)
points = st.tuples(coords, coords, coords)
vectors = st.tuples(coords, coords, coords)


def test_model_params_rejects_nonpositive():
    for bad in (0.0, -1.0, float("nan"), float("inf")):
        with pytest.raises(ValueError):
            ModelParams(bad)


def test_metric_matrix_examples():
    np.testing.assert_array_equal(metric_matrix(ModelParams(1.0), (0, 0, 0)), np.eye(3))
    np.testing.assert_allclose(metric_matrix(ModelParams(2.0), (1, 5, -3)),
                               [[0.25, 0, 0], [0, 2, 1], [0, 1, 1]])


@given(lams, points)
def test_metric_determinant_is_position_independent(lam, pt):
    g = metric_matrix(ModelParams(lam), pt)
    assert np.linalg.det(g) == pytest.approx(1 / lam ** 2, rel=1e-9)
    np.testing.assert_array_equal(g, g.T)


def test_inner_examples():
    assert inner(ModelParams(2.0), (3, 1, 1), (1, 0, 0), (1, 0, 0)) == pytest.approx(0.25)
    assert inner(ModelParams(1.0), (1, 0, 0), (0, 1, 0), (0, 0, 1)) == pytest.approx(1.0)
    assert inner(ModelParams(1.0), (1, 2, 3), (0, 0, 0), (4, 5, 6)) == 0.0


def test_frame_conversion_examples():
    assert coordinate_to_frame(ModelParams(2.0), (1, 1, 1), (1, 0, 0)) == pytest.approx((0, 0.5, 0))
    assert coordinate_to_frame(ModelParams(1.0), (3, 0, 0), (0, 1, 0)) == pytest.approx((1, 0, 3))
    assert coordinate_to_frame(ModelParams(1.5), (-2, 4, 1), (0, 0, 1)) == pytest.approx((0, 0, 1))
    assert frame_to_coordinate(ModelParams(1.0), (2, 0, 0), (1, 0, 0)) == pytest.approx((0, 1, -2))
    assert frame_to_coordinate(ModelParams(3.0), (0, 0, 0), (0, 1, 0)) == pytest.approx((3, 0, 0))


@given(lams, points, vectors)
def test_frame_round_trip_preserves_norm(lam, pt, v):
    p = ModelParams(lam)
    w = coordinate_to_frame(p, pt, v)
    np.testing.assert_allclose(frame_to_coordinate(p, pt, w), v, atol=1e-9)
    assert inner(p, pt, v, v) == pytest.approx(float(np.dot(w, w)), rel=1e-9, abs=1e-9)


def test_connection_table_entries():
    t = connection_table(ModelParams(1.0))
    np.testing.assert_allclose(t[0, 2], (0, -0.5, 0))
    for lam in (0.5, 2.0):
        np.testing.assert_array_equal(connection_table(ModelParams(lam))[1, 1], (0, 0, 0))


def test_christoffel_symmetric_in_lower_indices():
    gamma = christoffel_numeric(ModelParams(1.3), (0.4, -0.7, 1.1))
    np.testing.assert_allclose(gamma, np.transpose(gamma, (0, 2, 1)), atol=1e-9)


def test_cross_examples():
    assert cross((0, 0, 1), (2, 3, 5)) == pytest.approx((-3, 2, 0))
    assert cross((1, 0, 0), (0, 1, 0)) == pytest.approx((0, 0, 1))
    assert cross((1.5, -2, 4), (1.5, -2, 4)) == pytest.approx((0, 0, 0))


@given(vectors, vectors)
def test_cross_is_antisymmetric_and_orthogonal(u, v):
    w = cross(u, v)
    np.testing.assert_allclose(w, -np.array(cross(v, u)), atol=1e-12)
    assert abs(np.dot(w, u)) < 1e-9 * (1 + np.dot(u, u) * np.dot(v, v) ** 0.5)
    # g(u x v, w) = dvg(u, v, w)
    assert volume_form(u, v, w) == pytest.approx(float(np.dot(w, w)), rel=1e-6, abs=1e-9)


def test_killing_field_examples():
    p1 = ModelParams(1.0)
    assert killing_field(KillingFieldId("K3"), p1, (7, 2, 0)) == pytest.approx((1, 0, -2))
    assert killing_field_frame(KillingFieldId("K2"), p1, (4, 0, 0)) == pytest.approx((1, 0, 4))
    assert killing_field(KillingFieldId("K4"), p1, (1, 1, 0)) == pytest.approx((1, -1, 0))


def test_killing_field_id_validation():
    with pytest.raises(ValueError):
        KillingFieldId("K5")


@settings(max_examples=50, deadline=None)
@given(lams, points, vectors, vectors, st.sampled_from(["K1", "K2", "K3", "K4"]))
def test_coordinate_killing_fields_are_killing(lam, pt, u, v, tag):
    assert abs(killing_residual(ModelParams(lam), KillingFieldId(tag), pt, u, v)) < 1e-6


def test_killing_residual_zero_vectors_exact():
    assert killing_residual(ModelParams(1.0), KillingFieldId("K4"), (1, 2, 3), (0, 0, 0),
                            (0, 0, 0)) == 0.0


def test_printed_k4_frame_and_control_are_not_killing():
    rng = np.random.default_rng(0)
    p = ModelParams(1.0)
    worst_printed = worst_control = 0.0
    for _ in range(20):
        pt, u, v = rng.uniform(-2, 2, (3, 3))
        worst_printed = max(worst_printed, abs(killing_residual(p, k4_printed_field(p), pt, u, v)))
        worst_control = max(worst_control, abs(killing_residual(p, non_killing_control, pt, u, v)))
    assert worst_printed > 1e-2
    assert worst_control > 1e-2


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_frame_brackets(lam):
    p = ModelParams(lam)
    pt = (0.3, -1.2, 0.8)
    np.testing.assert_allclose(frame_bracket_numeric(p, 1, 2, pt), (0, 0, lam), atol=1e-6)
    np.testing.assert_allclose(frame_bracket_numeric(p, 1, 3, pt), (0, 0, 0), atol=1e-6)
    np.testing.assert_allclose(frame_bracket_numeric(p, 2, 3, pt), (0, 0, 0), atol=1e-6)
    assert frame_bracket_numeric(p, 2, 2, pt) == (0, 0, 0)
