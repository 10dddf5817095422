import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centroaffine import (BodyValidationError, build_grid, curvature_extrema, evaluate_fields,
                          linear_image, make_ellipsoid, make_fourier, make_sphharm, translate)


def test_ellipsoid_support_on_axes():
    e = make_ellipsoid([2, 1])
    np.testing.assert_allclose(e.support(np.eye(2)), [2, 1])
    np.testing.assert_allclose(make_ellipsoid([1, 1]).support(build_grid(2, 16).nodes), 1.0)


def test_support_is_one_homogeneous():
    b = make_fourier(1.0, [(3, 0.05, 0.0), (4, 0.0, 0.02)])
    v = np.array([[0.3, -0.4], [2.0, 1.0]])
    u = v / np.linalg.norm(v, axis=1)[:, None]
    np.testing.assert_allclose(b.support(v), np.linalg.norm(v, axis=1) * b.support(u), rtol=1e-15)


@pytest.mark.parametrize("axes", [[0, 1], [1, -2], [1, 2, 3, 4]])
def test_bad_ellipsoids(axes):
    with pytest.raises(ValueError):
        make_ellipsoid(axes)


def test_fourier_validation():
    b = make_fourier(1.0, [(3, 0.05, 0.0)])
    g = build_grid(2, 512)
    curv = evaluate_fields(b, g).curvature_function
    # h'' + h = 1 - 8 * 0.05 cos 3 theta
    assert curv.min() == pytest.approx(0.6, abs=1e-12)
    with pytest.raises(BodyValidationError) as exc:
        make_fourier(1.0, [(3, 0.2, 0.0)])
    assert exc.value.quantity == "hess_h_plus_h"
    assert exc.value.value < 0
    assert make_fourier(1.0, []).support(np.array([[0.0, 1.0]]))[0] == 1.0


def test_sphharm_validation():
    make_sphharm(1.0, [(2, 0, 0.05)])
    with pytest.raises(BodyValidationError):
        make_sphharm(1.0, [(2, 0, 0.8)])
    with pytest.raises(ValueError):
        make_sphharm(1.0, [(2, 3, 0.1)])


def test_translate_rejects_origin_outside():
    with pytest.raises(BodyValidationError) as exc:
        translate(make_ellipsoid([1, 1]), [1.5, 0])
    assert exc.value.quantity == "h"


def test_translated_disk_closed_forms(circle512):
    t = translate(make_ellipsoid([1, 1]), [0.3, 0])
    f = evaluate_fields(t, circle512)
    th = np.arctan2(circle512.nodes[:, 1], circle512.nodes[:, 0])
    np.testing.assert_allclose(f.h, 1 + 0.3 * np.cos(th), atol=1e-15)
    np.testing.assert_allclose(f.curvature_function, 1.0, atol=1e-13)
    np.testing.assert_allclose(f.K0, (1 + 0.3 * np.cos(th)) ** -3, rtol=1e-12)
    m, big_m = curvature_extrema(f)
    assert m == pytest.approx(1.3**-3, rel=1e-12)
    assert big_m == pytest.approx(0.7**-3, rel=1e-12)
    assert big_m / m == pytest.approx((1.3 / 0.7) ** 3, rel=1e-12)


def test_sl_image_of_disk():
    b = linear_image(make_ellipsoid([1, 1]), np.diag([2.0, 0.5]))
    f = evaluate_fields(b, build_grid(2, 128))
    np.testing.assert_allclose(f.K0, 1.0, rtol=1e-12)
    np.testing.assert_allclose(b.support(np.eye(2)), [2.0, 0.5])


def test_identity_image_and_rotated_ball(trefoil, circle256):
    a = evaluate_fields(trefoil, circle256)
    b = evaluate_fields(linear_image(trefoil, np.eye(2)), circle256)
    np.testing.assert_allclose(b.K0, a.K0, rtol=1e-14)
    q, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(3, 3)))
    g = build_grid(3, (16, 32))
    ball = evaluate_fields(linear_image(make_ellipsoid([1, 1, 1]), q), g)
    np.testing.assert_allclose(ball.K0, 1.0, atol=1e-13)


def test_singular_matrix_rejected():
    with pytest.raises(ValueError):
        linear_image(make_ellipsoid([1, 1]), [[1, 2], [2, 4]])


def test_ball_fields():
    f = evaluate_fields(make_ellipsoid([1, 1, 1]), build_grid(3, (16, 32)))
    for arr in (f.h, f.curvature_function, f.K0):
        np.testing.assert_allclose(arr, 1.0, atol=1e-14)
    assert curvature_extrema(f) == pytest.approx((1.0, 1.0))


def test_ellipse_K0_constant(ellipse, circle256):
    f = evaluate_fields(ellipse, circle256)
    np.testing.assert_allclose(f.K0, 0.25, atol=1e-12)
    assert curvature_extrema(f) == pytest.approx((0.25, 0.25), abs=1e-12)


@pytest.mark.parametrize("body", [
    make_fourier(1.0, [(3, 0.05, 0.0)]),
    make_fourier(1.0, [(2, 0.03, 0.01), (5, -0.01, 0.02)]),
    make_ellipsoid([2.0, 1.0]),
])
def test_analytic_and_spectral_paths_agree(body):
    g = build_grid(2, 256)
    a = evaluate_fields(body, g, "analytic")
    s = evaluate_fields(body, g, "spectral")
    assert np.max(np.abs(a.K0 - s.K0)) <= 1e-10


@pytest.mark.parametrize("terms", [[(2, 0, 0.05)], [(3, 2, 0.04), (4, -3, -0.03)], [(2, 1, 0.05)]])
def test_sphere_analytic_and_spectral_agree(terms):
    b = make_sphharm(1.0, terms)
    g = build_grid(3, (48, 96))
    a = evaluate_fields(b, g, "analytic")
    s = evaluate_fields(b, g, "spectral")
    assert np.max(np.abs(a.K0 - s.K0)) <= 1e-9


def test_definition_consistency(trefoil, circle256):
    f = evaluate_fields(trefoil, circle256)
    np.testing.assert_allclose(f.K0 * f.h**3, f.gauss_curvature, rtol=1e-14)
    np.testing.assert_allclose(f.cone_density, f.h * f.curvature_function, rtol=1e-15)


def test_boundary_points_lie_on_support_lines(ellipse, circle256):
    f = evaluate_fields(ellipse, circle256)
    x = f.boundary_points
    np.testing.assert_allclose((x[:, 0] / 2) ** 2 + x[:, 1] ** 2, 1.0, atol=1e-13)
    np.testing.assert_allclose(np.einsum("ij,ij->i", x, circle256.nodes), f.h, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0.0, np.pi))
def test_ellipse_K0_is_inverse_area_squared(a, b, angle):
    c, s = np.cos(angle), np.sin(angle)
    body = linear_image(make_ellipsoid([a, b]), [[c, -s], [s, c]])
    f = evaluate_fields(body, build_grid(2, 64))
    np.testing.assert_allclose(f.K0, (a * b) ** -2, rtol=1e-11)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 0.6), st.floats(0.0, 2 * np.pi))
def test_translated_disk_K0(r, ang):
    t = r * np.array([np.cos(ang), np.sin(ang)])
    f = evaluate_fields(translate(make_ellipsoid([1, 1]), t), build_grid(2, 64))
    np.testing.assert_allclose(f.K0, f.h ** -3, rtol=1e-11)
