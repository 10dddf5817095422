import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from centroaffine import (build_grid, centroid, evaluate_fields, linear_image, make_ellipsoid,
                          make_fourier, make_sphharm, mixed_curvature, mixed_input,
                          mixed_integral, polar_body, polar_volume, radial_function,
                          surface_area, translate, volume)
from centroaffine.geometry import aleksandrov_body, aleksandrov_gap, surface_area_image

DISK = make_ellipsoid([1.0, 1.0])
BALL = make_ellipsoid([1.0, 1.0, 1.0])


def ellipse_perimeter(a, b):
    return quad(lambda t: np.hypot(a * np.sin(t), b * np.cos(t)), 0, 2 * np.pi, epsabs=1e-14)[0]


def test_volumes(ellipse, circle256):
    assert volume(evaluate_fields(DISK, circle256)) == pytest.approx(np.pi, rel=1e-15)
    assert abs(volume(evaluate_fields(ellipse, circle256)) - 2 * np.pi) <= 1e-12
    ball = evaluate_fields(BALL, build_grid(3, (64, 128)))
    assert abs(volume(ball) - 4 * np.pi / 3) <= 1e-10
    assert surface_area(ball) == pytest.approx(4 * np.pi, rel=1e-13)


def test_polar_volume(ellipse, circle256):
    assert polar_volume(evaluate_fields(ellipse, circle256)) == pytest.approx(np.pi / 2, rel=1e-14)
    t = evaluate_fields(translate(DISK, [0.3, 0]), circle256)
    assert polar_volume(t) == pytest.approx(np.pi / 0.91**1.5, rel=1e-13)
    assert polar_volume(t) == pytest.approx(3.618993, abs=1e-6)


def test_ellipse_perimeter(ellipse, circle256):
    ref = ellipse_perimeter(2, 1)
    assert ref == pytest.approx(9.688448, abs=1e-6)
    assert abs(surface_area(evaluate_fields(ellipse, circle256)) - ref) <= 1e-10


def test_surface_area_of_image(trefoil, circle256):
    a = np.array([[1.3, 0.4], [-0.2, 0.9]])
    direct = surface_area(evaluate_fields(linear_image(trefoil, a), circle256))
    assert surface_area_image(evaluate_fields(trefoil, circle256), a) == pytest.approx(direct, rel=1e-12)


def test_centroid_of_translate(trefoil, circle256):
    c0 = centroid(evaluate_fields(trefoil, circle256))
    c1 = centroid(evaluate_fields(translate(trefoil, [0.1, -0.2]), circle256))
    np.testing.assert_allclose(c1 - c0, [0.1, -0.2], atol=1e-13)
    np.testing.assert_allclose(centroid(evaluate_fields(DISK, circle256)), 0, atol=1e-15)


def test_mixed_curvature_examples():
    g = build_grid(3, (16, 32))
    ones = np.ones(g.size)
    np.testing.assert_allclose(mixed_curvature(mixed_input(g, ones, ones)), 1.0, atol=1e-13)
    c = build_grid(2, 64)
    th = np.arctan2(c.nodes[:, 1], c.nodes[:, 0])
    s = mixed_curvature(mixed_input(c, np.cos(3 * th)))
    np.testing.assert_allclose(s, -8 * np.cos(3 * th), atol=1e-11)
    with pytest.raises(ValueError):
        mixed_curvature(mixed_input(c, np.cos(th), np.sin(th)))


def test_polarization_identity():
    g = build_grid(3, (16, 32))
    x, y, z = g.nodes.T
    f1 = 1 + 0.1 * x * y + 0.05 * z**3
    f2 = 2 + 0.2 * x**2 - 0.1 * y * z
    a = mixed_input(g, f1, f1).matrices()[0]
    b = mixed_input(g, f2, f2).matrices()[0]
    det = np.linalg.det
    lhs = det(a + b) - det(a) - det(b)
    np.testing.assert_allclose(lhs, 2 * mixed_curvature(mixed_input(g, f1, f2)), atol=1e-12)


def test_mixed_integrals(ellipse, circle256):
    hd = DISK.support(circle256.nodes)
    he = ellipse.support(circle256.nodes)
    # the second-derivative matrix carries round-off of order N^2 eps
    assert mixed_integral(hd, mixed_input(circle256, hd)) == pytest.approx(np.pi, rel=1e-11)
    assert mixed_integral(he, mixed_input(circle256, he)) == pytest.approx(2 * np.pi, rel=1e-11)
    ref = 0.5 * quad(lambda t: np.sqrt(4 * np.cos(t) ** 2 + np.sin(t) ** 2), 0, 2 * np.pi,
                     epsabs=1e-14)[0]
    assert mixed_integral(he, mixed_input(circle256, hd)) == pytest.approx(ref, abs=1e-10)
    with pytest.raises(ValueError):
        mixed_integral(he[:-1], mixed_input(circle256, hd))


def test_polar_of_ellipse(ellipse):
    p = polar_body(ellipse)
    np.testing.assert_allclose(p.support(np.eye(2)), [0.5, 1.0], atol=1e-10)
    assert p.family == "polar_numeric"


def test_polar_of_ball():
    p = polar_body(BALL)
    g = build_grid(3, (12, 24))
    np.testing.assert_allclose(p.support(g.nodes), 1.0, atol=1e-12)


def test_double_polar(trefoil, circle256):
    pp = polar_body(polar_body(trefoil))
    a = evaluate_fields(trefoil, circle256)
    b = evaluate_fields(pp, circle256)
    assert np.max(np.abs(a.h - b.h)) <= 1e-8
    assert np.max(np.abs(a.K0 - b.K0)) <= 1e-8


def test_polar_sphharm_matches_radial():
    b = make_sphharm(1.0, [(3, 1, 0.04)])
    g = build_grid(3, (10, 20))
    hp = polar_body(b).support(g.nodes)
    np.testing.assert_allclose(hp * radial_function(b, g.nodes), 1.0, atol=1e-10)


def test_radial_function(ellipse):
    assert radial_function(DISK, [0.6, 0.8]) == pytest.approx(1.0, abs=1e-12)
    assert radial_function(ellipse, [1, 0]) == pytest.approx(2.0, abs=1e-12)
    assert radial_function(ellipse, np.array([1, 1]) / np.sqrt(2)) == pytest.approx(
        np.sqrt(2 / 1.25), abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 2 * np.pi))
def test_radial_times_polar_support_is_one(ang):
    b = make_fourier(1.0, [(3, 0.05, 0.0), (2, 0.0, 0.03)])
    v = np.array([[np.cos(ang), np.sin(ang)]])
    assert radial_function(b, v) * polar_body(b).support(v)[0] == pytest.approx(1.0, abs=1e-11)


def test_aleksandrov_of_support_function(ellipse, circle256):
    f = ellipse.support(circle256.nodes)
    a = aleksandrov_body(f, circle256)
    assert a.family == "polygonal2d"
    assert np.max(np.abs(a.support(circle256.nodes) - f)) <= 1e-10
    np.testing.assert_allclose(aleksandrov_body(np.full(circle256.size, 2.5), circle256)
                               .support(circle256.nodes), 2.5, atol=1e-12)


def test_aleksandrov_drops_non_support_values(circle256):
    th = np.arctan2(circle256.nodes[:, 1], circle256.nodes[:, 0])
    f = 1 - 0.5 * np.abs(np.cos(th))
    h = aleksandrov_body(f, circle256).support(circle256.nodes)
    assert np.all(h <= f + 1e-12)
    assert np.max(f - h) > 0.1
    assert aleksandrov_gap(f, circle256) == pytest.approx(np.max(f - h))
    # 1 + 0.5|cos| is the support function of a lens-capped body, so nothing drops
    assert aleksandrov_gap(1 + 0.5 * np.abs(np.cos(th)), circle256) < 1e-12


def test_aleksandrov_rejects_bad_input(circle256, sphere):
    with pytest.raises(ValueError):
        aleksandrov_body(-np.ones(circle256.size), circle256)
    with pytest.raises(ValueError):
        aleksandrov_body(np.ones(sphere.size), sphere)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.5, 2.0), st.floats(-0.5, 0.5))
def test_volume_product_of_ellipses_is_pi_squared(a, b, shear):
    body = linear_image(make_ellipsoid([a, b]), [[1.0, shear], [0.0, 1.0]])
    f = evaluate_fields(body, build_grid(2, 256))
    assert volume(f) * polar_volume(f) == pytest.approx(np.pi**2, rel=1e-10)
