import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centroaffine import build_grid, make_ellipsoid, make_fourier, omega_2n
from centroaffine.flowcheck import (FlowStabilityError, backward_horizon, integrate_flow,
                                    stable_dt, variation_check)

DISK = make_ellipsoid([1.0, 1.0])


def test_disk_flow_exact_solution():
    # h' = -1/h on the disk, so h(t) = sqrt(1 - 2t); the rate at t = 0 is -1
    g = build_grid(2, 16)
    tr = integrate_flow(DISK, g, 1e-4, 100)
    assert tr.steps == 100 and tr.valid.all() and not tr.truncated
    np.testing.assert_allclose(tr.h_final, np.sqrt(1 - 2 * 0.01), atol=1e-12)
    assert np.ptp(tr.h_final) < 1e-14
    np.testing.assert_allclose(tr.volumes, np.pi * (1 - 2 * tr.times), rtol=1e-12)
    # 1 - t is only the tangent line
    assert abs(tr.h_final[0] - 0.99) > 1e-5


def test_ellipse_volume_decreases():
    g = build_grid(2, 32)
    e = make_ellipsoid([2.0, 1.0])
    tr = integrate_flow(e, g, 0.5 * stable_dt(g, e.support(g.nodes)), 200)
    assert np.all(np.diff(tr.volumes) < 0)


def test_fourier_regression_run():
    g = build_grid(2, 64)
    tr = integrate_flow(make_fourier(1.0, [(3, 0.05, 0.0)]), g, 1e-5, 100)
    assert tr.steps == 100
    assert tr.valid.all()
    assert np.all(np.diff(tr.volumes) < 0)
    assert len(tr.rows()) == 101


def test_stability_bound_enforced():
    g = build_grid(2, 256)
    body = make_fourier(1.0, [(3, 0.05, 0.0)])
    bound = stable_dt(g, body.support(g.nodes))
    assert bound == pytest.approx(0.1 * 0.95 * 0.6 / 256**2, rel=1e-6)
    with pytest.raises(FlowStabilityError) as exc:
        integrate_flow(body, g, 1e-5, 10)
    assert exc.value.bound == pytest.approx(bound)
    with pytest.raises(ValueError):
        integrate_flow(body, g, bound, -1)
    with pytest.raises(ValueError):
        integrate_flow(make_ellipsoid([1, 1, 1]), build_grid(3, (8, 8)), 1e-6, 1)


def test_flow_truncates_on_collapse():
    # the disk collapses at t = 1/2
    g = build_grid(2, 8)
    dt = stable_dt(g, np.ones(8))
    tr = integrate_flow(DISK, g, dt, int(0.6 / dt))
    assert tr.truncated
    assert "validity lost" in tr.diagnostic
    assert tr.times[-1] <= 0.5 + 1e-12


def test_backward_run_allowed():
    g = build_grid(2, 16)
    tr = integrate_flow(DISK, g, -1e-4, 50)
    np.testing.assert_allclose(tr.h_final, np.sqrt(1 + 2 * 50e-4), atol=1e-12)


def test_variation_disk():
    r = variation_check(DISK, build_grid(2, 64))
    assert abs(r.dV_measured + 2 * np.pi) <= 1e-6
    assert abs(r.d2V_measured) <= 1e-4
    assert r.as_tuple()[1] == pytest.approx(-2 * np.pi)


def test_variation_ellipse():
    r = variation_check(make_ellipsoid([2.0, 1.0]), build_grid(2, 128))
    assert abs(r.dV_measured + 2 * np.pi) <= 1e-5
    assert abs(r.d2V_measured) <= 1e-3


def test_variation_fourier_matches_omega2_with_sign():
    body = make_fourier(1.0, [(3, 0.05, 0.0)])
    g = build_grid(2, 128)
    r = variation_check(body, g)
    om2 = omega_2n(body, build_grid(2, 512))
    # the flow produces V'' = -Omega_{2,2}
    assert abs(r.d2V_measured + om2) <= 1e-3 * om2
    assert r.d2V_sign_corrected == pytest.approx(-r.d2V_predicted)
    assert abs(r.d2V_measured - r.d2V_predicted) > 0.5 * om2
    assert r.halving_ratio == pytest.approx(4.0, rel=0.2)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.0, 0.04), st.floats(0.0, 0.04))
def test_volume_rate_is_minus_omega_n(a3, b4):
    body = make_fourier(1.0, [(3, a3, 0.0), (4, 0.0, b4)])
    r = variation_check(body, build_grid(2, 64))
    assert abs(r.dV_measured - r.dV_predicted) <= 1e-5 * r.omega_n


def test_backward_horizon_scales_with_resolution():
    h16, h64 = np.ones(16), np.ones(64)
    assert backward_horizon(build_grid(2, 16), h16) == pytest.approx(
        16 * backward_horizon(build_grid(2, 64), h64))
