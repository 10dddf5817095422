import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centroaffine import build_grid, linear_image, make_ellipsoid, make_fourier, make_sphharm, translate
from centroaffine.suite import (GOLDEN_RATIO, SuiteConfig, SuiteContext, chain_logs,
                                check_cor_affine_ratio, check_golden_ratio_bound,
                                check_holder_lower, check_isoperimetric_like,
                                check_monotonicity_lemma, check_omega2_bounds,
                                check_omegaK_corollaries, check_paouris_upper, check_prop_two,
                                check_prop_two_identity, check_sequences,
                                check_volume_product_sandwich, center, duality_report,
                                is_centered_ellipsoid, minimize_surface_sl, random_fourier_body,
                                random_sphharm_body, run_suite)

DISK = make_ellipsoid([1.0, 1.0])
BALL = make_ellipsoid([1.0, 1.0, 1.0])
ELLIPSE = make_ellipsoid([2.0, 1.0])
TREFOIL = make_fourier(1.0, [(3, 0.05, 0.0)])
SHIFTED = translate(DISK, [0.3, 0.0])


@pytest.fixture(scope="module")
def ctx_trefoil():
    return SuiteContext.of(TREFOIL)


@pytest.fixture(scope="module")
def ctx_ellipse():
    return SuiteContext.of(ELLIPSE)


def test_holder_lower():
    r = check_holder_lower(DISK)
    assert r.equality and abs(r.slack) <= 1e-12
    r = check_holder_lower(ELLIPSE)
    assert r.lhs[0] == pytest.approx(np.pi**2, rel=1e-12)
    assert r.equality and r.equality_expected
    r = check_holder_lower(SHIFTED)
    assert r.status == "pass" and r.slack > 0.1 and not r.equality


def test_monotonicity_lemma_examples():
    ctx = SuiteContext.of(DISK)
    h = ctx.fields.h
    r = check_monotonicity_lemma(ctx, 2 * h)
    assert r.hypothesis_flags["m"] == pytest.approx(2) and r.hypothesis_flags["M"] == pytest.approx(2)
    assert len(r.relations) == 4 and r.equality
    r = check_monotonicity_lemma(ctx, ELLIPSE.support(ctx.grid.nodes))
    assert r.hypothesis_flags["m"] == pytest.approx(1, abs=1e-12)
    assert r.hypothesis_flags["M"] == pytest.approx(2, abs=1e-12)
    assert r.status == "pass"
    th = np.arctan2(ctx.grid.nodes[:, 1], ctx.grid.nodes[:, 0])
    r = check_monotonicity_lemma(ctx, 1 + 0.3 * np.cos(th))
    assert r.status == "pass" and len(r.relations) == 4


def test_monotonicity_lemma_gates_second_chain():
    ctx = SuiteContext.of(DISK)
    th = np.arctan2(ctx.grid.nodes[:, 1], ctx.grid.nodes[:, 0])
    r = check_monotonicity_lemma(ctx, 1 - 0.5 * np.abs(np.cos(th)))
    assert not r.hypothesis_flags["aleksandrov_regular"]
    assert r.hypothesis_flags["aleksandrov_gap"] > 0.1
    assert len(r.relations) == 2 and len(r.skipped) == 2


def test_omega2_bounds(ctx_trefoil, ctx_ellipse):
    r = check_omega2_bounds(ctx_ellipse)
    assert r.equality and abs(r.lhs[1]) <= 1e-8
    r = check_omega2_bounds(ctx_trefoil)
    assert r.status == "pass" and min(r.gaps) > 0
    assert check_omega2_bounds(SHIFTED).status == "pass"


def test_volume_product_sandwich(ctx_trefoil, ctx_ellipse):
    r = check_volume_product_sandwich(ctx_ellipse)
    np.testing.assert_allclose(r.lhs + r.rhs, np.pi**2, rtol=1e-7)
    r = check_volume_product_sandwich(ctx_trefoil)
    assert r.status == "pass" and min(r.gaps) > 0
    assert r.reported["min_attained_by"] in ("K", "polar")
    ball = check_volume_product_sandwich(SuiteContext.of(BALL, (32, 64)))
    np.testing.assert_allclose(ball.lhs + ball.rhs, (4 * np.pi / 3) ** 2, rtol=1e-9)


def test_golden_ratio_gating():
    r = check_golden_ratio_bound(ELLIPSE)
    assert r.hypothesis_flags["M_over_m"] == pytest.approx(1.0)
    assert r.equality
    r = check_golden_ratio_bound(make_fourier(1.0, [(3, 0.02, 0.0)]))
    assert r.hypothesis_flags["golden_ratio_condition"] and r.status == "pass" and r.slack > 0
    r = check_golden_ratio_bound(SHIFTED)
    assert r.hypothesis_flags["M_over_m"] > GOLDEN_RATIO
    assert r.status == "not_applicable" and r.passed is None


def test_prop_two(ctx_trefoil, ctx_ellipse):
    r = check_prop_two(ctx_ellipse, [2.0])
    assert r.equality
    r = check_prop_two(ctx_trefoil, [0.0])
    assert r.status == "pass" and r.slack > 0
    r = check_prop_two(ctx_trefoil)
    assert len(r.relations) == 6


@pytest.mark.parametrize("body", [TREFOIL, SHIFTED, ELLIPSE, make_sphharm(1.0, [(3, 0, 0.04)])])
def test_prop_two_identity(body):
    r = check_prop_two_identity(body)
    assert r.reported["relative_difference"] <= 1e-12
    assert r.equality


def test_cor_affine_ratio(ctx_trefoil, ctx_ellipse):
    assert check_cor_affine_ratio(ctx_ellipse).equality
    r = check_cor_affine_ratio(ctx_trefoil)
    assert r.status == "pass" and min(r.gaps) > 0
    ball = check_cor_affine_ratio(SuiteContext.of(BALL, (32, 64)))
    assert ball.equality


def test_minimize_surface():
    m = minimize_surface_sl(ELLIPSE)
    assert m.S_min == pytest.approx(2 * np.pi * np.sqrt(2), abs=1e-6)
    assert np.linalg.det(m.T) == pytest.approx(1.0, abs=1e-12)
    t, s = m
    assert s == m.S_min
    m = minimize_surface_sl(DISK)
    np.testing.assert_allclose(m.T, np.eye(2), atol=1e-5)
    m = minimize_surface_sl(center(TREFOIL))
    assert m.S_min <= m.S_identity and m.stationarity < 1e-6


def test_isoperimetric_like():
    r = check_isoperimetric_like(ELLIPSE)
    assert r.equality and r.reported["ball_constant_identity_error"] < 1e-12
    r = check_isoperimetric_like(center(TREFOIL))
    assert r.hypothesis_flags["centered"] and r.status == "pass" and r.slack > 0
    r = check_isoperimetric_like(SHIFTED)
    assert r.status == "not_applicable"


def test_paouris_upper(ctx_trefoil, ctx_ellipse):
    r = check_paouris_upper(ctx_ellipse)
    assert r.lhs[0] == pytest.approx(16.0, rel=1e-8) and r.equality
    assert check_paouris_upper(ctx_trefoil).slack > 0


def test_sequences(ctx_trefoil, ctx_ellipse):
    c17 = np.exp(chain_logs(ctx_ellipse, 17, 8))
    np.testing.assert_allclose(c17, (2 * np.pi) ** 2, rtol=1e-6)
    c15 = np.exp(chain_logs(ctx_trefoil, 15, 6))
    assert np.all(np.diff(c15) < 0)
    assert check_sequences(ctx_trefoil).status == "pass"
    assert check_sequences(ctx_ellipse).equality
    with pytest.raises(ValueError):
        chain_logs(ctx_ellipse, 14, 3)


def test_omegaK_corollaries(ctx_trefoil, ctx_ellipse):
    r = check_omegaK_corollaries(ctx_ellipse)
    assert r.lhs[0] == pytest.approx(4 * np.pi**2, rel=1e-10)
    assert r.equality
    # the form without the 1/n powers gives 16 pi^2 > 4 pi^2 on the ellipse
    assert r.reported["printed_first_lhs"] == pytest.approx(16 * np.pi**2, rel=1e-10)
    assert r.reported["printed_first_min_gap"] < 0
    r = check_omegaK_corollaries(ctx_trefoil)
    assert r.status == "pass" and min(r.gaps) > 0


def test_duality_report():
    rep = duality_report(SuiteContext.of(TREFOIL))
    assert max(rep.values()) < 1e-5


@pytest.mark.parametrize("body, expect", [
    (ELLIPSE, True), (BALL, True), (linear_image(DISK, [[1, 1], [0, 2]]), True),
    (TREFOIL, False), (SHIFTED, False), (translate(ELLIPSE, [0.0, 0.0]), True),
])
def test_is_centered_ellipsoid(body, expect):
    assert is_centered_ellipsoid(body) is expect


def test_run_suite_ellipse_all_equal():
    res = run_suite(ELLIPSE)
    for r in res:
        if r.applicable:
            assert r.status == "pass", r.check_id
            assert r.equality, r.check_id


def test_run_suite_fourier_no_equality():
    res = run_suite(center(TREFOIL))
    ids = {r.check_id: r for r in res}
    assert len(ids) == 12
    for r in res:
        assert r.status in ("pass", "not_applicable"), r.check_id
        if r.applicable and r.check_id != "prop_two_p1":
            assert not r.equality, r.check_id
            assert r.stable
    assert ids["golden_ratio_bound"].status == "not_applicable"


def test_run_suite_tolerance_override():
    res = run_suite(ELLIPSE, SuiteConfig(tol=1e-3))
    assert all(r.tol == (1e-12 if r.check_id == "prop_two_p1" else 1e-3) for r in res)


def test_random_bodies_are_seeded():
    a = random_fourier_body(np.random.default_rng(5))
    b = random_fourier_body(np.random.default_rng(5))
    assert a.descriptor() == b.descriptor()
    s = random_sphharm_body(np.random.default_rng(5))
    assert s.dim == 3


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_slack_is_sl_invariant(seed):
    rng = np.random.default_rng(seed)
    body = random_fourier_body(rng)
    z = rng.normal(scale=0.2, size=2)
    from scipy.linalg import expm
    t = expm(np.array([[z[0], z[1]], [z[1], -z[0]]]))
    a = check_cor_affine_ratio(body)
    b = check_cor_affine_ratio(linear_image(body, t))
    assert b.relative_slack == pytest.approx(a.relative_slack, rel=1e-6)
