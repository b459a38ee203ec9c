import math

import numpy as np
import pytest

from horocurv.errors import ConfigError, RadiusTooSmall
from horocurv.geodesics import geodesic_span
from horocurv.jacobi import (
    asymptotic_curvature,
    circle_curvature,
    circle_curvature_profile,
    curvature_gap,
    hs_solution,
    jacobi_bvp,
    jacobi_ivp,
    limit_solution,
    riccati_residual,
)
from horocurv.surfaces import random_unit_tangent, unit_tangent


def test_ivp_constant_solution(flat):
    v = unit_tangent(flat, (0, 0), (1, 0))
    path = geodesic_span(flat, v, -2.0, 2.0)
    sol = jacobi_ivp(flat, path, 1.0, 0.0)
    assert np.max(np.abs(sol.h - 1.0)) < 1e-12
    assert np.max(np.abs(sol.dh)) < 1e-12


def test_ivp_sinh(hyp):
    v = unit_tangent(hyp, (0, 0), (1, 0))
    path = geodesic_span(hyp, v, 0.0, 5.0)
    sol = jacobi_ivp(hyp, path, 0.0, 1.0)
    r = sol.path.r[1:]
    rel = np.max(np.abs(sol.h[1:] - np.sinh(r)) / np.sinh(r))
    assert rel < 1e-8
    assert sol.residual_max() <= max(1e-6, 10 * path.step**2)


def test_ivp_exponential(hyp2):
    # K = -4 with h(0) = 1, h'(0) = 2 gives exactly exp(2r)
    v = unit_tangent(hyp2, (0, 0), (1, 0))
    path = geodesic_span(hyp2, v, 0.0, 3.0)
    sol = jacobi_ivp(hyp2, path, 1.0, 2.0)
    rel = np.max(np.abs(sol.h - np.exp(2.0 * sol.path.r)) / np.exp(2.0 * sol.path.r))
    assert rel < 1e-8


def test_ivp_negative_range(bump):
    rng = np.random.default_rng(0)
    v = random_unit_tangent(bump, rng, box=1.0)
    path = geodesic_span(bump, v, -2.0, 2.0)
    sol = jacobi_ivp(bump, path, 1.0, -0.3)
    assert abs(sol.at(0.0) - 1.0) < 1e-12
    assert sol.residual_max() <= max(1e-6, 10 * path.step**2)


def test_circle_curvature_closed_forms(flat, hyp, hyp2):
    assert abs(circle_curvature(flat, (0, 0), (1, 0), 2.0) - 0.5) < 1e-12
    got = circle_curvature(hyp, (0.3, 0.4), (0.6, 1.0), 1.0)
    assert abs(got - 1.0 / math.tanh(1.0)) < 1e-10
    got = circle_curvature(hyp2, (0, 0), (1, 0), 1.0)
    assert abs(got - 2.0 / math.tanh(2.0)) < 1e-10


def test_circle_curvature_small_radius_guard(flat):
    with pytest.raises(RadiusTooSmall):
        circle_curvature(flat, (0, 0), (1, 0), 5e-4)


def test_hs_closed_forms(flat, hyp):
    v = unit_tangent(flat, (0, 0), (1, 0))
    sol = hs_solution(flat, v, 2.0)
    assert np.max(np.abs(sol.h - (1.0 + sol.path.r / 2.0))) < 1e-12

    v = unit_tangent(hyp, (0, 0), (1, 0))
    sol = hs_solution(hyp, v, 2.0)
    exact = np.sinh(sol.path.r + 2.0) / math.sinh(2.0)
    assert np.max(np.abs(sol.h - exact)) < 1e-8
    assert sol.h[0] == 0.0 and sol.h[-1] == 1.0


def test_limit_solution_bounds(flat, hyp, bump):
    # the bounded solution satisfies 0 < h <= 1 behind the base point and
    # carries the curvature at infinity as its derivative at 0
    rng = np.random.default_rng(9)
    for surf in (flat, hyp, bump):
        v = random_unit_tangent(surf, rng)
        sol = limit_solution(surf, v, -4.0, 32.0)
        assert sol.kind[0] == "limit_hinf"
        behind = sol.path.r < 0
        assert np.all(sol.h[behind] > 0.0)
        assert np.all(sol.h[behind] <= 1.0 + 1e-12)
        k_from_limit = sol.dh[-1]
        k_direct = asymptotic_curvature(surf, v, 32.0).value
        assert k_from_limit == pytest.approx(k_direct, abs=1e-9)
    v = unit_tangent(hyp, (0, 0), (1, 0))
    with pytest.raises(ConfigError):
        limit_solution(hyp, v, -4.0, 8.0)


def test_hs_convexity_bound(flat, hyp, bump):
    rng = np.random.default_rng(1)
    for surf in (flat, hyp, bump):
        v = random_unit_tangent(surf, rng)
        sol = hs_solution(surf, v, 3.0)
        hi = 1.0 + sol.path.r / 3.0
        assert np.all(sol.h >= -1e-9)
        assert np.all(sol.h <= hi + 1e-9)


def test_asymptotic_closed_forms(flat, hyp, hyp2):
    v = unit_tangent(flat, (0.5, -1.0), (0.8, 0.6))
    ac = asymptotic_curvature(flat, v, 100.0)
    assert abs(ac.value - 0.01) < 1e-9
    assert ac.guaranteed_upper_gap == pytest.approx(0.01)

    v = unit_tangent(hyp, (0, 0), (1, 0))
    ac = asymptotic_curvature(hyp, v, 20.0)
    assert abs(ac.value - 1.0) < 1e-9
    # with a center at finite distance the value overestimates the invariant
    ac5 = asymptotic_curvature(hyp, v, 5.0)
    assert 0.0 < ac5.value - 1.0 <= 1.0 / 5.0
    assert abs(ac5.value - 1.0 / math.tanh(5.0)) < 1e-10

    v = unit_tangent(hyp2, (0, 0), (0, 1))
    assert abs(asymptotic_curvature(hyp2, v, 10.0).value - 2.0) < 1e-9


def test_asymptotic_history_monotone(hyp, bump):
    rng = np.random.default_rng(2)
    for surf in (hyp, bump):
        v = random_unit_tangent(surf, rng)
        ac = asymptotic_curvature(surf, v, 16.0)
        ks = [k for _, k in ac.convergence_history]
        assert ks[0] >= ks[1] >= ks[2] >= ac.value - 1e-12
        assert all(k > ac.value - 1e-12 for k in ks)


def test_richardson_flat_is_exact(flat):
    v = unit_tangent(flat, (0, 0), (1, 0))
    ac = asymptotic_curvature(flat, v, 50.0, richardson=True)
    assert abs(ac.richardson) < 1e-12  # gap is exactly c/s on flat
    assert ac.value == pytest.approx(0.02)


def test_asymptotic_nonnegative_and_continuous(flat, hyp, hyp2, bump):
    rng = np.random.default_rng(3)
    for surf in (flat, hyp, hyp2, bump):
        for _ in range(12):
            v = random_unit_tangent(surf, rng)
            ac = asymptotic_curvature(surf, v, 15.0)
            assert ac.value >= -1e-9
    for surf in (hyp, bump):
        v = random_unit_tangent(surf, rng)
        base = asymptotic_curvature(surf, v, 15.0).value
        from horocurv.surfaces import Tangent2, norm_g

        p = np.asarray(v.point)
        w = np.asarray(v.vector) + np.array([1e-3, -1e-3])
        w = w / norm_g(surf, p, w)
        moved = asymptotic_curvature(surf, Tangent2(tuple(p), tuple(w)), 15.0).value
        assert abs(moved - base) <= 1e-2


def test_curvature_gap(flat, hyp):
    v = unit_tangent(flat, (0, 0), (1, 0))
    g = curvature_gap(flat, v, 2.0, 50.0)
    assert g.gap == pytest.approx(0.5 - 1.0 / 50.0, abs=1e-12)
    v = unit_tangent(hyp, (0, 0), (1, 0))
    g = curvature_gap(hyp, v, 16.0, 625.0)
    exact = 1.0 / math.tanh(16.0) - 1.0 / math.tanh(625.0)
    assert g.gap > 0.0
    assert g.gap == pytest.approx(exact, rel=1e-9)
    # the stably computed pieces agree with the direct operations
    assert g.kappa_circle == pytest.approx(1.0 / math.tanh(16.0), rel=1e-12)
    assert g.k_hat == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ConfigError):
        curvature_gap(hyp, v, 4.0, 2.0)


def test_riccati_residual(flat, hyp, bump):
    v = unit_tangent(flat, (0, 0), (1, 0))
    # the check itself differences kappa, so its floor is h^2 kappa'''/6
    assert riccati_residual(flat, v, (1.5, 5.0)) <= 1e-6
    v = unit_tangent(hyp, (0.2, 0.3), (1, 1))
    assert riccati_residual(hyp, v, (1.5, 5.0)) <= 1e-6
    rng = np.random.default_rng(4)
    v = random_unit_tangent(bump, rng)
    assert riccati_residual(bump, v, (1.0, 5.0)) <= 1e-5
    assert riccati_residual(bump, v, (1.0, 5.0), quantity="asymptotic") <= 1e-5


def test_circle_profile_matches_pointwise(hyp):
    r, kappa, ks = circle_curvature_profile(hyp, (0, 0), (0, 1), 4.0)
    assert np.all(ks == -1.0)
    idx = np.searchsorted(r, 2.5)
    direct = circle_curvature(hyp, (0, 0), (0, 1), float(r[idx]))
    assert kappa[idx] == pytest.approx(direct, rel=1e-12)


def test_bvp_chord(hyp):
    v = unit_tangent(hyp, (0, 0), (1, 0))
    path = geodesic_span(hyp, v, 0.0, 1.0)
    sol = jacobi_bvp(hyp, path, 0.0, 1.0, 1.0, 0.0)
    exact = np.sinh(1.0 - sol.path.r) / math.sinh(1.0)
    assert np.max(np.abs(sol.h - exact)) < 1e-8
    assert -1.0 <= sol.dh[-1] <= 0.0
    assert sol.dh[-1] == pytest.approx(-1.0 / math.sinh(1.0), abs=1e-8)


def test_jacobi_csv(tmp_path, hyp):
    v = unit_tangent(hyp, (0, 0), (1, 0))
    path = geodesic_span(hyp, v, 0.0, 1.0, step=0.05)
    sol = jacobi_ivp(hyp, path, 0.0, 1.0)
    out = tmp_path / "sol.csv"
    sol.to_csv(out)
    header = open(out).readline().strip().split(",")
    assert header == ["r", "h", "dh", "kappa"]
