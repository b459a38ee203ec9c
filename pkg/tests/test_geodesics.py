import csv

import numpy as np
import pytest

from horocurv.errors import ConfigError, NoConvergence
from horocurv.geodesics import (
    connect,
    connect_core,
    distance,
    geodesic_ivp,
    geodesic_span,
    transport_perp,
)
from horocurv.surfaces import (
    christoffel_at,
    norm_g,
    random_unit_tangent,
    unit_tangent,
)
from oracles import grid_distance


def test_flat_straight_line(flat):
    p = geodesic_ivp(flat, unit_tangent(flat, (0, 0), (1, 0)), 5.0)
    assert np.allclose(p.xy[-1], (5.0, 0.0), atol=1e-12)
    assert abs(p.length - 5.0) < 1e-12


def test_hyperbolic_axis_geodesics(hyp):
    # x = 0 is fixed by the reflection x -> -x, so it is a geodesic
    p = geodesic_ivp(hyp, unit_tangent(hyp, (0, 0), (0, 1)), 2.0)
    assert np.allclose(p.xy[-1], (0.0, 2.0), atol=1e-10)
    # horizontal lines are unit-speed geodesics of the warped product
    p = geodesic_ivp(hyp, unit_tangent(hyp, (0, 0), (1, 0)), 3.0)
    assert np.allclose(p.xy[-1], (3.0, 0.0), atol=1e-10)


def test_unit_speed_invariant(hyp, bump):
    rng = np.random.default_rng(0)
    for surf in (hyp, bump):
        v = random_unit_tangent(surf, rng)
        path = geodesic_ivp(surf, v, 6.0)
        for k in range(0, len(path.r), 500):
            assert abs(norm_g(surf, path.xy[k], path.v[k]) - 1.0) < 1e-8


def test_geodesic_equation_residual(hyp, bump):
    # tangent difference vs -Gamma contraction; the check's own difference
    # error is O(step^2), so the tolerance is max(1e-6, 10 step^2)
    rng = np.random.default_rng(1)
    for surf in (hyp, bump):
        v = random_unit_tangent(surf, rng, box=1.0)
        path = geodesic_ivp(surf, v, 4.0)
        h = path.step
        worst = 0.0
        for k in range(1, len(path.r) - 1, 37):
            fd = (path.v[k + 1] - path.v[k - 1]) / (2 * h)
            G = christoffel_at(surf, path.xy[k])
            vv = path.v[k]
            acc = -np.array([vv @ G[0] @ vv, vv @ G[1] @ vv])
            worst = max(worst, float(np.max(np.abs(fd - acc))))
        assert worst <= max(1e-6, 10 * h * h), surf.name


def test_connect_flat(flat):
    path = connect(flat, (0, 0), (3, 4))
    assert abs(path.length - 5.0) < 1e-12
    assert np.allclose(path.xy[-1], (3.0, 4.0), atol=1e-12)


def test_connect_hyperbolic_axis(hyp):
    path = connect(hyp, (0, 0), (0, 2), tol=1e-10)
    assert abs(path.length - 2.0) < 1e-8
    assert np.max(np.abs(path.xy[:, 0])) < 1e-8


def test_distance_against_grid_oracle(hyp):
    def metric_fn(x, y):
        c = np.cosh(x)
        return np.ones_like(x), np.zeros_like(x), c * c

    d = distance(hyp, (0.0, 1.0), (0.0, -1.0), tol=1e-10)
    assert abs(d - 2.0) < 1e-10  # axis geodesic, exact value 2
    oracle = grid_distance(metric_fn, (0.0, 1.0), (0.0, -1.0),
                           (-0.8, 0.8, -1.4, 1.4), nx=401, ny=701)
    assert abs(d - oracle) < 1e-3


def test_connect_reversibility(hyp):
    a, b = (0.3, 0.5), (1.2, -0.7)
    fwd = connect(hyp, a, b, tol=1e-10)
    bwd = connect(hyp, b, a, tol=1e-10)
    rev = bwd.reversed()
    assert abs(fwd.length - bwd.length) < 1e-9
    assert np.max(np.abs(fwd.xy - rev.xy)) < 1e-6


def test_triangle_inequality(hyp):
    rng = np.random.default_rng(2)
    for _ in range(25):
        pts = rng.uniform(-1.5, 1.5, size=(3, 2))
        dab = distance(hyp, pts[0], pts[1])
        dbc = distance(hyp, pts[1], pts[2])
        dac = distance(hyp, pts[0], pts[2])
        assert dac <= dab + dbc + 1e-8


def test_distance_fourth_order_in_step(hyp2):
    a, b = (0.3, 0.2), (1.7, 1.9)
    ds = [distance(hyp2, a, b, tol=1e-12, step=h) for h in (2e-2, 1e-2, 5e-3)]
    d1 = abs(ds[0] - ds[1])
    d2 = abs(ds[1] - ds[2])
    assert d1 / d2 == pytest.approx(16.0, rel=1.0)  # 4th-order convergence


def test_flat_distance_is_euclidean(flat):
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = rng.uniform(-4, 4, size=(2, 2))
        assert abs(distance(flat, a, b) - np.hypot(*(b - a))) < 1e-10


def test_transport_perp(flat, hyp, bump):
    path = geodesic_ivp(flat, unit_tangent(flat, (0, 0), (1, 0)), 4.0)
    _, w = transport_perp(path, 1.7)
    assert np.allclose(w, (0.0, 1.0), atol=1e-12)

    # axis geodesic of the hyperbolic plane: the normal is the x-direction
    path = geodesic_ivp(hyp, unit_tangent(hyp, (0, 0), (0, 1)), 2.0)
    p, w = transport_perp(path, 1.0)
    assert abs(abs(w[0]) - 1.0) < 1e-9 and abs(w[1]) < 1e-9

    rng = np.random.default_rng(4)
    for surf in (hyp, bump):
        path = geodesic_ivp(surf, random_unit_tangent(surf, rng), 5.0)
        from horocurv.surfaces import inner_g

        for r in np.linspace(0.0, 5.0, 50):
            p, w = transport_perp(path, r)
            _, t = path.state_at(r)
            assert abs(norm_g(surf, p, w) - 1.0) < 1e-7
            assert abs(inner_g(surf, p, w, t)) < 1e-7


def test_errors(flat, hyp):
    with pytest.raises(ConfigError):
        geodesic_ivp(flat, unit_tangent(flat, (0, 0), (1, 0)), 1.0, step=2.0)
    with pytest.raises(ConfigError):
        connect(flat, (1.0, 2.0), (1.0, 2.0))
    with pytest.raises(NoConvergence):
        connect_core(hyp, (0.0, 0.0), (1.0, 1.0), tol=1e-14, max_iter=1)
    path = geodesic_ivp(flat, unit_tangent(flat, (0, 0), (1, 0)), 1.0)
    with pytest.raises(ConfigError):
        transport_perp(path, 2.0)


def test_span_has_zero_node(hyp):
    v = unit_tangent(hyp, (0.2, 0.1), (1, 1))
    path = geodesic_span(hyp, v, -2.0, 3.0)
    k = path.zero_index()
    assert abs(path.r[k]) < 1e-12
    assert np.allclose(path.xy[k], (0.2, 0.1), atol=1e-12)
    assert path.r_start <= -2.0 and path.r_end >= 3.0 - 1e-9


def test_path_csv_roundtrip(tmp_path, flat):
    path = geodesic_ivp(flat, unit_tangent(flat, (0, 0), (0.6, 0.8)), 1.0, step=0.25)
    out = tmp_path / "path.csv"
    path.to_csv(out)
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["r", "x", "y", "v1", "v2"]
    assert len(rows) == len(path.r) + 1
    assert float(rows[-1][1]) == pytest.approx(path.xy[-1, 0], abs=1e-15)
