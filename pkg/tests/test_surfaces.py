import math

import numpy as np
import pytest

from horocurv.errors import ConfigError
from horocurv.surfaces import (
    christoffel_at,
    conformal_surface,
    gaussian_curvature,
    inner_g,
    metric_at,
    norm_g,
    preset,
    random_unit_tangent,
    rotate90,
    unit_tangent,
    validate_nonpositive,
    warped_surface,
)
from oracles import brioschi_curvature, fd_christoffel


def sample_surfaces():
    return [
        preset("flat"),
        preset("hyperbolic"),
        preset("hyperbolic-a", a=1.7),
        preset("gaussian-bump"),
        warped_surface([0.5, 0.0, 0.5], scale=0.8, name="cosh-square"),
        conformal_surface([[0.0, 0.0, 0.3], [0.0, -0.1, 0.0], [0.3, 0.0, 0.0]],
                          name="poly-conf"),
    ]


def test_metric_values(flat, hyp):
    assert np.allclose(metric_at(flat, (3.7, -1.2)), np.eye(2))
    assert np.allclose(metric_at(hyp, (0.0, 0.0)), np.eye(2))
    g = metric_at(hyp, (1.0, 0.0))
    assert g[0, 0] == 1.0 and g[0, 1] == 0.0
    assert abs(g[1, 1] - math.cosh(1.0) ** 2) < 1e-14


def test_positive_profile_enforced():
    with pytest.raises(ConfigError):
        warped_surface([1.0, -2.0])  # f(0) = 1 - 2 cosh(0) < 0


def test_christoffel_closed_forms(flat, hyp):
    assert np.all(christoffel_at(flat, (0.3, 0.4)) == 0.0)
    G = christoffel_at(hyp, (1.0, 0.0))
    assert abs(G[0, 1, 1] - (-math.cosh(1.0) * math.sinh(1.0))) < 1e-13
    assert abs(G[1, 0, 1] - math.tanh(1.0)) < 1e-14
    assert G[1, 0, 1] == G[1, 1, 0]
    conf = preset("gaussian-bump")
    Gc = christoffel_at(conf, (1.0, 0.0))
    assert abs(Gc[0, 0, 0] - 1.0) < 1e-14  # Gamma^x_xx = u_x = x


def test_christoffel_matches_finite_differences():
    rng = np.random.default_rng(7)
    for surf in sample_surfaces():
        for _ in range(20):
            p = rng.uniform(-1.5, 1.5, size=2)
            exact = christoffel_at(surf, p)
            fd = fd_christoffel(lambda q: metric_at(surf, q), p)
            scale = max(1.0, float(np.max(np.abs(exact))))
            assert np.max(np.abs(exact - fd)) < 1e-6 * scale, surf.name


def test_curvature_closed_forms(flat, hyp, bump):
    assert gaussian_curvature(flat, (2.0, -3.0)) == 0.0
    for p in ((0.0, 0.0), (2.0, 5.0), (-40.0, 1.0), (300.0, 0.0)):
        assert abs(gaussian_curvature(hyp, p) + 1.0) < 1e-12
    a = 1.7
    assert abs(gaussian_curvature(preset("hyperbolic-a", a=a), (0.3, 1.0)) + a * a) < 1e-12
    for p in ((0.0, 0.0), (1.0, 0.0), (0.5, -1.5)):
        expect = -2.0 * math.exp(-(p[0] ** 2 + p[1] ** 2))
        assert abs(gaussian_curvature(bump, p) - expect) < 1e-14


def test_curvature_matches_brioschi():
    rng = np.random.default_rng(11)
    for surf in sample_surfaces():
        for _ in range(20):
            p = rng.uniform(-1.5, 1.5, size=2)
            exact = gaussian_curvature(surf, p)
            fd = brioschi_curvature(lambda q: metric_at(surf, q), p)
            assert abs(exact - fd) <= 1e-5 * max(1.0, abs(exact)), surf.name


def test_validate_nonpositive_presets(flat, hyp, bump):
    rep = validate_nonpositive(flat, (-5, 5, -5, 5), 0.5)
    assert rep.passed and rep.max_k == 0.0
    rep = validate_nonpositive(hyp, (-5, 5, -5, 5), 0.5)
    assert rep.passed and abs(rep.max_k + 1.0) < 1e-12
    rep = validate_nonpositive(bump, (-3, 3, -3, 3), 0.5)
    assert rep.passed and rep.max_k < 0.0
    # the least-negative value sits at the farthest corner
    assert abs(rep.max_k + 2.0 * math.exp(-18.0)) < 1e-20


def test_validate_flags_positive_curvature():
    bad = conformal_surface([[0.0, 0.0, -0.5], [0.0, 0.0, 0.0], [-0.5, 0.0, 0.0]])
    rep = validate_nonpositive(bad, (-1, 1, -1, 1), 0.5)
    assert not rep.passed
    assert rep.max_k > 0.0 and len(rep.violations) > 0


def test_unit_tangents():
    rng = np.random.default_rng(3)
    for surf in sample_surfaces():
        t = unit_tangent(surf, (0.4, -0.2), (3.0, 4.0))
        assert abs(norm_g(surf, t.point, t.vector) - 1.0) < 1e-10
        for _ in range(10):
            t = random_unit_tangent(surf, rng)
            assert abs(norm_g(surf, t.point, t.vector) - 1.0) < 1e-10


def test_rotate90_is_unit_and_orthogonal():
    rng = np.random.default_rng(5)
    for surf in sample_surfaces():
        for _ in range(10):
            t = random_unit_tangent(surf, rng)
            w = rotate90(surf, t.point, t.vector)
            assert abs(norm_g(surf, t.point, w) - 1.0) < 1e-10
            assert abs(inner_g(surf, t.point, w, t.vector)) < 1e-10
