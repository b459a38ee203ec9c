"""Explicit nonpositively curved metrics on the plane.

Two closed-form families are supported, both with exact curvature and
Christoffel symbols:

* ``warped``:    ds^2 = dx^2 + f(x)^2 dy^2,  f a polynomial in cosh(a*x),
                 K = -f''/f
* ``conformal``: ds^2 = exp(2u) (dx^2+dy^2), u a polynomial in (x, y),
                 K = -exp(-2u) (u_xx + u_yy)

The flat plane is the warped family with f == 1.  The hyperbolic plane is
represented globally as f = cosh(x) (Fermi coordinates about the geodesic
x = 0), so everything runs on all of R^2 rather than a bounded model.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import ConfigError, DomainError

__all__ = [
    "MetricSurface",
    "Tangent2",
    "preset",
    "warped_surface",
    "conformal_surface",
    "metric_at",
    "christoffel_at",
    "gaussian_curvature",
    "validate_nonpositive",
    "CurvatureReport",
    "norm_g",
    "inner_g",
    "rotate90",
    "frame_direction",
    "unit_tangent",
    "random_unit_tangent",
    "PRESET_NAMES",
]

PRESET_NAMES = ("flat", "hyperbolic", "hyperbolic-a", "gaussian-bump")


@dataclass(frozen=True)
class MetricSurface:
    """An explicit metric on R^2 from one of the two closed-form families."""

    name: str
    family: str  # "warped" | "conformal"
    warp: np.ndarray = field(default_factory=lambda: K._EMPTY_WP)
    conf: np.ndarray = field(default_factory=lambda: K._EMPTY_CP)

    @property
    def fam_code(self):
        return K.WARPED if self.family == "warped" else K.CONFORMAL

    @property
    def is_flat(self):
        if self.family == "warped":
            return not np.any(self.warp[2:])
        return not np.any(self.conf.ravel()[1:])

    def packed(self):
        return self.fam_code, self.warp, self.conf

    def __repr__(self):
        return f"MetricSurface({self.name!r})"


def warped_surface(coeffs, scale=1.0, name=None):
    """Build ds^2 = dx^2 + f(x)^2 dy^2 with f(x) = sum_k coeffs[k] cosh(scale*x)**k."""
    wp = np.concatenate([[float(scale)], np.asarray(coeffs, dtype=float)])
    if wp.shape[0] < 2:
        raise ConfigError("warped surface needs at least one profile coefficient")
    surf = MetricSurface(name or "warped", "warped", warp=wp)
    f0 = K.warped_f(wp, 0.0)[0]
    if not math.isfinite(f0) or f0 <= 0.0:
        raise ConfigError(f"warp profile must be positive; f(0) = {f0}")
    return surf


def conformal_surface(poly_coeffs, name=None):
    """Build ds^2 = exp(2u)(dx^2+dy^2) with u(x,y) = sum_ij A[i,j] x^i y^j."""
    cp = np.atleast_2d(np.asarray(poly_coeffs, dtype=float))
    return MetricSurface(name or "conformal", "conformal", conf=cp)


def preset(name, a=None):
    """Named surface presets: flat, hyperbolic, hyperbolic-a, gaussian-bump."""
    if name == "flat":
        return warped_surface([1.0], name="flat")
    if name == "hyperbolic":
        return warped_surface([0.0, 1.0], name="hyperbolic")
    if name == "hyperbolic-a":
        if a is None:
            raise ConfigError("preset 'hyperbolic-a' needs the parameter a")
        return warped_surface([0.0, 1.0], scale=float(a), name=f"hyperbolic-a({a})")
    if name == "gaussian-bump":
        cp = np.zeros((3, 3))
        cp[2, 0] = 0.5
        cp[0, 2] = 0.5
        return MetricSurface("gaussian-bump", "conformal", conf=cp)
    raise ConfigError(f"unknown surface preset {name!r}; known: {PRESET_NAMES}")


def _as_xy(p):
    x, y = float(p[0]), float(p[1])
    return x, y


def metric_at(surface, p):
    """Metric tensor g_ij(p) as a symmetric 2x2 array."""
    x, y = _as_xy(p)
    if surface.family == "warped":
        f, _, _ = K.warped_f(surface.warp, x)
        if not math.isfinite(f) or f <= 0.0:
            raise DomainError(f"warp profile f({x}) = {f} is not positive/finite")
        return np.array([[1.0, 0.0], [0.0, f * f]])
    u, _, _, _, _ = K.conformal_u(surface.conf, x, y)
    e = math.exp(2.0 * u)
    if not math.isfinite(e):
        raise DomainError(f"conformal factor exp(2u) overflowed at ({x}, {y})")
    return np.array([[e, 0.0], [0.0, e]])


def christoffel_at(surface, p):
    """Christoffel symbols Gamma[k, i, j] (symmetric in i, j)."""
    x, y = _as_xy(p)
    G = np.zeros((2, 2, 2))
    if surface.family == "warped":
        f, fp, _ = K.warped_f(surface.warp, x)
        if not math.isfinite(f) or f <= 0.0:
            raise DomainError(f"warp profile f({x}) = {f} is not positive/finite")
        G[0, 1, 1] = -f * fp
        G[1, 0, 1] = G[1, 1, 0] = fp / f
        return G
    u, ux, uy, _, _ = K.conformal_u(surface.conf, x, y)
    if not math.isfinite(u):
        raise DomainError(f"conformal exponent u({x}, {y}) is not finite")
    G[0, 0, 0] = ux
    G[0, 0, 1] = G[0, 1, 0] = uy
    G[0, 1, 1] = -ux
    G[1, 1, 1] = uy
    G[1, 0, 1] = G[1, 1, 0] = ux
    G[1, 0, 0] = -uy
    return G


def gaussian_curvature(surface, p):
    x, y = _as_xy(p)
    k = K.gauss_k(surface.fam_code, surface.warp, surface.conf, x, y)
    if not math.isfinite(k):
        raise DomainError(f"curvature not finite at ({x}, {y})")
    return k


@dataclass(frozen=True)
class CurvatureReport:
    min_k: float
    max_k: float
    violations: tuple
    passed: bool


def validate_nonpositive(surface, region, grid_step):
    """Scan K on a grid over region = (x0, x1, y0, y1); flag any K > 1e-12."""
    if grid_step <= 0:
        raise ConfigError("grid step must be positive")
    x0, x1, y0, y1 = (float(v) for v in region)
    xs = np.arange(x0, x1 + 0.5 * grid_step, grid_step)
    ys = np.arange(y0, y1 + 0.5 * grid_step, grid_step)
    min_k = math.inf
    max_k = -math.inf
    bad = []
    for x in xs:
        for y in ys:
            k = gaussian_curvature(surface, (x, y))
            min_k = min(min_k, k)
            max_k = max(max_k, k)
            if k > 1e-12:
                bad.append((float(x), float(y), k))
    return CurvatureReport(min_k, max_k, tuple(bad), not bad)


# ---------------------------------------------------------------------------
# tangent vectors


@dataclass(frozen=True)
class Tangent2:
    """A base point with a direction vector, both in coordinates."""

    point: tuple
    vector: tuple

    def as_arrays(self):
        return np.asarray(self.point, dtype=float), np.asarray(self.vector, dtype=float)


def inner_g(surface, p, v, w):
    g = metric_at(surface, p)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return float(v @ g @ w)


def norm_g(surface, p, v):
    return math.sqrt(max(inner_g(surface, p, v, v), 0.0))


def rotate90(surface, p, v):
    """Rotate a g-unit vector by +90 degrees in the oriented orthonormal frame."""
    x, _ = _as_xy(p)
    vx, vy = float(v[0]), float(v[1])
    if surface.family == "warped":
        f, _, _ = K.warped_f(surface.warp, x)
        # frame components (alpha, beta) -> (-beta, alpha)
        return np.array([-f * vy, vx / f])
    return np.array([-vy, vx])


def frame_direction(surface, p, psi):
    """The g-unit coordinate vector at angle psi in the orthonormal frame."""
    x, y = _as_xy(p)
    if surface.family == "warped":
        f, _, _ = K.warped_f(surface.warp, x)
        return np.array([math.cos(psi), math.sin(psi) / f])
    u, _, _, _, _ = K.conformal_u(surface.conf, x, y)
    e = math.exp(-u)
    return np.array([e * math.cos(psi), e * math.sin(psi)])


def unit_tangent(surface, p, direction):
    """Normalize a direction to g-norm 1 at p and return a Tangent2."""
    d = np.asarray(direction, dtype=float)
    n = norm_g(surface, p, d)
    if n == 0.0 or not math.isfinite(n):
        raise ConfigError("cannot normalize a zero/non-finite direction")
    v = d / n
    return Tangent2((float(p[0]), float(p[1])), (float(v[0]), float(v[1])))


def random_unit_tangent(surface, rng, box=2.0):
    """A g-unit tangent at a uniform point of [-box, box]^2, uniform frame angle."""
    p = rng.uniform(-box, box, size=2)
    psi = rng.uniform(0.0, 2.0 * math.pi)
    v = frame_direction(surface, p, psi)
    return Tangent2((float(p[0]), float(p[1])), (float(v[0]), float(v[1])))
