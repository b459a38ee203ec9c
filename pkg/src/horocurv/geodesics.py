"""Geodesic initial-value integration, two-point connection, and distance.

Paths are integrated with a fixed-step fourth-order scheme (default step
1e-3) and stored as uniform samples of (arc-length, point, unit tangent).
Two-point problems are solved by Newton shooting on the launch angle and the
arc length simultaneously; the angle derivative of the endpoint is the value
of the scalar radial Jacobi solution carried along the shot, so the Jacobian
of the shooting map is exact up to integrator error.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConfigError, NoConvergence
from .surfaces import frame_direction, norm_g, rotate90

__all__ = [
    "DEFAULT_STEP",
    "GeodesicPath",
    "geodesic_ivp",
    "geodesic_span",
    "backward_span",
    "ConnectResult",
    "connect",
    "connect_core",
    "distance",
    "transport_perp",
]

DEFAULT_STEP = 1e-3


def _steps_for(length, step):
    if length <= 0:
        raise ConfigError(f"length must be positive, got {length}")
    if step <= 0:
        raise ConfigError(f"step must be positive, got {step}")
    if step > length:
        raise ConfigError(f"step {step} exceeds length {length}")
    n = max(1, int(math.ceil(length / step - 1e-12)))
    return n, length / n


@dataclass(frozen=True)
class GeodesicPath:
    """Uniform samples (r, point, unit tangent) of a unit-speed geodesic."""

    surface: object
    r: np.ndarray
    xy: np.ndarray
    v: np.ndarray
    step: float

    @property
    def r_start(self):
        return float(self.r[0])

    @property
    def r_end(self):
        return float(self.r[-1])

    @property
    def length(self):
        return self.r_end - self.r_start

    def index_at(self, r):
        k = int(round((r - self.r_start) / self.step))
        if k < 0 or k >= len(self.r):
            raise ConfigError(f"r = {r} outside [{self.r_start}, {self.r_end}]")
        return k

    def state_at(self, r):
        """Point and tangent at arc-length r (cubic Hermite between samples)."""
        if r <= self.r_start:
            return self.xy[0].copy(), self.v[0].copy()
        if r >= self.r_end:
            return self.xy[-1].copy(), self.v[-1].copy()
        s = (r - self.r_start) / self.step
        k = min(int(s), len(self.r) - 2)
        t = s - k
        h = self.step
        p0, p1 = self.xy[k], self.xy[k + 1]
        m0, m1 = self.v[k] * h, self.v[k + 1] * h
        t2 = t * t
        t3 = t2 * t
        pt = (
            (2 * t3 - 3 * t2 + 1) * p0
            + (t3 - 2 * t2 + t) * m0
            + (-2 * t3 + 3 * t2) * p1
            + (t3 - t2) * m1
        )
        dp = (
            (6 * t2 - 6 * t) * p0
            + (3 * t2 - 4 * t + 1) * m0
            + (-6 * t2 + 6 * t) * p1
            + (3 * t2 - 2 * t) * m1
        ) / h
        return pt, dp

    def zero_index(self):
        return self.index_at(0.0)

    def reversed(self):
        r = self.r[-1] - self.r[::-1]
        return GeodesicPath(self.surface, r.copy(), self.xy[::-1].copy(),
                            -self.v[::-1].copy(), self.step)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "x", "y", "v1", "v2"])
            for k in range(len(self.r)):
                w.writerow([f"{self.r[k]:.17g}", f"{self.xy[k, 0]:.17g}",
                            f"{self.xy[k, 1]:.17g}", f"{self.v[k, 0]:.17g}",
                            f"{self.v[k, 1]:.17g}"])


def _make_path(surface, out, h, r0=0.0):
    n = out.shape[0] - 1
    r = r0 + h * np.arange(n + 1)
    return GeodesicPath(surface, r, out[:, 0:2].copy(), out[:, 2:4].copy(), h)


def state4(surface, p, v):
    """Kernel state (x, y, vx, v4) for a coordinate tangent at p."""
    fam, wp, cp = surface.packed()
    return p[0], p[1], v[0], K.v4_of_vy(fam, wp, cp, p[0], v[1])


def geodesic_ivp(surface, start, length, step=DEFAULT_STEP):
    """Integrate the geodesic with the given g-unit initial tangent."""
    n, h = _steps_for(length, step)
    p, v = start.as_arrays()
    fam, wp, cp = surface.packed()
    out = K.geo_store(fam, wp, cp, *state4(surface, p, v), h, n)
    K.rows_v4_to_vy(fam, wp, cp, out)
    return _make_path(surface, out, h)


def backward_span(surface, tangent, s, step=DEFAULT_STEP):
    """The geodesic through ``tangent`` sampled on exactly [-s, 0]."""
    n, h = _steps_for(s, step)
    p, v = tangent.as_arrays()
    fam, wp, cp = surface.packed()
    x0, y0, vx0, v40 = state4(surface, p, v)
    out = K.geo_store(fam, wp, cp, x0, y0, -vx0, -v40, h, n)
    out = out[::-1].copy()
    out[:, 2:4] *= -1.0
    K.rows_v4_to_vy(fam, wp, cp, out)
    return _make_path(surface, out, h, r0=-s)


def geodesic_span(surface, tangent, r_min, r_max, step=DEFAULT_STEP):
    """Sample the geodesic on an interval containing 0, with a node at 0."""
    if r_min > 0 or r_max < 0 or r_max <= r_min:
        raise ConfigError("need r_min <= 0 <= r_max with r_min < r_max")
    p, v = tangent.as_arrays()
    fam, wp, cp = surface.packed()
    x0, y0, vx0, v40 = state4(surface, p, v)
    n_b = 0 if r_min == 0 else max(1, int(math.ceil(-r_min / step - 1e-12)))
    n_f = 0 if r_max == 0 else max(1, int(math.ceil(r_max / step - 1e-12)))
    h = step
    rows = []
    if n_b:
        back = K.geo_store(fam, wp, cp, x0, y0, -vx0, -v40, h, n_b)
        back = back[:0:-1].copy()
        back[:, 2:4] *= -1.0
        K.rows_v4_to_vy(fam, wp, cp, back)
        rows.append(back)
    rows.append(np.array([[p[0], p[1], v[0], v[1]]]))
    if n_f:
        fwd = K.geo_store(fam, wp, cp, x0, y0, vx0, v40, h, n_f)
        fwd = fwd[1:].copy()
        K.rows_v4_to_vy(fam, wp, cp, fwd)
        rows.append(fwd)
    out = np.vstack(rows)
    return _make_path(surface, out, h, r0=-n_b * h)


@dataclass(frozen=True)
class ConnectResult:
    """Shooting solution for the geodesic from x to y."""

    length: float
    psi: float
    v_start: np.ndarray  # unit tangent at x pointing toward y
    v_end: np.ndarray    # unit tangent at y pointing away from x
    end_point: np.ndarray
    iterations: int


def _flat_chord(surface, x, y):
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    length = norm_g(surface, x, d)
    return length, d / length


def connect_core(surface, x, y, tol=1e-8, step=DEFAULT_STEP, max_iter=50):
    """Newton shooting on (launch angle, arc length); flat surfaces short-circuit."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        raise ConfigError("connect needs two distinct points")
    if surface.is_flat:
        length, t = _flat_chord(surface, x, y)
        return ConnectResult(length, math.atan2(t[1], t[0]), t, t.copy(), y.copy(), 0)

    fam, wp, cp = surface.packed()
    dx, dy = y[0] - x[0], y[1] - x[1]
    if surface.family == "warped":
        f0 = K.warped_f(wp, x[0])[0]
        al, be = dx, f0 * dy
    else:
        u0 = K.conformal_u(cp, x[0], x[1])[0]
        u1 = K.conformal_u(cp, y[0], y[1])[0]
        e = 0.5 * (math.exp(u0) + math.exp(u1))
        al, be = e * dx, e * dy
    psi = math.atan2(be, al)
    L = max(math.hypot(al, be), 4.0 * step)

    def shoot(psi_, L_):
        n, h = _steps_for(L_, step)
        v0 = frame_direction(surface, x, psi_)
        ex, ey, evx, ev4, hj, dhj = K.jacobi_final(
            fam, wp, cp, *state4(surface, x, v0), h, n, 0.0, 1.0
        )
        evy = K.vy_of_v4(fam, wp, cp, ex, ev4)
        return v0, np.array([ex, ey]), np.array([evx, evy]), hj

    total = 0
    v0, end, vend, hj = shoot(psi, L)
    res = end - y
    best = float(np.max(np.abs(res)))
    while total < max_iter:
        if best <= tol:
            return ConnectResult(L, psi, v0, vend, end, total)
        w = rotate90(surface, end, vend)
        J = np.column_stack([hj * w, vend])
        try:
            dpsi, dL = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            dpsi, dL = np.linalg.lstsq(J, -res, rcond=None)[0]
        # keep the step sane: angle within a quarter turn, length positive
        scale = 1.0
        if abs(dpsi) > 0.5:
            scale = min(scale, 0.5 / abs(dpsi))
        if abs(dL) > 0.5 * L:
            scale = min(scale, 0.5 * L / abs(dL))
        improved = False
        for _ in range(8):
            psi_try = psi + scale * dpsi
            L_try = max(L + scale * dL, 2.0 * step)
            v0_t, end_t, vend_t, hj_t = shoot(psi_try, L_try)
            total += 1
            res_t = end_t - y
            err_t = float(np.max(np.abs(res_t)))
            if err_t < best:
                psi, L = psi_try, L_try
                v0, end, vend, hj = v0_t, end_t, vend_t, hj_t
                res, best = res_t, err_t
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    if best <= tol:
        return ConnectResult(L, psi, v0, vend, end, total)
    raise NoConvergence(
        f"shooting from {tuple(x)} to {tuple(y)} stalled at residual {best:.3e} "
        f"after {total} integrations",
        cell=(tuple(x), tuple(y)),
    )


def connect(surface, x, y, tol=1e-8, step=DEFAULT_STEP, max_iter=50):
    """Unit-speed geodesic path from x to y (endpoint error <= tol)."""
    core = connect_core(surface, x, y, tol=tol, step=step, max_iter=max_iter)
    x = np.asarray(x, dtype=float)
    if surface.is_flat:
        n, h = _steps_for(core.length, step)
        r = h * np.arange(n + 1)
        xy = x[None, :] + np.outer(r, core.v_start)
        v = np.repeat(core.v_start[None, :], n + 1, axis=0)
        return GeodesicPath(surface, r, xy, v, h)
    fam, wp, cp = surface.packed()
    n, h = _steps_for(core.length, step)
    v0 = frame_direction(surface, x, core.psi)
    out = K.geo_store(fam, wp, cp, *state4(surface, x, v0), h, n)
    K.rows_v4_to_vy(fam, wp, cp, out)
    return _make_path(surface, out, h)


def distance(surface, x, y, tol=1e-8, step=DEFAULT_STEP, max_iter=50):
    """Geodesic distance; zero exactly when the points coincide."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.array_equal(x, y):
        return 0.0
    return connect_core(surface, x, y, tol=tol, step=step, max_iter=max_iter).length


def transport_perp(path, r):
    """Unit normal along the path at r: +90-degree rotation of the tangent.

    In two dimensions this coincides with parallel transport of the initial
    normal, since parallel transport preserves angle with the tangent.
    """
    if r < path.r_start - 1e-12 or r > path.r_end + 1e-12:
        raise ConfigError(f"r = {r} outside path range")
    p, v = path.state_at(r)
    n = rotate90(path.surface, p, v)
    return p, n / norm_g(path.surface, p, n)
