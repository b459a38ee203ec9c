"""Scalar Jacobi solutions, circle curvature, and the curvature at infinity.

Along a unit-speed geodesic the perpendicular part of any Jacobi field is
h(r) * w(r) with w the transported unit normal and h'' + K h = 0.  The
curvature of the geodesic circle of radius r about the geodesic's start is
h'(r)/h(r) for the solution with h(0) = 0, h'(0) = 1.  Internally the ratio
is integrated directly through its reciprocal u = h/h', which satisfies the
regular equation u' = 1 + K u^2 with u(0) = 0; this avoids both the r -> 0
singularity and overflow of h on long runs.

The asymptotic invariant at a unit tangent v is the limit of these circle
curvatures as the center recedes along the backward geodesic; the finite
center at distance s overestimates it by at most 1/s, which turns the limit
into an algorithm with a guaranteed one-sided error bound.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConfigError, InternalError, RadiusTooSmall
from .geodesics import DEFAULT_STEP, GeodesicPath, _steps_for, state4
from .surfaces import Tangent2, gaussian_curvature, unit_tangent

__all__ = [
    "JacobiSolution",
    "AsymptoticCurvature",
    "CurvatureGap",
    "jacobi_ivp",
    "jacobi_bvp",
    "hs_solution",
    "limit_solution",
    "circle_curvature",
    "circle_curvature_profile",
    "asymptotic_curvature",
    "curvature_gap",
    "riccati_residual",
]


@dataclass(frozen=True)
class JacobiSolution:
    """Sampled solution of h'' + K h = 0 along a geodesic path."""

    path: GeodesicPath
    h: np.ndarray
    dh: np.ndarray
    kind: tuple  # ("ivp", h0, dh0) | ("bvp_hs", s) | ("bvp", r_a, r_b, va, vb)

    @property
    def r(self):
        return self.path.r

    def at(self, r):
        """Cubic Hermite interpolation of h between samples."""
        rs = self.path.r
        if r <= rs[0]:
            return float(self.h[0])
        if r >= rs[-1]:
            return float(self.h[-1])
        s = (r - rs[0]) / self.path.step
        k = min(int(s), len(rs) - 2)
        t = s - k
        hh = self.path.step
        h0, h1 = self.h[k], self.h[k + 1]
        m0, m1 = self.dh[k] * hh, self.dh[k + 1] * hh
        t2, t3 = t * t, t * t * t
        return float(
            (2 * t3 - 3 * t2 + 1) * h0
            + (t3 - 2 * t2 + t) * m0
            + (-2 * t3 + 3 * t2) * h1
            + (t3 - t2) * m1
        )

    def residual_max(self):
        """max |D2 h + K h| / max(1, |h|) with D2 the central second difference."""
        hh = self.path.step
        d2 = (self.h[2:] - 2.0 * self.h[1:-1] + self.h[:-2]) / (hh * hh)
        ks = np.array([
            gaussian_curvature(self.path.surface, self.path.xy[k])
            for k in range(1, len(self.h) - 1)
        ])
        res = np.abs(d2 + ks * self.h[1:-1]) / np.maximum(1.0, np.abs(self.h[1:-1]))
        return float(res.max()) if len(res) else 0.0

    def to_csv(self, out):
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "h", "dh", "kappa"])
            for k in range(len(self.h)):
                kap = self.dh[k] / self.h[k] if self.h[k] != 0.0 else math.nan
                w.writerow([f"{self.path.r[k]:.17g}", f"{self.h[k]:.17g}",
                            f"{self.dh[k]:.17g}", f"{kap:.17g}"])


def _integrate_along(surface, tangent, r_min, r_max, h0, dh0, step):
    """Joint geodesic+Jacobi integration over [r_min, r_max] with data at r=0."""
    fam, wp, cp = surface.packed()
    p, v = tangent.as_arrays()
    x0, y0, vx0, v40 = state4(surface, p, v)
    parts = []
    n_b = 0 if r_min == 0 else max(1, int(math.ceil(-r_min / step - 1e-12)))
    n_f = 0 if r_max == 0 else max(1, int(math.ceil(r_max / step - 1e-12)))
    if n_b:
        back = K.jacobi_store(fam, wp, cp, x0, y0, -vx0, -v40, step, n_b, h0, -dh0)
        back = back[:0:-1].copy()
        back[:, 2:4] *= -1.0
        back[:, 5] *= -1.0
        K.rows_v4_to_vy(fam, wp, cp, back)
        parts.append(back)
    parts.append(np.array([[p[0], p[1], v[0], v[1], h0, dh0]]))
    if n_f:
        fwd = K.jacobi_store(fam, wp, cp, x0, y0, vx0, v40, step, n_f, h0, dh0)
        fwd = fwd[1:].copy()
        K.rows_v4_to_vy(fam, wp, cp, fwd)
        parts.append(fwd)
    out = np.vstack(parts)
    r0 = -n_b * step
    path = GeodesicPath(surface, r0 + step * np.arange(out.shape[0]),
                        out[:, 0:2].copy(), out[:, 2:4].copy(), step)
    return path, out[:, 4].copy(), out[:, 5].copy()


def jacobi_ivp(surface, path, h0, dh0):
    """Solve h'' + K h = 0 along the path with data (h0, dh0) at r = 0.

    The scalar equation is re-integrated jointly with the geodesic at the
    path's own step, so curvature is sampled at exact stage positions and the
    solution lands on the path's r grid.
    """
    k0 = path.zero_index()
    tangent = Tangent2(tuple(path.xy[k0]), tuple(path.v[k0]))
    new_path, h, dh = _integrate_along(
        surface, tangent, path.r_start, path.r_end, float(h0), float(dh0), path.step
    )
    return JacobiSolution(new_path, h, dh, ("ivp", float(h0), float(dh0)))


def jacobi_bvp(surface, path, r_a, r_b, va, vb):
    """Two-point values h(r_a) = va, h(r_b) = vb by linear superposition."""
    base1 = jacobi_ivp(surface, path, 1.0, 0.0)
    base2 = jacobi_ivp(surface, path, 0.0, 1.0)
    A = np.array([[base1.at(r_a), base2.at(r_a)], [base1.at(r_b), base2.at(r_b)]])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < 1e-12:
        raise InternalError("degenerate Jacobi boundary problem (conjugate points?)")
    c1, c2 = np.linalg.solve(A, np.array([va, vb]))
    return JacobiSolution(
        base1.path, c1 * base1.h + c2 * base2.h, c1 * base1.dh + c2 * base2.dh,
        ("bvp", float(r_a), float(r_b), float(va), float(vb)),
    )


def limit_solution(surface, v, r_min, s_max, step=DEFAULT_STEP):
    """The bounded solution (h(0) = 1, bounded for r <= 0) on [r_min, 0].

    Approximated by the solution vanishing at -s_max; on the requested window
    the approximation error is at most |r_min| / s_max, so the true-solution
    bounds 0 < h <= 1 hold sampled as long as s_max is comfortably larger
    than the window.  The curvature at infinity is the returned derivative
    at 0.
    """
    if r_min >= 0:
        raise ConfigError("the window must reach into r < 0")
    if s_max < 4.0 * -r_min:
        raise ConfigError("need s_max >= 4 |r_min| so the finite-center "
                          "approximation error stays below the bounds")
    far = hs_solution(surface, v, s_max, step=step)
    keep = far.path.r >= r_min - 1e-12
    path = GeodesicPath(surface, far.path.r[keep].copy(), far.path.xy[keep].copy(),
                        far.path.v[keep].copy(), far.path.step)
    return JacobiSolution(path, far.h[keep].copy(), far.dh[keep].copy(),
                          ("limit_hinf", float(s_max)))


def hs_solution(surface, v, s, step=DEFAULT_STEP):
    """The solution with h(-s) = 0, h(0) = 1 along the geodesic through v.

    Solved by rescaling the initial-value solution u(-s) = 0, u'(-s) = 1;
    with K <= 0 there are no conjugate points so u(0) cannot vanish.
    """
    if s <= 0:
        raise ConfigError("s must be positive")
    fam, wp, cp = surface.packed()
    p, vec = v.as_arrays()
    x0, y0, vx0, v40 = state4(surface, p, vec)
    n, h = _steps_for(s, step)
    # locate the far endpoint, then integrate forward from its zero
    bx, by, bvx, bv4 = K.geo_final(fam, wp, cp, x0, y0, -vx0, -v40, h, n)
    fwd = K.jacobi_store(fam, wp, cp, bx, by, -bvx, -bv4, h, n, 0.0, 1.0)
    u0 = fwd[-1, 4]
    if abs(u0) < 1e-12:
        raise InternalError("Jacobi solution vanished at the base point; "
                            "conjugate points cannot occur with K <= 0")
    K.rows_v4_to_vy(fam, wp, cp, fwd)
    path = GeodesicPath(surface, -s + h * np.arange(n + 1),
                        fwd[:, 0:2].copy(), fwd[:, 2:4].copy(), h)
    return JacobiSolution(path, fwd[:, 4] / u0, fwd[:, 5] / u0, ("bvp_hs", float(s)))


# ---------------------------------------------------------------------------
# circle curvature and the asymptotic invariant


def circle_curvature(surface, center, direction, r, step=DEFAULT_STEP):
    """Curvature of the geodesic circle of radius r at the point reached by
    the radial geodesic launched from center in the given direction."""
    if r <= step:
        raise RadiusTooSmall(f"radius {r} is at or below the step {step}")
    fam, wp, cp = surface.packed()
    t = unit_tangent(surface, center, direction)
    p, v = t.as_arrays()
    n, h = _steps_for(r, step)
    *_, u, _d = K.riccati_final(fam, wp, cp, *state4(surface, p, v), h, n, 0.0, 0.0)
    return 1.0 / u


def circle_curvature_profile(surface, center, direction, r_max, step=DEFAULT_STEP):
    """(r, kappa, K) sampled along the radial geodesic, r from step to r_max."""
    fam, wp, cp = surface.packed()
    t = unit_tangent(surface, center, direction)
    p, v = t.as_arrays()
    n, h = _steps_for(r_max, step)
    out = K.riccati_store(fam, wp, cp, *state4(surface, p, v), h, n, 0.0, 0.0)
    r = h * np.arange(1, n + 1)
    kappa = 1.0 / out[1:, 4]
    ks = np.array([K.gauss_k(fam, wp, cp, out[i, 0], out[i, 1]) for i in range(1, n + 1)])
    return r, kappa, ks


@dataclass(frozen=True)
class AsymptoticCurvature:
    """Finite-center estimate of the circle curvature at infinity."""

    value: float                 # kappa with center at distance s_max (raw)
    guaranteed_upper_gap: float  # value - true invariant lies in (0, this]
    s_max: float
    convergence_history: tuple   # ((s, kappa_s), ...) for s_max/4, s_max/2, s_max
    richardson: float            # extrapolated value, or nan when not requested


def asymptotic_curvature(surface, v, s_max, richardson=False, step=DEFAULT_STEP):
    """Estimate the circle curvature at infinity for the unit tangent v.

    Integrates the circle-curvature ODE from a center s_max behind the base
    point.  The raw value exceeds the true invariant by at most 1/s_max; the
    optional Richardson value extrapolates the gap as c/s (exact for flat,
    conservative where curvature is negative and the gap decays faster).
    """
    if s_max <= 1:
        raise ConfigError("s_max must exceed 1")
    fam, wp, cp = surface.packed()
    p, vec = v.as_arrays()
    n, _ = _steps_for(s_max, step)
    n = ((n + 3) // 4) * 4  # history centers at s_max/4 and s_max/2 must be nodes
    h = s_max / n
    q = n // 4

    # one backward pass, checkpointing the centers for the history
    x0, y0, vx0, v40 = state4(surface, p, vec)
    states = []
    x, y, vx, v4 = x0, y0, -vx0, -v40
    for _ in range(4):
        x, y, vx, v4 = K.geo_final(fam, wp, cp, x, y, vx, v4, h, q)
        states.append((x, y, -vx, -v4))

    history = []
    for frac, (sx, sy, svx, svy) in zip((1, 2, 4), (states[0], states[1], states[3])):
        m = q * frac
        *_, u, _d = K.riccati_final(fam, wp, cp, sx, sy, svx, svy, h, m, 0.0, 0.0)
        history.append((m * h, 1.0 / u))

    value = history[-1][1]
    rich = 2.0 * value - history[1][1] if richardson else math.nan
    return AsymptoticCurvature(value, 1.0 / s_max, s_max, tuple(history), rich)


@dataclass(frozen=True)
class CurvatureGap:
    """Circle curvature at radius r versus the finite-center asymptotic value,
    with their difference integrated through its own equation."""

    r: float
    s_max: float
    kappa_circle: float
    k_hat: float
    gap: float


def curvature_gap(surface, center_tangent, r, s_max, step=DEFAULT_STEP):
    """Stable evaluation of kappa(r) - kappa_from_center_at_distance_s_max.

    Both curvatures live on the same radial geodesic, so their reciprocal
    slopes u1 (center at 0) and u2 (center at r - s_max) solve the same
    equation and the difference d = u2 - u1 solves the linear equation
    d' = K (u1 + u2) d.  Integrating (u1, d) jointly keeps the difference
    positive by construction, even when it is far below roundoff of the
    curvatures themselves.
    """
    if s_max <= r:
        raise ConfigError("need s_max > r so the far center lies behind the base")
    if r <= step:
        raise RadiusTooSmall(f"radius {r} is at or below the step {step}")
    fam, wp, cp = surface.packed()
    p, vec = center_tangent.as_arrays()
    x0, y0, vx0, v40 = state4(surface, p, vec)

    # walk back to the far center, then bring u2 forward to the near center
    n_b, h_b = _steps_for(s_max - r, step)
    bx, by, bvx, bv4 = K.geo_final(fam, wp, cp, x0, y0, -vx0, -v40, h_b, n_b)
    cx, cy, cvx, cv4, u2_at_center, _ = K.riccati_final(
        fam, wp, cp, bx, by, -bvx, -bv4, h_b, n_b, 0.0, 0.0
    )
    # joint run over [0, r]: u1 from its zero, d from u2(0) - u1(0) = u2(0)
    n_f, h_f = _steps_for(r, step)
    *_, u1, d = K.riccati_final(
        fam, wp, cp, cx, cy, cvx, cv4, h_f, n_f, 0.0, u2_at_center
    )
    if u1 <= 0.0 or d <= 0.0:
        raise InternalError("reciprocal slope lost positivity; step too coarse "
                            "for this metric")
    u2 = u1 + d
    return CurvatureGap(r, s_max, 1.0 / u1, 1.0 / u2, d / (u1 * u2))


def riccati_residual(surface, v, r_range, quantity="circle", step=DEFAULT_STEP):
    """max |kappa' + kappa^2 + K| over samples, kappa' by central differences.

    quantity "circle": curvature of circles centered at the base point of v,
    sampled along the radial geodesic.  quantity "asymptotic": the curvature
    at infinity evaluated along the geodesic, realized with a center 40 units
    behind the start of the range.
    """
    r0, r1 = float(r_range[0]), float(r_range[1])
    if not (0 < r0 < r1):
        raise ConfigError("need 0 < r0 < r1")
    fam, wp, cp = surface.packed()
    p, vec = v.as_arrays()

    x0, y0, vx0, v40 = state4(surface, p, vec)
    if quantity == "circle":
        sx, sy, svx, sv4 = x0, y0, vx0, v40
        offset = 0.0
    elif quantity == "asymptotic":
        back = 40.0
        n_b, h_b = _steps_for(back, step)
        bx, by, bvx, bv4 = K.geo_final(fam, wp, cp, x0, y0, -vx0, -v40, h_b, n_b)
        sx, sy, svx, sv4 = bx, by, -bvx, -bv4
        offset = back
    else:
        raise ConfigError(f"unknown quantity {quantity!r}")

    n, h = _steps_for(offset + r1, step)
    out = K.riccati_store(fam, wp, cp, sx, sy, svx, sv4, h, n, 0.0, 0.0)
    r = h * np.arange(n + 1) - offset
    mask = (r >= r0) & (r <= r1)
    idx = np.where(mask)[0]
    idx = idx[(idx > 1) & (idx < n)]
    u = out[:, 4]
    kappa = np.empty(n + 1)
    kappa[0] = np.nan  # u(0) = 0; curvature defined for r > 0 only
    kappa[1:] = 1.0 / u[1:]
    dk = (kappa[idx + 1] - kappa[idx - 1]) / (2.0 * h)
    ks = np.array([K.gauss_k(fam, wp, cp, out[i, 0], out[i, 1]) for i in idx])
    res = np.abs(dk + kappa[idx] ** 2 + ks)
    return float(res.max())
