"""Distance phase functions between disjoint curves and their derivatives.

For two disjoint unit-speed curves A(s), B(t) the phase is
phi(s, t) = d(A(s), B(t)).  Its first derivatives are inner products of the
curve tangents with the unit tangent of the connecting geodesic; its pure
second derivatives decompose geometrically as

    d2phi/ds2 = cos(theta) * (sign * kappa_curve + cos(theta) * kappa_circle)

where theta is the angle between the curve and the geodesic circle through
A(s) centered at B(t), kappa_circle is that circle's curvature, kappa_curve
the curve's geodesic curvature, and the sign is that of the inner product of
the curve's covariant acceleration with the outward radial direction.  The
mixed derivative has no closed geometric form and is obtained by central
differences of the exact first-derivative formula.

Critical points of the phase are mutual-perpendicular configurations; at any
critical point |d2phi/dsdt| * phi <= 1.
"""

import json
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import ConfigError, InternalError, PreconditionError
from .geodesics import DEFAULT_STEP, connect_core
from .jacobi import circle_curvature
from .surfaces import (
    christoffel_at,
    inner_g,
    metric_at,
    norm_g,
    preset,
    rotate90,
)

__all__ = [
    "ParamCurve",
    "line_curve",
    "circle_curve",
    "graph_curve",
    "sampled_curve",
    "transformed_curve",
    "unit_speed_reparam",
    "covariant_accel",
    "geodesic_curvature",
    "Isometry",
    "translation",
    "y_shift",
    "compose",
    "validate_isometry",
    "PhaseField",
    "phase",
    "phase_gradient",
    "phase_hessian",
    "phase_hessian_checked",
    "CriticalReport",
    "CriticalSearch",
    "find_critical_points",
    "Classification",
    "classify_critical",
    "shipped_configuration",
    "SHIPPED_CONFIGURATIONS",
]


# ---------------------------------------------------------------------------
# parametrized curves


@dataclass(frozen=True)
class ParamCurve:
    """A plane curve with vectorized point/velocity/acceleration evaluators."""

    kind: str
    _point: object
    _velocity: object
    _accel: object

    def point(self, t):
        return self._point(np.asarray(t, dtype=float))

    def velocity(self, t):
        return self._velocity(np.asarray(t, dtype=float))

    def accel(self, t):
        return self._accel(np.asarray(t, dtype=float))


def line_curve(point, direction):
    """gamma(t) = point + t * direction, direction normalized (coordinates)."""
    p = np.asarray(point, dtype=float)
    d = np.asarray(direction, dtype=float)
    d = d / math.hypot(d[0], d[1])
    return ParamCurve(
        "line",
        lambda t: np.stack([p[0] + t * d[0], p[1] + t * d[1]], axis=-1),
        lambda t: np.stack([np.broadcast_to(d[0], np.shape(t)),
                            np.broadcast_to(d[1], np.shape(t))], axis=-1).astype(float),
        lambda t: np.zeros(np.shape(t) + (2,)),
    )


def circle_curve(center, radius):
    """Coordinate circle parametrized by arc length (angle = t / radius)."""
    c = np.asarray(center, dtype=float)
    R = float(radius)
    return ParamCurve(
        "circle",
        lambda t: np.stack([c[0] + R * np.cos(t / R), c[1] + R * np.sin(t / R)], axis=-1),
        lambda t: np.stack([-np.sin(t / R), np.cos(t / R)], axis=-1),
        lambda t: np.stack([-np.cos(t / R) / R, -np.sin(t / R) / R], axis=-1),
    )


def graph_curve(coeffs):
    """gamma(t) = (t, p(t)) for the polynomial p with ascending coefficients."""
    c = np.asarray(coeffs, dtype=float)
    dc = np.polynomial.polynomial.polyder(c)
    ddc = np.polynomial.polynomial.polyder(c, 2)
    pv = np.polynomial.polynomial.polyval
    return ParamCurve(
        "graph",
        lambda t: np.stack([t, pv(t, c)], axis=-1),
        lambda t: np.stack([np.ones(np.shape(t)), pv(t, dc)], axis=-1),
        lambda t: np.stack([np.zeros(np.shape(t)), pv(t, ddc)], axis=-1),
    )


def sampled_curve(ts, points):
    """Cubic spline through sample points."""
    sp = CubicSpline(np.asarray(ts, dtype=float), np.asarray(points, dtype=float))
    d1 = sp.derivative(1)
    d2 = sp.derivative(2)
    return ParamCurve("sampled", lambda t: sp(t), lambda t: d1(t), lambda t: d2(t))


def transformed_curve(curve, isometry):
    """The curve pushed forward by an isometry (our isometries have identity
    differential, so velocity/acceleration components are unchanged)."""
    return ParamCurve(
        f"{curve.kind}+{isometry.kind}",
        lambda t: isometry.apply(curve.point(t)),
        lambda t: curve.velocity(t),
        lambda t: curve.accel(t),
    )


def _speed(surface, curve, t):
    v = curve.velocity(t)
    if v.ndim == 1:
        return norm_g(surface, curve.point(t), v)
    pts = curve.point(t)
    return np.array([norm_g(surface, pts[i], v[i]) for i in range(len(v))])


def unit_speed_reparam(surface, curve, window, samples=4096):
    """Reparametrize by g-arc-length over the window.

    Returns (curve, new_window) with the new parameter running over
    [0, total length].  Velocity uses the chain rule; acceleration falls back
    to a central difference of the velocity at 1e-5.
    """
    lo, hi = float(window[0]), float(window[1])
    ts = np.linspace(lo, hi, samples)
    sp = _speed(surface, curve, ts)
    sigma = np.concatenate([[0.0], np.cumsum(0.5 * (sp[1:] + sp[:-1]) * np.diff(ts))])
    tau = PchipInterpolator(sigma, ts)

    def pnt(s):
        return curve.point(tau(s))

    def vel(s):
        t = tau(s)
        return curve.velocity(t) / np.expand_dims(np.maximum(_speed(surface, curve, t), 1e-300), -1)

    def acc(s, eps=1e-5):
        return (vel(np.asarray(s) + eps) - vel(np.asarray(s) - eps)) / (2.0 * eps)

    new = ParamCurve(curve.kind + "-arclength", pnt, vel, acc)
    return new, (0.0, float(sigma[-1]))


def covariant_accel(surface, curve, t):
    """D/dt of the curve velocity: gamma'' + Gamma(gamma', gamma')."""
    p = curve.point(t)
    v = curve.velocity(t)
    a = curve.accel(t)
    G = christoffel_at(surface, p)
    corr = np.array([v @ G[0] @ v, v @ G[1] @ v])
    return a + corr


def geodesic_curvature(surface, curve, t):
    """|D/dt gamma'|_g for a unit-speed curve; zero exactly for geodesics."""
    return norm_g(surface, curve.point(t), covariant_accel(surface, curve, t))


# ---------------------------------------------------------------------------
# isometries


@dataclass(frozen=True)
class Isometry:
    """Coordinate translations (including y-shifts of warped products)."""

    kind: str
    vector: tuple = (0.0, 0.0)
    parts: tuple = ()

    def apply(self, p):
        p = np.asarray(p, dtype=float)
        if self.kind == "composition":
            for part in self.parts:
                p = part.apply(p)
            return p
        return p + np.asarray(self.vector)

    def differential(self, vec):
        return np.asarray(vec, dtype=float)

    def inverse(self):
        if self.kind == "composition":
            return Isometry("composition", parts=tuple(p.inverse() for p in reversed(self.parts)))
        return Isometry(self.kind, (-self.vector[0], -self.vector[1]))


def translation(vx, vy):
    return Isometry("translation", (float(vx), float(vy)))


def y_shift(c):
    """y -> y + c; an isometry of every warped product."""
    return Isometry("y-shift", (0.0, float(c)))


def compose(*parts):
    return Isometry("composition", parts=tuple(parts))


def validate_isometry(surface, iso, n=20, tol=1e-10, seed=0):
    """Check the metric pullback equals the metric at n random points."""
    rng = np.random.default_rng(seed)
    for _ in range(n):
        p = rng.uniform(-2.0, 2.0, size=2)
        q = iso.apply(p)
        g_p = metric_at(surface, p)
        g_q = metric_at(surface, q)  # differential is the identity
        scale = np.max(np.abs(g_p)) + 1.0
        if np.max(np.abs(g_q - g_p)) > tol * scale:
            raise ConfigError(
                f"{iso.kind} by {iso.vector} is not an isometry of {surface.name}: "
                f"metric mismatch at {tuple(p)}"
            )
    return True


# ---------------------------------------------------------------------------
# the phase field


class PhaseField:
    """phi(s, t) = distance between curve A at s and curve B at t.

    Connecting-geodesic data is cached per (s, t); cache access is guarded by
    a lock so concurrent evaluators may share a field.  The curves must be
    unit-speed and disjoint over the parameter windows.
    """

    def __init__(self, surface, curve_a, curve_b, window_s, window_t,
                 connect_tol=1e-10, step=DEFAULT_STEP, max_iter=60, check=True):
        self.surface = surface
        self.curve_a = curve_a
        self.curve_b = curve_b
        self.window_s = (float(window_s[0]), float(window_s[1]))
        self.window_t = (float(window_t[0]), float(window_t[1]))
        self.connect_tol = connect_tol
        self.step = step
        self.max_iter = max_iter
        self._cache = {}
        self._lock = threading.Lock()
        if check:
            self._check_unit_speed()
            self._check_disjoint()

    @classmethod
    def from_isometry(cls, surface, base_curve, isometry, window_s, window_t=None, **kw):
        """A-curve = isometry applied to the base curve, B-curve = the base."""
        validate_isometry(surface, isometry)
        return cls(surface, transformed_curve(base_curve, isometry), base_curve,
                   window_s, window_t if window_t is not None else window_s, **kw)

    def _check_unit_speed(self):
        for name, curve, win in (("A", self.curve_a, self.window_s),
                                 ("B", self.curve_b, self.window_t)):
            ts = np.linspace(win[0], win[1], 64)
            sp = _speed(self.surface, curve, ts)
            worst = float(np.max(np.abs(sp - 1.0)))
            if worst > 1e-8:
                raise ConfigError(
                    f"curve {name} is not unit-speed on its window "
                    f"(max | |gamma'|-1 | = {worst:.2e}); use unit_speed_reparam"
                )

    def _check_disjoint(self, n=200, min_sep=1e-3):
        a = self.curve_a.point(np.linspace(*self.window_s, n))
        b = self.curve_b.point(np.linspace(*self.window_t, n))
        d2 = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=-1)
        if d2.min() < min_sep**2:
            raise ConfigError(
                f"curves come within {math.sqrt(d2.min()):.2e} of each other; "
                "the phase is only defined for disjoint curves"
            )
        # a point grid can miss a transversal crossing; test the sampled
        # polylines for segment intersections as well
        def orient(p, q, r):
            return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                    - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))

        a0 = a[:-1, None, :]
        a1 = a[1:, None, :]
        b0 = b[None, :-1, :]
        b1 = b[None, 1:, :]
        cross = ((orient(a0, a1, b0) * orient(a0, a1, b1) < 0)
                 & (orient(b0, b1, a0) * orient(b0, b1, a1) < 0))
        if bool(np.any(cross)):
            raise ConfigError("curves cross each other on the sampled windows; "
                              "the phase is only defined for disjoint curves")

    # -- connecting geodesic data ------------------------------------------

    def _data(self, s, t):
        key = (float(s), float(t))
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        a = self.curve_a.point(s)
        b = self.curve_b.point(t)
        if self.surface.is_flat:
            chord = a - b
            phi = norm_g(self.surface, b, chord)
            tdir = chord / phi
            entry = {"phi": phi, "t_start": tdir, "t_end": tdir.copy(),
                     "a": a, "b": b, "kappa_a": 1.0 / phi, "kappa_b": 1.0 / phi}
        else:
            core = connect_core(self.surface, b, a, tol=self.connect_tol,
                                step=self.step, max_iter=self.max_iter)
            entry = {"phi": core.length, "t_start": core.v_start,
                     "t_end": core.v_end, "a": a, "b": b,
                     "kappa_a": None, "kappa_b": None}
        with self._lock:
            self._cache[key] = entry
        return entry

    def _kappa(self, entry, which):
        key = "kappa_a" if which == "a" else "kappa_b"
        if entry[key] is None:
            if which == "a":
                center, direction = entry["b"], entry["t_start"]
            else:
                center, direction = entry["a"], -entry["t_end"]
            entry[key] = circle_curvature(self.surface, center, direction,
                                          entry["phi"], step=self.step)
        return entry[key]

    # -- evaluators ----------------------------------------------------------

    def phase(self, s, t):
        return self._data(s, t)["phi"]

    def gradient(self, s, t):
        e = self._data(s, t)
        ds = inner_g(self.surface, e["a"], self.curve_a.velocity(s), e["t_end"])
        dt = -inner_g(self.surface, e["b"], self.curve_b.velocity(t), e["t_start"])
        return np.array([ds, dt])

    def _pure_second(self, s, t, which):
        """cos(theta) * (sign * kappa_curve + cos(theta) * kappa_circle)."""
        e = self._data(s, t)
        if which == "a":
            curve, arg, point = self.curve_a, s, e["a"]
            radial = e["t_end"]      # outward from center B(t)
        else:
            curve, arg, point = self.curve_b, t, e["b"]
            radial = -e["t_start"]   # outward from center A(s)
        circ_dir = rotate90(self.surface, point, radial)
        cos_th = min(abs(inner_g(self.surface, point, curve.velocity(arg), circ_dir)), 1.0)
        acc = covariant_accel(self.surface, curve, arg)
        kg = norm_g(self.surface, point, acc)
        sign = 1.0 if inner_g(self.surface, point, acc, radial) >= 0.0 else -1.0
        kap = self._kappa(e, which)
        parts = (math.acos(cos_th), kg, kap, sign)
        return cos_th * (sign * kg + cos_th * kap), parts

    def hessian(self, s, t, fd_step=1e-4):
        dss, _ = self._pure_second(s, t, "a")
        dtt, _ = self._pure_second(s, t, "b")
        mixed = (self.gradient(s, t + fd_step)[0] - self.gradient(s, t - fd_step)[0]) / (2.0 * fd_step)
        return np.array([[dss, mixed], [mixed, dtt]])

    def phase_grid(self, svals, tvals):
        """phi on the tensor grid; closed-form and vectorized on flat surfaces."""
        svals = np.asarray(svals, dtype=float)
        tvals = np.asarray(tvals, dtype=float)
        a = self.curve_a.point(svals)
        b = self.curve_b.point(tvals)
        if self.surface.is_flat:
            g = metric_at(self.surface, (0.0, 0.0))
            dx = a[:, 0, None] - b[None, :, 0]
            dy = a[:, 1, None] - b[None, :, 1]
            return np.sqrt(g[0, 0] * dx * dx + g[1, 1] * dy * dy)
        out = np.empty((len(svals), len(tvals)))
        for i, s in enumerate(svals):
            for j, t in enumerate(tvals):
                out[i, j] = self.phase(s, t)
        return out

    def heatmap_csv(self, path, n=64, config_hash=""):
        import csv as _csv

        svals = np.linspace(*self.window_s, n)
        tvals = np.linspace(*self.window_t, n)
        grid = self.phase_grid(svals, tvals)
        with open(path, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["s", "t", "phi", "config_sha256"])
            for i, s in enumerate(svals):
                for j, t in enumerate(tvals):
                    w.writerow([f"{s:.17g}", f"{t:.17g}", f"{grid[i, j]:.17g}", config_hash])


def phase(field, s, t):
    return field.phase(s, t)


def phase_gradient(field, s, t):
    return field.gradient(s, t)


def phase_hessian(field, s, t):
    return field.hessian(s, t)


def phase_hessian_checked(field, s, t, fd=None):
    """Hessian plus its worst deviation from second central differences.

    Points where the geometric decomposition and the finite differences of
    the numerically computed distance disagree by more than 1e-3 are flagged.
    """
    H = field.hessian(s, t)
    if fd is None:
        fd = 1e-3 if field.surface.is_flat else 5e-3
    f = field.phase
    c = f(s, t)
    fd_ss = (f(s + fd, t) - 2.0 * c + f(s - fd, t)) / fd**2
    fd_tt = (f(s, t + fd) - 2.0 * c + f(s, t - fd)) / fd**2
    fd_st = (f(s + fd, t + fd) - f(s + fd, t - fd) - f(s - fd, t + fd) + f(s - fd, t - fd)) / (4.0 * fd**2)
    disc = float(max(abs(H[0, 0] - fd_ss), abs(H[1, 1] - fd_tt), abs(H[0, 1] - fd_st)))
    return H, disc, disc > 1e-3


# ---------------------------------------------------------------------------
# critical points


@dataclass(frozen=True)
class CriticalReport:
    """A converged critical point of the phase with its classification data."""

    s: float
    t: float
    phi: float
    grad_norm: float
    hessian: np.ndarray
    det: float
    mixed_bound_value: float   # |d2phi/dsdt| * phi, <= 1 at true critical points
    mixed_bound_ok: bool
    theta: float
    kappa_curve: float
    kappa_circle: float
    sign: float

    def to_dict(self):
        return {
            "s": self.s,
            "t": self.t,
            "phi": self.phi,
            "grad_norm": self.grad_norm,
            "hessian": [list(map(float, row)) for row in self.hessian],
            "det": self.det,
            "mixed_bound_value": self.mixed_bound_value,
            "mixed_bound_ok": self.mixed_bound_ok,
            "theta": self.theta,
            "kappa_curve": self.kappa_curve,
            "kappa_circle": self.kappa_circle,
            "sign": self.sign,
        }


@dataclass(frozen=True)
class CriticalSearch:
    points: tuple
    degenerate_line: bool

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump({"degenerate_line": self.degenerate_line,
                       "points": [p.to_dict() for p in self.points]}, fh, indent=2)


def _make_report(field, s, t, mixed_tol=1e-4):
    e = field._data(s, t)
    g = field.gradient(s, t)
    H = field.hessian(s, t)
    det = float(H[0, 0] * H[1, 1] - H[0, 1] * H[1, 0])
    _, parts = field._pure_second(s, t, "a")
    bound = abs(H[0, 1]) * e["phi"]
    return CriticalReport(
        s=float(s), t=float(t), phi=float(e["phi"]),
        grad_norm=float(np.max(np.abs(g))), hessian=H, det=det,
        mixed_bound_value=float(bound), mixed_bound_ok=bool(bound <= 1.0 + mixed_tol),
        theta=float(parts[0]), kappa_curve=float(parts[1]),
        kappa_circle=float(parts[2]), sign=float(parts[3]),
    )


def find_critical_points(field, n=16, newton_tol=1e-9, max_iter=50, dedup_tol=1e-6):
    """Coarse sign-change scan on an n x n grid, then 2-D Newton on the gradient.

    Cells where both gradient components change sign seed a Newton iteration
    (least-squares steps, so critical manifolds with singular Hessians still
    converge).  If at least n distinct points land within 1e-4 of a common
    straight line, the search is flagged as a degenerate critical line.
    """
    if n < 8:
        raise ConfigError("coarse grid must be at least 8 x 8")
    s_nodes = np.linspace(*field.window_s, n + 1)
    t_nodes = np.linspace(*field.window_t, n + 1)
    gs = np.empty((n + 1, n + 1))
    gt = np.empty((n + 1, n + 1))
    for i, s in enumerate(s_nodes):
        for j, t in enumerate(t_nodes):
            gs[i, j], gt[i, j] = field.gradient(s, t)

    cell = max(s_nodes[1] - s_nodes[0], t_nodes[1] - t_nodes[0])
    seeds = []
    for i in range(n):
        for j in range(n):
            cs = gs[i:i + 2, j:j + 2]
            ct = gt[i:i + 2, j:j + 2]
            if cs.min() <= 0.0 <= cs.max() and ct.min() <= 0.0 <= ct.max():
                seeds.append((0.5 * (s_nodes[i] + s_nodes[i + 1]),
                              0.5 * (t_nodes[j] + t_nodes[j + 1])))

    lo_s, hi_s = field.window_s
    lo_t, hi_t = field.window_t
    found = []
    for s0, t0 in seeds:
        s, t = s0, t0
        g = field.gradient(s, t)
        err = float(np.max(np.abs(g)))
        converged = err <= newton_tol
        for _ in range(max_iter):
            if converged:
                break
            H = field.hessian(s, t)
            step_vec = np.linalg.lstsq(H, -g, rcond=None)[0]
            norm = float(np.max(np.abs(step_vec)))
            if norm > 1.5 * cell:
                step_vec *= 1.5 * cell / norm
            improved = False
            scale = 1.0
            for _ in range(6):
                s_try, t_try = s + scale * step_vec[0], t + scale * step_vec[1]
                g_try = field.gradient(s_try, t_try)
                err_try = float(np.max(np.abs(g_try)))
                if err_try < err:
                    s, t, g, err = s_try, t_try, g_try, err_try
                    improved = True
                    break
                scale *= 0.5
            if not improved:
                break
            converged = err <= newton_tol
        if not converged:
            continue
        if not (lo_s - cell <= s <= hi_s + cell and lo_t - cell <= t <= hi_t + cell):
            continue
        if any(abs(s - p[0]) < dedup_tol and abs(t - p[1]) < dedup_tol for p in found):
            continue
        found.append((s, t))

    degenerate = False
    if len(found) >= n:
        pts = np.array(found)
        pts = pts - pts.mean(axis=0)
        sv = np.linalg.svd(pts, compute_uv=False)
        degenerate = bool(sv[-1] <= 1e-4 * max(1.0, sv[0]))

    reports = tuple(_make_report(field, s, t) for s, t in sorted(found))
    return CriticalSearch(reports, degenerate)


@dataclass(frozen=True)
class Classification:
    kind: str  # "nondegenerate" | "degenerate"
    det: float
    margin: float


def classify_critical(report, eps, tol=1e-9):
    """Far-regime classification with the explicit margin |det| >= 3/4 eps^2.

    Requires phi >= 2/eps so the critical-point mixed bound gives
    |d2phi/dsdt| <= eps/2; then diagonal entries of size >= eps force a
    nonzero Hessian determinant.
    """
    if report.phi < 2.0 / eps:
        raise PreconditionError(
            f"phi = {report.phi:.6g} < 2/eps = {2.0 / eps:.6g}: point is not in "
            "the far regime for this eps"
        )
    H = report.hessian
    if abs(H[0, 0]) >= eps and abs(H[1, 1]) >= eps and abs(H[0, 1]) <= 0.5 * eps:
        floor = 0.75 * eps * eps
        if abs(report.det) < floor - tol:
            raise InternalError(
                f"determinant {report.det} below guaranteed floor {floor}"
            )
        return Classification("nondegenerate", report.det, abs(report.det) - floor)
    return Classification("degenerate", report.det, 0.0)


# ---------------------------------------------------------------------------
# shipped configurations

SHIPPED_CONFIGURATIONS = ("parallel-lines", "circle-translate", "axis-yshift",
                          "line-far-arc")


def shipped_configuration(name, **kw):
    """Named curve/isometry setups used by the verification suite and demos."""
    if name == "parallel-lines":
        return PhaseField.from_isometry(
            preset("flat"), line_curve((0.0, 0.0), (1.0, 0.0)), translation(0.0, 2.0),
            (-1.5, 1.5), **kw,
        )
    if name == "circle-translate":
        return PhaseField.from_isometry(
            preset("flat"), circle_curve((0.0, 0.0), 1.0), translation(4.0, 0.0),
            (0.0, 2.0 * math.pi), **kw,
        )
    if name == "axis-yshift":
        return PhaseField.from_isometry(
            preset("hyperbolic"), line_curve((0.0, 0.0), (1.0, 0.0)), y_shift(6.0),
            (-1.2, 1.2), **kw,
        )
    if name == "line-far-arc":
        return PhaseField(
            preset("flat"), circle_curve((6.0, 5.0), 1.0),
            line_curve((0.0, 0.0), (1.0, 0.0)), (-0.5, 0.5), (-0.5, 0.5), **kw,
        )
    raise ConfigError(
        f"unknown configuration {name!r}; known: {SHIPPED_CONFIGURATIONS}"
    )
