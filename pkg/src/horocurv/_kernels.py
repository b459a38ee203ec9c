"""Compiled inner loops.

All metric families are packed into plain float64 arrays so every kernel can
be numba-compiled:

* warped product ``ds^2 = dx^2 + f(x)^2 dy^2`` with
  ``f(x) = sum_k wp[1+k] * cosh(wp[0]*x)**k``
* conformal ``ds^2 = exp(2u) (dx^2 + dy^2)`` with
  ``u(x, y) = sum_ij cp[i, j] * x**i * y**j``

Integrators are classic fixed-step fourth-order Runge-Kutta.  The scalar
curvature ODEs ride along with the geodesic in one joint state so curvature
is always evaluated at the exact stage positions.

Far from the axis of a warped metric, f overflows float64 while 1/f
underflows, so the integrator state carries the conserved covariant momentum
``py = f^2 vy`` in the fourth slot instead of vy, and the warp profile enters
only through the bounded ratios f'/f, f''/f and 1/f.  This keeps hyperbolic
runs finite out to |x| in the thousands.  For conformal metrics the fourth
slot is plain vy.
"""

import math

import numpy as np
from numba import njit

WARPED = 0
CONFORMAL = 1

_EMPTY_WP = np.zeros(0)
_EMPTY_CP = np.zeros((0, 0))


@njit(cache=True, nogil=True)
def warped_f(wp, x):
    """f, f', f'' for the cosh-polynomial warp profile (moderate x only)."""
    a = wp[0]
    z = math.cosh(a * x)
    s = math.sinh(a * x)
    p = 0.0
    p1 = 0.0
    p2 = 0.0
    for k in range(wp.shape[0] - 1):
        c = wp[wp.shape[0] - 1 - k]
        p2 = p2 * z + p1
        p1 = p1 * z + p
        p = p * z + c
    fp = p1 * a * s
    fpp = 2.0 * p2 * (a * s) * (a * s) + p1 * a * a * z
    return p, fp, fpp


@njit(cache=True, nogil=True)
def warped_ratios(wp, x):
    """(f'/f, f''/f, 1/f) via polynomials in w = 1/cosh; finite for all x.

    With P(z) = sum c_k z^k and m = deg P:
        f'/f  = a tanh(ax) * R/Q,   f''/f = a^2 (tanh^2 * T/Q + R/Q),
        1/f   = w^m / Q,
    where Q = sum c_k w^(m-k), R = sum k c_k w^(m-k), T = sum k(k-1) c_k w^(m-k).
    """
    m = wp.shape[0] - 2
    if m == 0:  # constant profile (flat up to a y-rescaling)
        return 0.0, 0.0, 1.0 / wp[1]
    a = wp[0]
    t = math.tanh(a * x)
    z = math.cosh(a * x)
    w = 1.0 / z  # underflows to exactly 0 once cosh overflows
    q = 0.0
    r = 0.0
    tt = 0.0
    for k in range(m + 1):
        c = wp[1 + k]
        q = q * w + c
        r = r * w + k * c
        tt = tt * w + k * (k - 1) * c
    fp_f = a * t * (r / q)
    fpp_f = a * a * (t * t * (tt / q) + r / q)
    inv_f = w**m / q
    return fp_f, fpp_f, inv_f


@njit(cache=True, nogil=True)
def conformal_u(cp, x, y):
    """u, u_x, u_y, u_xx, u_yy for the polynomial conformal factor."""
    u = 0.0
    ux = 0.0
    uy = 0.0
    uxx = 0.0
    uyy = 0.0
    ni, nj = cp.shape
    xi = 1.0   # x^i
    xim = 0.0  # i x^(i-1)
    ximm = 0.0  # i (i-1) x^(i-2)
    for i in range(ni):
        yj = 1.0
        yjm = 0.0
        yjmm = 0.0
        for j in range(nj):
            a = cp[i, j]
            if a != 0.0:
                u += a * xi * yj
                ux += a * xim * yj
                uy += a * xi * yjm
                uxx += a * ximm * yj
                uyy += a * xi * yjmm
            yjmm = yjmm * y + 2.0 * yjm
            yjm = yjm * y + yj
            yj *= y
        ximm = ximm * x + 2.0 * xim
        xim = xim * x + xi
        xi *= x
    return u, ux, uy, uxx, uyy


@njit(cache=True, nogil=True)
def gauss_k(fam, wp, cp, x, y):
    if fam == WARPED:
        _, fpp_f, _ = warped_ratios(wp, x)
        return -fpp_f
    u, _, _, uxx, uyy = conformal_u(cp, x, y)
    return -math.exp(-2.0 * u) * (uxx + uyy)


@njit(cache=True, nogil=True)
def deriv4(fam, wp, cp, x, y, vx, v4):
    """State derivative; v4 is py = f^2 vy for warped, plain vy for conformal."""
    if fam == WARPED:
        fp_f, _, inv_f = warped_ratios(wp, x)
        beta = v4 * inv_f  # the bounded frame component f*vy
        return vx, beta * inv_f, fp_f * beta * beta, 0.0
    vy = v4
    _, ux, uy, _, _ = conformal_u(cp, x, y)
    ax = -(ux * vx * vx + 2.0 * uy * vx * vy - ux * vy * vy)
    ay = -(-uy * vx * vx + 2.0 * ux * vx * vy + uy * vy * vy)
    return vx, vy, ax, ay


@njit(cache=True, nogil=True)
def deriv4k(fam, wp, cp, x, y, vx, v4):
    """deriv4 plus the curvature K, sharing one metric evaluation."""
    if fam == WARPED:
        fp_f, fpp_f, inv_f = warped_ratios(wp, x)
        beta = v4 * inv_f
        return vx, beta * inv_f, fp_f * beta * beta, 0.0, -fpp_f
    vy = v4
    u, ux, uy, uxx, uyy = conformal_u(cp, x, y)
    ax = -(ux * vx * vx + 2.0 * uy * vx * vy - ux * vy * vy)
    ay = -(-uy * vx * vx + 2.0 * ux * vx * vy + uy * vy * vy)
    return vx, vy, ax, ay, -math.exp(-2.0 * u) * (uxx + uyy)


@njit(cache=True, nogil=True)
def v4_of_vy(fam, wp, cp, x, vy):
    if fam == WARPED:
        f, _, _ = warped_f(wp, x)
        return f * f * vy
    return vy


@njit(cache=True, nogil=True)
def vy_of_v4(fam, wp, cp, x, v4):
    if fam == WARPED:
        _, _, inv_f = warped_ratios(wp, x)
        return v4 * inv_f * inv_f
    return v4


@njit(cache=True, nogil=True)
def rows_v4_to_vy(fam, wp, cp, out):
    if fam == WARPED:
        for i in range(out.shape[0]):
            out[i, 3] = vy_of_v4(fam, wp, cp, out[i, 0], out[i, 3])


@njit(cache=True, nogil=True)
def _geo_step(fam, wp, cp, x, y, vx, v4, h):
    a1, b1, c1, d1 = deriv4(fam, wp, cp, x, y, vx, v4)
    a2, b2, c2, d2 = deriv4(
        fam, wp, cp, x + 0.5 * h * a1, y + 0.5 * h * b1,
        vx + 0.5 * h * c1, v4 + 0.5 * h * d1,
    )
    a3, b3, c3, d3 = deriv4(
        fam, wp, cp, x + 0.5 * h * a2, y + 0.5 * h * b2,
        vx + 0.5 * h * c2, v4 + 0.5 * h * d2,
    )
    a4, b4, c4, d4 = deriv4(
        fam, wp, cp, x + h * a3, y + h * b3, vx + h * c3, v4 + h * d3,
    )
    xn = x + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    yn = y + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    vxn = vx + h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    v4n = v4 + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
    return xn, yn, vxn, v4n


@njit(cache=True, nogil=True)
def geo_final(fam, wp, cp, x, y, vx, v4, h, n):
    for _ in range(n):
        x, y, vx, v4 = _geo_step(fam, wp, cp, x, y, vx, v4, h)
    return x, y, vx, v4


@njit(cache=True, nogil=True)
def geo_store(fam, wp, cp, x, y, vx, v4, h, n):
    out = np.empty((n + 1, 4))
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = vx
    out[0, 3] = v4
    for k in range(n):
        x, y, vx, v4 = _geo_step(fam, wp, cp, x, y, vx, v4, h)
        out[k + 1, 0] = x
        out[k + 1, 1] = y
        out[k + 1, 2] = vx
        out[k + 1, 3] = v4
    return out


@njit(cache=True, nogil=True)
def _jacobi_step(fam, wp, cp, x, y, vx, v4, hv, dhv, h):
    # joint state: geodesic + scalar (hv'' = -K hv)
    a1, b1, c1, d1, K1 = deriv4k(fam, wp, cp, x, y, vx, v4)
    e1 = -K1 * hv
    f1 = dhv

    x2 = x + 0.5 * h * a1
    y2 = y + 0.5 * h * b1
    vx2 = vx + 0.5 * h * c1
    v42 = v4 + 0.5 * h * d1
    h2 = hv + 0.5 * h * f1
    dh2 = dhv + 0.5 * h * e1
    a2, b2, c2, d2, K2 = deriv4k(fam, wp, cp, x2, y2, vx2, v42)
    e2 = -K2 * h2
    f2 = dh2

    x3 = x + 0.5 * h * a2
    y3 = y + 0.5 * h * b2
    vx3 = vx + 0.5 * h * c2
    v43 = v4 + 0.5 * h * d2
    h3 = hv + 0.5 * h * f2
    dh3 = dhv + 0.5 * h * e2
    a3, b3, c3, d3, K3 = deriv4k(fam, wp, cp, x3, y3, vx3, v43)
    e3 = -K3 * h3
    f3 = dh3

    x4 = x + h * a3
    y4 = y + h * b3
    vx4 = vx + h * c3
    v44 = v4 + h * d3
    h4 = hv + h * f3
    dh4 = dhv + h * e3
    a4, b4, c4, d4, K4 = deriv4k(fam, wp, cp, x4, y4, vx4, v44)
    e4 = -K4 * h4
    f4 = dh4

    xn = x + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    yn = y + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    vxn = vx + h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    v4n = v4 + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
    hn = hv + h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4)
    dhn = dhv + h / 6.0 * (e1 + 2.0 * e2 + 2.0 * e3 + e4)
    return xn, yn, vxn, v4n, hn, dhn


@njit(cache=True, nogil=True)
def jacobi_final(fam, wp, cp, x, y, vx, v4, h, n, h0, dh0):
    hv = h0
    dhv = dh0
    for _ in range(n):
        x, y, vx, v4, hv, dhv = _jacobi_step(fam, wp, cp, x, y, vx, v4, hv, dhv, h)
    return x, y, vx, v4, hv, dhv


@njit(cache=True, nogil=True)
def jacobi_store(fam, wp, cp, x, y, vx, v4, h, n, h0, dh0):
    out = np.empty((n + 1, 6))
    hv = h0
    dhv = dh0
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = vx
    out[0, 3] = v4
    out[0, 4] = hv
    out[0, 5] = dhv
    for k in range(n):
        x, y, vx, v4, hv, dhv = _jacobi_step(fam, wp, cp, x, y, vx, v4, hv, dhv, h)
        out[k + 1, 0] = x
        out[k + 1, 1] = y
        out[k + 1, 2] = vx
        out[k + 1, 3] = v4
        out[k + 1, 4] = hv
        out[k + 1, 5] = dhv
    return out


@njit(cache=True, nogil=True)
def _riccati_step(fam, wp, cp, x, y, vx, v4, u, d, h):
    # u is the reciprocal slope of the radial Jacobi solution (u' = 1 + K u^2,
    # circle curvature = 1/u); d carries the difference of two such solutions
    # through its own linear equation d' = K (2u + d) d, so the sign of d is
    # preserved exactly even when the two curvatures agree to 1e-14.
    a1, b1, c1, d1, K1 = deriv4k(fam, wp, cp, x, y, vx, v4)
    p1 = 1.0 + K1 * u * u
    q1 = K1 * (2.0 * u + d) * d

    x2 = x + 0.5 * h * a1
    y2 = y + 0.5 * h * b1
    vx2 = vx + 0.5 * h * c1
    v42 = v4 + 0.5 * h * d1
    u2 = u + 0.5 * h * p1
    dd2 = d + 0.5 * h * q1
    a2, b2, c2, d2, K2 = deriv4k(fam, wp, cp, x2, y2, vx2, v42)
    p2 = 1.0 + K2 * u2 * u2
    q2 = K2 * (2.0 * u2 + dd2) * dd2

    x3 = x + 0.5 * h * a2
    y3 = y + 0.5 * h * b2
    vx3 = vx + 0.5 * h * c2
    v43 = v4 + 0.5 * h * d2
    u3 = u + 0.5 * h * p2
    dd3 = d + 0.5 * h * q2
    a3, b3, c3, d3, K3 = deriv4k(fam, wp, cp, x3, y3, vx3, v43)
    p3 = 1.0 + K3 * u3 * u3
    q3 = K3 * (2.0 * u3 + dd3) * dd3

    x4 = x + h * a3
    y4 = y + h * b3
    vx4 = vx + h * c3
    v44 = v4 + h * d3
    u4 = u + h * p3
    dd4 = d + h * q3
    a4, b4, c4, d4, K4 = deriv4k(fam, wp, cp, x4, y4, vx4, v44)
    p4 = 1.0 + K4 * u4 * u4
    q4 = K4 * (2.0 * u4 + dd4) * dd4

    xn = x + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
    yn = y + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    vxn = vx + h / 6.0 * (c1 + 2.0 * c2 + 2.0 * c3 + c4)
    v4n = v4 + h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4)
    un = u + h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4)
    dn = d + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4)
    return xn, yn, vxn, v4n, un, dn


@njit(cache=True, nogil=True)
def riccati_final(fam, wp, cp, x, y, vx, v4, h, n, u0, d0):
    u = u0
    d = d0
    for _ in range(n):
        x, y, vx, v4, u, d = _riccati_step(fam, wp, cp, x, y, vx, v4, u, d, h)
    return x, y, vx, v4, u, d


@njit(cache=True, nogil=True)
def riccati_store(fam, wp, cp, x, y, vx, v4, h, n, u0, d0):
    out = np.empty((n + 1, 6))
    u = u0
    d = d0
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = vx
    out[0, 3] = v4
    out[0, 4] = u
    out[0, 5] = d
    for k in range(n):
        x, y, vx, v4, u, d = _riccati_step(fam, wp, cp, x, y, vx, v4, u, d, h)
        out[k + 1, 0] = x
        out[k + 1, 1] = y
        out[k + 1, 2] = vx
        out[k + 1, 3] = v4
        out[k + 1, 4] = u
        out[k + 1, 5] = d
    return out
