"""Distance phase functions between a curve and an isometric copy.

phi(s, t) is the distance between the two curve points.  Critical points are
mutual-perpendicular configurations; there the mixed second derivative obeys
|d2 phi/ds dt| <= 1/phi, and the pure second derivatives decompose through
the curve curvature and the curvature of the geodesic circle through one
point centered at the other.
"""

import math

from horocurv import classify_critical, find_critical_points, shipped_configuration

print("== flat unit circle vs its translate by (4, 0)")
field = shipped_configuration("circle-translate")
search = find_critical_points(field, n=12)
print(f"{'s':>8} {'t':>8} {'phi':>5} {'d2s':>8} {'d2t':>8} {'mixed':>8} "
      f"{'det':>7} {'|mixed| phi':>11}")
for p in search.points:
    H = p.hessian
    print(f"{p.s:8.4f} {p.t:8.4f} {p.phi:5.2f} {H[0, 0]:8.4f} {H[1, 1]:8.4f} "
          f"{H[0, 1]:8.4f} {p.det:7.3f} {p.mixed_bound_value:11.6f}")
print("four distinct critical points (min, max, two saddles), all with")
print("|mixed| * phi <= 1; the minimum at (pi, 0) has diagonal 3/2 exactly")

print("\n== flat parallel lines at distance 2 (degenerate critical line s = t)")
lines = shipped_configuration("parallel-lines")
search = find_critical_points(lines, n=12)
print(f"found {len(search.points)} converged points, "
      f"degenerate-line flag: {search.degenerate_line}")
print(f"max |det(Hessian)| over the line: "
      f"{max(abs(p.det) for p in search.points):.2e}")
p = search.points[0]
print(f"|mixed| * phi = {p.mixed_bound_value:.9f}  (the bound saturates at 1)")

print("\n== hyperbolic plane: a geodesic vs its shift by 6 along the axis")
axis = shipped_configuration("axis-yshift")
rep = find_critical_points(axis, n=8).points[0]
H = rep.hessian
print(f"critical point at ({rep.s:.2e}, {rep.t:.2e}), phi = {rep.phi:.4f}")
print(f"diagonal = {H[0, 0]:.8f} (this is coth(6) = {1 / math.tanh(6):.8f}):")
print("both curves are geodesics, so the diagonal is pure circle curvature,")
print("pinned near 1 by the curvature at infinity even though phi is large")
cls = classify_critical(rep, 0.5)
print(f"classification at eps = 0.5: {cls.kind}, det = {cls.det:.6f} "
      f">= 3/4 eps^2 = {0.75 * 0.25:.4f}")
