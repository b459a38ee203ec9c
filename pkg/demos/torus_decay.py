"""Period integrals of single-frequency torus waves, and 2-D stationary phase.

A wave aligned with a straight line contributes |integral| = 2 pi at every
frequency (no decay).  Over the unit circle the integral is 2 pi J0(lam),
decaying like lam^(-1/2).  The 2-D analogues over curve pairs decay like
lam^(-1) when every critical point of the distance phase is nondegenerate
and like lam^(-1/2) when a whole critical line survives.
"""

import math

from horocurv import (
    LatticeEigenfunction,
    bump_window,
    circle_curve,
    closed_window,
    decay_fit,
    line_curve,
    oscillatory_integral_2d,
    period_integral,
    shipped_configuration,
)

window = closed_window(2 * math.pi)
circle = circle_curve((0, 0), 1.0)
line = line_curve((0, 0), (1, 0))

print("single-frequency integrals over one period:")
print(f"{'lam':>5} {'|circle integral|':>18} {'|line, aligned|':>16}")
series = []
for lam in range(10, 201, 10):
    c = period_integral(circle, window, LatticeEigenfunction.single_mode((lam, 0)))
    a = period_integral(line, window, LatticeEigenfunction.single_mode((0, lam)))
    series.append((lam, abs(c.value)))
    if lam % 40 == 10:
        print(f"{lam:5d} {abs(c.value):18.8f} {abs(a.value):16.8f}")

dense = [(lam, abs(period_integral(
    circle, window, LatticeEigenfunction.single_mode((lam, 0))).value))
    for lam in range(5, 201, 5)]
fit = decay_fit(dense)
print(f"\nlog-log slope over lam = 5..200 step 5: {fit.slope:+.4f} "
      f"(the J0 envelope gives -1/2)")

print("\n2-D integrals  b(s) b(t) phi^(-1/2) exp(i lam phi):")
circ = shipped_configuration("circle-translate")
lines = shipped_configuration("parallel-lines")
ws, wt = bump_window(math.pi, 1.2), bump_window(0.0, 1.2)
wb = bump_window(0.0, 1.0)
rows = []
for lam in (20, 40, 80, 160):
    nd = abs(oscillatory_integral_2d(circ, ws, wt, lam).value)
    dg = abs(oscillatory_integral_2d(lines, wb, wb, lam).value)
    rows.append((lam, nd, dg))
    print(f"  lam = {lam:4d}: nondegenerate {nd:.6f}   degenerate {dg:.6f}")
nd_fit = decay_fit([(lam, nd) for lam, nd, _ in rows])
dg_fit = decay_fit([(lam, dg) for lam, _, dg in rows])
print(f"slopes: nondegenerate {nd_fit.slope:+.3f} (isolated critical points, -1), "
      f"degenerate {dg_fit.slope:+.3f} (critical line, -1/2)")
