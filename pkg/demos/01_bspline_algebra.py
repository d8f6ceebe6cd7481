"""Exact B-spline algebra: evaluation, box convolution and antiderivatives.

Cardinal B-splines are the workhorse generators of every experiment in
this package.  This script builds them from the closed form, checks the
degree-raising convolution identity exactly, and shows how antiderivatives
carry the total integral as tail metadata.
"""

import numpy as np

from avgsamp import bspline, coefficient_distance

print("=== cardinal B-splines ===")
for n in range(4):
    b = bspline(n)
    lo, hi = b.support
    print(f"degree {n}: support [{lo:+.1f}, {hi:+.1f}], "
          f"smoothness C^{b.continuity}, B_{n}(0) = {b(0.0):.6f}, "
          f"integral = {b.antiderivative().tail:.15f}")

print()
print("=== degree raising by unit-box convolution ===")
for n in range(6):
    conv = bspline(n).convolve_box(-0.5, 0.5)
    dev = coefficient_distance(conv, bspline(n + 1))
    print(f"B_{n} * box = B_{n+1}: max coefficient deviation {dev:.2e}")

print()
print("=== narrow-box local averages ===")
b2 = bspline(2)
smoothed = b2.convolve_box(-0.125, 0.125)
xs = np.linspace(-2.0, 2.0, 9)
print("x:          ", "  ".join(f"{x:+.2f}" for x in xs))
print("B_2(x):     ", "  ".join(f"{v:.3f}" for v in b2(xs)))
print("averaged:   ", "  ".join(f"{v:.3f}" for v in smoothed(xs)))
print("support widens from", b2.support, "to", smoothed.support)

print()
print("=== antiderivative metadata ===")
F = b2.antiderivative()
print(f"F(-1.5) = {F(-1.5):.3f} (zero at the left edge)")
print(f"F(0)    = {F(0.0):.3f} (half the mass, by symmetry)")
print(f"F(+5)   = {F(5.0):.3f} (constant tail = total integral)")

print()
print("=== shifting, scaling, cancellation ===")
f = bspline(1).shift_scale(0.5, 2.0)
g = f.shift_scale(0.0, -1.0)
cancel = f + g
print(f"2 B_1(x - 0.5) at x = 0.5: {f(0.5):.3f}")
print(f"after adding its negation, max |value| on a grid: "
      f"{np.max(np.abs(cancel(np.linspace(-2, 3, 100)))):.1e}")
