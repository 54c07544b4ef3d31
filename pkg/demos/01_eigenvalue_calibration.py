"""Calibrate the Rayleigh minimizer at p = 2 against classical eigenvalues.

At p = q = 2 the minimizer is the first Dirichlet Laplacian eigenfunction,
so lambda_{2,2} can be checked against closed forms: 2 pi^2 on the unit
square and j_{0,1}^2 (the squared first Bessel zero) on the unit disk.
The discrete value converges from below at first order in the spacing.
"""

import math

from cheegerlab import build_domain, minimize_rayleigh

J01_SQUARED = 5.783185962946785

print("unit square, exact lambda = 2 pi^2 =", 2.0 * math.pi**2)
print(f"{'n':>6} {'lambda':>12} {'rel err':>10} {'iters':>6}")
for n in (32, 64, 128, 256):
    res = minimize_rayleigh(build_domain("square", n, side=1.0), 2.0, 2.0)
    rel = res.lam / (2.0 * math.pi**2) - 1.0
    print(f"{n:>6} {res.lam:>12.6f} {rel:>+10.4%} {res.iterations:>6}")

print()
print("unit disk, exact lambda = j01^2 =", J01_SQUARED)
print(f"{'n':>6} {'lambda':>12} {'rel err':>10} {'iters':>6}")
for n in (32, 64, 128, 256):
    res = minimize_rayleigh(build_domain("disk", n, radius=1.0), 2.0, 2.0)
    rel = res.lam / J01_SQUARED - 1.0
    print(f"{n:>6} {res.lam:>12.6f} {rel:>+10.4%} {res.iterations:>6}")

print()
print("the error halves with the spacing, so a Richardson pair (n, 2n)")
print("already recovers the continuum value to a few parts in 1e4:")
coarse = minimize_rayleigh(build_domain("square", 128, side=1.0), 2.0, 2.0).lam
fine = minimize_rayleigh(build_domain("square", 256, side=1.0), 2.0, 2.0).lam
rich = 2.0 * fine - coarse
print(f"extrapolated lambda = {rich:.6f}, rel err {rich / (2 * math.pi**2) - 1.0:+.2e}")
