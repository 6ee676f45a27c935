"""
Bernstein functions from Levy triplets
======================================

A Bernstein function is determined by a killing rate ``a``, a drift ``b`` and
a Levy measure ``mu``::

    f(lam) = a + b*lam + int (1 - exp(-lam*t)) mu(dt)

The stable family ``lam**alpha`` has ``a = b = 0`` and a power-law Levy
density. Here we evaluate it by quadrature, look at the sign pattern of its
divided differences, and at the approximations ``n (1 - exp(-f/n))``.
"""
import numpy as np

from subfn import (LevyTriplet, PowerDensity, check_bernstein_signs, evaluate,
                   stable_triplet, triplet_to_json, yosida_approximation)

lam = np.geomspace(0.1, 10.0, 7)

# the quadrature reproduces lam**alpha to roughly machine precision
for alpha in (0.3, 0.5, 0.7):
    f = evaluate(stable_triplet(alpha), lam)
    print(f"alpha={alpha}: max rel. error {np.max(np.abs(f / lam ** alpha - 1)):.1e}")

# a general triplet: killing, drift and a heavier-tailed jump density
g = LevyTriplet(0.5, 0.1, PowerDensity(0.3, -1.8))
print("triplet:", triplet_to_json(g))
print("g(lam):", np.round(evaluate(g, lam), 6))

# Bernstein functions have divided differences of alternating sign;
# lam**2 does not
grid = np.geomspace(0.1, 10.0, 25)
print("lam^0.5 Bernstein:", check_bernstein_signs(stable_triplet(0.5), 4, grid))
print("lam^2   Bernstein:", check_bernstein_signs(lambda x: x ** 2, 4, grid))

# n (1 - exp(-f/n)) increases to f; the gap shrinks like f^2 / (2n)
f = evaluate(stable_triplet(0.5), 4.0)
for n in (1, 4, 16, 64, 256):
    fn = yosida_approximation(f, n)
    print(f"n={n:4d}  f_n={fn:.6f}  gap={f - fn:.2e}  f^2/2n={f * f / (2 * n):.2e}")
