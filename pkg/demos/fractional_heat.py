"""
Fractional heat flow by subordination
=====================================

Subordinating the heat semigroup ``exp(t Laplacian)`` with the 1/2-stable
convolution semigroup gives ``exp(-t (-Laplacian)^(1/2))``, whose generator
is the fractional Laplacian. On a periodic grid every Fourier mode ``e^{ikx}``
decays like ``exp(-t |k|)``, which is the oracle here.
"""
import math

import numpy as np

from subfn import (HeatSemigroup, Stable, SubordinationPlan, f_of_A_apply,
                   periodic_grid, stable_triplet, subordinate_apply, sup_norm)

H = HeatSemigroup(1)
plan = SubordinationPlan(Stable(0.5))

x = periodic_grid(lambda s: np.cos(s) + 0.5 * np.sin(4 * s))
for t in (0.25, 1.0):
    y = subordinate_apply(H, plan, t, x)
    grid = x.coords()[0]
    exact = math.exp(-t) * np.cos(grid) + 0.5 * math.exp(-4 * t) * np.sin(4 * grid)
    print(f"t={t}: |S_t x - Fourier oracle| = {sup_norm(y.samples - exact):.1e}")

# the generator side: (-Laplacian)^(1/2) cos = cos, up to the O(h^2) error
# of the discrete Laplacian and the aliasing of the sampled kernel
c = periodic_grid(np.cos)
print("|f(A) cos - cos| =", f"{sup_norm(f_of_A_apply(H, stable_triplet(0.5), c) - c):.1e}")

# a rough profile: S_t smooths it and shrinks the norm (contraction)
box = periodic_grid(lambda s: (np.abs(s - math.pi) < 1.0).astype(float))
for t in (0.01, 0.1, 1.0):
    y = subordinate_apply(H, plan, t, box)
    print(f"t={t}: sup={sup_norm(y):.4f}  mean={y.samples.mean():.6f}")
