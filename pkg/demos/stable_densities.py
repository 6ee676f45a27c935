"""
Densities of the stable subordinator
====================================

``mu_t`` for ``f(lam) = lam**alpha`` has a density ``g_t(s)`` given by a
Bromwich-type integral. Bending the contour into two rays at angle
``+-Theta`` makes the integrand decay exponentially, and the two rays fold
into one real integral.

For ``alpha = 1/2`` there is a closed form; for other ``alpha`` we compare
with the convergent large-``s`` series and with the Laplace transform.
"""
import math

import numpy as np
from scipy.special import gamma

from subfn import (ContourConfig, Stable, discretize, laplace_transform,
                   stable_density_closed_form, stable_density_contour)
from subfn.quadrature import write_measure_csv

s = np.geomspace(0.05, 20.0, 40)
for t in (0.5, 1.0, 2.0):
    err = np.max(np.abs(stable_density_contour(0.5, t, s) - stable_density_closed_form(t, s)))
    print(f"alpha=1/2, t={t}: max |contour - closed form| = {err:.1e}")


def series(alpha, t, s, terms=60):
    k = np.arange(1, terms + 1)
    c = np.exp(np.log(gamma(k * alpha + 1)) - np.cumsum(np.log(k))
               + k * math.log(t) - (k * alpha + 1) * math.log(s))
    return np.sum((-1.0) ** (k + 1) * c * np.sin(k * math.pi * alpha)) / math.pi


for alpha in (0.3, 0.7):
    for x in (5.0, 20.0):
        print(f"alpha={alpha}, s={x}: contour {stable_density_contour(alpha, 1.0, x):.15f}"
              f"  series {series(alpha, 1.0, x):.15f}")

# the angle is a free parameter; the value does not depend on it
for theta in (0.6 * math.pi, 0.75 * math.pi, 0.9 * math.pi):
    g = stable_density_contour(0.5, 1.0, 1.0, ContourConfig(theta=theta))
    print(f"Theta={theta:.3f}: g_1(1) = {g:.12f}")

# discretized measures reproduce exp(-t lam^alpha)
lam = np.array([0.1, 1.0, 10.0])
for alpha in (0.3, 0.7):
    m = discretize(Stable(alpha), 1.0)
    print(f"alpha={alpha}: {len(m)} atoms, mass {m.mass:.12f}, Laplace error "
          f"{np.max(np.abs(laplace_transform(m, lam) - np.exp(-lam ** alpha))):.1e}")

# plot-ready output (first rows); far too few atoms would be refused with a
# DiscretizationError because the mass leaves its bracket
m = discretize(Stable(0.5), 1.0, eps_tail=1e-4, n_atoms=400)
print("\n".join(write_measure_csv(m).splitlines()[:6]))
