"""
The generator of a subordinated semigroup
=========================================

For ``T_t = exp(-t A)`` the subordinated semigroup ``S_t`` has generator
``-f(A)`` with

    f(A) x = a x + b A x + int (x - T_t x) mu(dt).

We check this on the 8x8 Dirichlet Laplacian: difference quotients
``(x - S_h x)/h`` converge at first order to ``f(A) x``, and both agree with
``A**alpha x`` from ``scipy.linalg``. The resolvent ``(lam + A)^-1`` comes out
of the same machinery as a Laplace transform of ``t -> T_t x``.
"""
import numpy as np
from scipy.linalg import fractional_matrix_power

from subfn import (DriftKilling, MatrixSemigroup, Stable, StateVector, SubordinatedSemigroup,
                   dirichlet_laplacian, f_of_A_apply, phillips_check, resolvent_apply,
                   stable_triplet, sup_norm)

A = dirichlet_laplacian(8)
T = MatrixSemigroup(A)
rng = np.random.default_rng(0)
x = StateVector.finite(rng.standard_normal(8))

for alpha in (0.3, 0.5, 0.7):
    rep = phillips_check(T, alpha, x)
    oracle = fractional_matrix_power(A, alpha).real @ x.samples
    print(f"alpha={alpha}: |f(A)x - A^alpha x| = {sup_norm(rep.reference.samples - oracle):.1e}")
    print("   h       |quotient - f(A)x|")
    for h, e in zip(rep.generator_report.h_values, rep.generator_report.errors):
        print(f"   {h:<7g} {e:.3e}")
    print(f"   order {rep.order:.3f}, extrapolated error {rep.lhs_rhs_error:.1e}")

# f(lam) = lam: nothing is subordinated, S = T and f(A) = A
rep = phillips_check(T, DriftKilling(0.0, 1.0), x, richardson_levels=4)
print(f"drift only: extrapolated error {rep.lhs_rhs_error:.1e}")

lam = 2.0
r = resolvent_apply(T, lam, x)
print(f"|(lam + A) R x - x| = {sup_norm(lam * r.samples + A @ r.samples - x.samples):.1e}")

# resolvent of S: (lam + A^(1/2))^-1
S = SubordinatedSemigroup(T, Stable(0.5))
F = fractional_matrix_power(A, 0.5).real
rs = resolvent_apply(S, lam, x)
print(f"|(lam + A^1/2) R_S x - x| = {sup_norm(lam * rs.samples + F @ rs.samples - x.samples):.1e}")
print(f"|f(A)x| for f = lam^1/2: {sup_norm(f_of_A_apply(T, stable_triplet(0.5), x)):.4f}")
