"""Acceptance checks, shared by the test suite and ``subfn verify``.

Every check compares a computed quantity with an independent oracle
(closed forms, ``scipy.linalg`` matrix functions, Fourier multipliers) and
returns a :class:`CheckResult`. Tolerances are fixed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, fractional_matrix_power

from .bernstein import (LevyTriplet, check_bernstein_signs, evaluate,
                        stable_triplet)
from .calculus import (SubordinationPlan, f_of_A_apply, phillips_check,
                       rescaling_check, resolvent_apply, subordinate_apply)
from .quadrature import convolve, laplace_transform
from .semigroup import (HeatSemigroup, MatrixSemigroup, StateVector,
                        dirichlet_laplacian, periodic_grid, sup_norm)
from .subordinator import (DriftKilling, KilledStable, Stable, discretize,
                           mass, stable_density_closed_form,
                           stable_density_contour)

__all__ = ["CheckResult", "CRITERIA", "run_suite", "format_table"]

SEED = 20240601
ALPHAS = (0.3, 0.5, 0.7)
LAPLACE_TIMES = (0.5, 1.0, 2.0)
LAPLACE_LAMBDAS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
# Laplace transforms of convolved measures: the binning error is at most
# lam * bin_width / 2, i.e. 5e-6 at lam = 10
CONVOLVE_BIN = 1e-6
CONVOLVE_ATOMS = 600


@dataclass(frozen=True)
class CheckResult:
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{status}  {self.name:<44s} measured={self.measured:.3e}  "
                f"tol={self.tolerance:.1e}  {self.detail}")


def _result(name, measured, tol, detail=""):
    return CheckResult(name, float(measured), tol, bool(measured <= tol), detail)


def _alphas(suite):
    return ALPHAS if suite == "full" else (0.5,)


def _testbed():
    A = dirichlet_laplacian(8)
    return A, MatrixSemigroup(A)


def _unit_vectors(count=5, dim=8):
    rng = np.random.default_rng(SEED)
    v = rng.standard_normal((count, dim))
    return [StateVector.finite(row / np.linalg.norm(row)) for row in v]


def check_bernstein_eval(suite="full"):
    lam = np.geomspace(0.1, 10.0, 21)
    err = max(np.max(np.abs(evaluate(stable_triplet(a), lam) / lam ** a - 1.0))
              for a in ALPHAS)
    return _result("1 Bernstein eval vs lam^alpha (rel)", err, 1e-6)


def check_contour_closed_form(suite="full"):
    s = np.geomspace(0.05, 20.0, 40)
    err = max(np.max(np.abs(stable_density_contour(0.5, t, s)
                            - stable_density_closed_form(t, s)))
              for t in (0.5, 1.0, 2.0))
    return _result("2 contour vs closed-form density (abs)", err, 1e-6)


def check_laplace_identity(suite="full"):
    err = 0.0
    lam = np.array(LAPLACE_LAMBDAS)
    for a in _alphas(suite):
        for t in LAPLACE_TIMES:
            m = discretize(Stable(a), t)
            err = max(err, np.max(np.abs(laplace_transform(m, lam) - np.exp(-t * lam ** a))))
    return _result("3 Laplace identity L(mu_t) = exp(-t f)", err, 1e-4)


def check_convolution_law(suite="full"):
    err = 0.0
    lam = np.array(LAPLACE_LAMBDAS)
    for a in _alphas(suite):
        for t, s in ((0.5, 0.5), (0.5, 1.0)):
            mt = discretize(Stable(a), t, n_atoms=CONVOLVE_ATOMS)
            ms = discretize(Stable(a), s, n_atoms=CONVOLVE_ATOMS)
            mts = discretize(Stable(a), t + s)
            conv = convolve(mt, ms, CONVOLVE_BIN)
            err = max(err, np.max(np.abs(laplace_transform(conv, lam)
                                         - laplace_transform(mts, lam))))
    return _result("4 convolution law mu_t * mu_s = mu_(t+s)", err, 5e-4)


def check_mass_identity(suite="full"):
    a, eps = math.log(2.0), 1e-8
    exact_gap = 0.0
    bracket_gap = 0.0
    for alpha in _alphas(suite):
        fam = KilledStable(a, alpha)
        for t in (0.5, 1.0, 2.0):
            exact = math.exp(-t * a)
            exact_gap = max(exact_gap, abs(mass(fam, t) - exact))
            total = discretize(fam, t, eps_tail=eps).mass
            lo, hi = exact * (1 - 2 * eps), exact * (1 + 1e-6)
            bracket_gap = max(bracket_gap, lo - total, total - hi, 0.0)
    ok = exact_gap == 0.0 and bracket_gap == 0.0
    return CheckResult("5 mass identity exp(-t a) and bracket", max(exact_gap, bracket_gap),
                       0.0, ok, "exact equality and bracket membership")


def check_spectral_f_of_A(suite="full"):
    A, T = _testbed()
    err = 0.0
    for a in _alphas(suite):
        F = fractional_matrix_power(A, a).real
        for x in _unit_vectors():
            y = f_of_A_apply(T, stable_triplet(a), x)
            err = max(err, sup_norm(y.samples - F @ x.samples) / sup_norm(x))
    return _result("6 f(A) vs spectral oracle (rel sup)", err, 1e-4)


def check_spectral_subordination(suite="full"):
    A, T = _testbed()
    err = 0.0
    for a in _alphas(suite):
        F = fractional_matrix_power(A, a).real
        plan = SubordinationPlan(Stable(a))
        for t in (0.5, 1.0):
            E = expm(-t * F)
            for x in _unit_vectors():
                y = subordinate_apply(T, plan, t, x)
                err = max(err, sup_norm(y.samples - E @ x.samples))
    return _result("7 S_t vs spectral oracle exp(-t A^alpha)", err, 1e-4)


def check_phillips_matrix(suite="full"):
    A, T = _testbed()
    x = _unit_vectors(1)[0]
    errs, orders = [], []
    for a in _alphas(suite):
        rep = phillips_check(T, a, x)
        errs.append(rep.lhs_rhs_error)
        orders.append(rep.order)
    order_ok = all(0.8 <= o <= 1.2 for o in orders)
    err = max(errs)
    return CheckResult("8a Phillips (matrix) |A^f x - f(A)x|", err, 1e-3,
                       err <= 1e-3 and order_ok,
                       "orders " + ", ".join(f"{o:.3f}" for o in orders))


def check_phillips_heat(suite="full"):
    c = periodic_grid(np.cos)
    rep = phillips_check(HeatSemigroup(1), 0.5, c)
    ok = rep.lhs_rhs_error <= 1e-2 and 0.8 <= rep.order <= 1.2
    return CheckResult("8b Phillips (heat 1d periodic, cos)", rep.lhs_rhs_error, 1e-2,
                       ok, f"order {rep.order:.3f}")


def check_fractional_laplacian(suite="full"):
    H = HeatSemigroup(1)
    c = periodic_grid(np.cos)
    s_err = sup_norm(subordinate_apply(H, SubordinationPlan(Stable(0.5)), 1.0, c)
                     - math.exp(-1.0) * c)
    f_err = sup_norm(f_of_A_apply(H, stable_triplet(0.5), c) - c)
    err = max(s_err, f_err)
    return _result("9 fractional Laplacian Fourier oracle", err, 1e-3,
                   f"S_t {s_err:.2e}, f(A) {f_err:.2e}")


def check_resolvent(suite="full"):
    A, T = _testbed()
    xs = _unit_vectors()
    ident = 0.0
    for lam in (0.5, 1.0, 5.0):
        for x in xs:
            r = resolvent_apply(T, lam, x)
            ident = max(ident, sup_norm(lam * r.samples + A @ r.samples - x.samples))
    limit = max(sup_norm(1e3 * resolvent_apply(T, 1e3, x).samples - x.samples) / sup_norm(x)
                for x in xs)
    ok = ident <= 1e-6 and limit <= 1e-2
    return CheckResult("10 resolvent (lam+A)R = I, lam R -> I", ident, 1e-6, ok,
                       f"lam=1e3 limit {limit:.2e} (tol 1e-2)")


def check_trivial_subordinations(suite="full"):
    _, T = _testbed()
    H = HeatSemigroup(1)
    states = [(T, _unit_vectors(1)[0]), (H, periodic_grid(lambda x: np.cos(x) + 0.5 * np.sin(3 * x)))]
    a = 0.8
    err = 0.0
    for sg, x in states:
        for t in (0.5, 1.0):
            drift = subordinate_apply(sg, SubordinationPlan(DriftKilling(0.0, 1.0)), t, x)
            err = max(err, sup_norm(drift - sg.apply(t, x)))
            kill = subordinate_apply(sg, SubordinationPlan(DriftKilling(a, 0.0)), t, x)
            err = max(err, sup_norm(kill - math.exp(-t * a) * x))
    return _result("11 trivial subordinations exact", err, 1e-15)


def _law_and_contraction(T, plan, x):
    """Semigroup-law defect, contraction transfer, strong continuity of S."""
    law = 0.0
    for t in (0.25, 0.5, 1.0):
        for s in (0.25, 0.5, 1.0):
            lhs = subordinate_apply(T, plan, t, subordinate_apply(T, plan, s, x))
            law = max(law, sup_norm(lhs - subordinate_apply(T, plan, t + s, x)))
    # |S_t x| <= max over atoms |T_s x| <= |x| (1 + 1e-9)
    transfer = True
    for t in (0.01, 0.1, 0.5, 1.0, 2.0, 5.0):
        atom_max = float(np.max(np.abs(T.apply_many(plan.measure(t).locations, x))))
        st = sup_norm(subordinate_apply(T, plan, t, x))
        transfer &= st <= atom_max * (1 + 1e-9) and atom_max <= sup_norm(x) * (1 + 1e-9)
    gaps = [sup_norm(subordinate_apply(T, plan, t, x) - x) for t in (1e-1, 1e-2, 1e-3)]
    continuity = gaps[0] > gaps[1] > gaps[2]
    return law, transfer, continuity


def check_semigroup_law(suite="full"):
    _, T = _testbed()
    law_m, ok_m = 0.0, True
    for a in _alphas(suite):
        law, transfer, cont = _law_and_contraction(T, SubordinationPlan(Stable(a)),
                                                   _unit_vectors(1)[0])
        law_m, ok_m = max(law_m, law), ok_m and transfer and cont
    h = 0.05
    xs = -20.0 + h * np.arange(801)
    # constant-edge extension is only consistent for data that settle at the
    # grid edges, hence a bump rather than a function with distinct limits
    bump = np.exp(-xs ** 2) + 0.5 * np.exp(-(xs - 3.0) ** 2 / 2.0)
    grids = [periodic_grid(np.cos),
             StateVector.grid1d(bump, h, "constant_edge", -20.0)]
    law_g, ok_g = 0.0, True
    for g in grids:
        law, transfer, cont = _law_and_contraction(HeatSemigroup(1),
                                                   SubordinationPlan(Stable(0.5)), g)
        law_g, ok_g = max(law_g, law / sup_norm(g)), ok_g and transfer and cont
    ok = law_m <= 1e-10 and law_g <= 1e-3 and ok_m and ok_g
    return CheckResult("12 S semigroup law + contractivity", law_m, 1e-10, ok,
                       f"grid law {law_g:.2e} (tol 1e-3), contraction/continuity "
                       f"{'ok' if ok_m and ok_g else 'VIOLATED'}")


def check_rescaling(suite="full"):
    _, T = _testbed()
    x = _unit_vectors(1)[0]
    err = max(rescaling_check(T, math.log(2.0), a, 1.0, x) for a in _alphas(suite))
    return _result("13 rescaling S^f = exp(-ta) S^h", err, 1e-6)


def check_bernstein_signs_stable(suite="full"):
    grid = np.geomspace(0.1, 10.0, 25)
    ok = all(check_bernstein_signs(stable_triplet(a), 4, grid) for a in ALPHAS)
    return CheckResult("14 Bernstein sign property (k <= 4)", 0.0 if ok else 1.0, 0.0, ok)


CRITERIA = [
    check_bernstein_eval,
    check_contour_closed_form,
    check_laplace_identity,
    check_convolution_law,
    check_mass_identity,
    check_spectral_f_of_A,
    check_spectral_subordination,
    check_phillips_matrix,
    check_phillips_heat,
    check_fractional_laplacian,
    check_resolvent,
    check_trivial_subordinations,
    check_semigroup_law,
    check_rescaling,
    check_bernstein_signs_stable,
]


def run_suite(suite="full"):
    if suite not in ("fast", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    return [check(suite) for check in CRITERIA]


def format_table(results):
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
