"""Subordination and the Bernstein functional calculus.

For a contraction semigroup ``T_t = exp(-t A)`` and a Bernstein function
``f`` with convolution semigroup ``(mu_t)``:

* ``S_t x = int T_s x mu_t(ds)``                     (:func:`subordinate_apply`)
* ``f(A) x = a x + b A x + int (x - T_t x) mu(dt)``  (:func:`f_of_A_apply`)
* ``(lam + A)^{-1} x = int_0^inf exp(-lam t) T_t x dt`` (:func:`resolvent_apply`)

The generator of ``S`` is ``-f(A)`` on the domain of ``A``;
:func:`phillips_check` compares difference quotients of ``S`` against
``f(A) x`` numerically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bernstein import (AtomicMeasure, LevyTriplet, PowerDensity,
                        power_density_rule, refine_until_converged)
from .errors import DomainError
from .quadrature import (DiscreteMeasure, QuadratureConfig, integrate_weighted,
                         panel_edges, panel_rule)
from .semigroup import StateVector, sup_norm
from .subordinator import ContourConfig, KilledStable, Stable, discretize

__all__ = [
    "SubordinationPlan",
    "SubordinatedSemigroup",
    "GeneratorReport",
    "PhillipsReport",
    "subordinate_apply",
    "f_of_A_apply",
    "resolvent_apply",
    "generator_fd",
    "phillips_check",
    "rescaling_check",
    "commutation_check",
]

# absolute budget for each neglected end of the jump integral in f(A)
F_OF_A_CUTOFF = 1e-8
F_OF_A_FAIL = 1e-5
RESOLVENT_FAIL = 1e-5
PHILLIPS_STEPS = (0.1, 0.05, 0.025, 0.0125)


@dataclass(frozen=True)
class SubordinationPlan:
    """Discretization choices for ``mu_t``."""

    family: object
    eps_tail: float = 1e-10
    n_atoms: int = 2000
    contour: ContourConfig | None = None

    def measure(self, t):
        return discretize(self.family, t, self.eps_tail, self.n_atoms, self.contour)


def _as_plan(plan_or_family):
    if isinstance(plan_or_family, SubordinationPlan):
        return plan_or_family
    return SubordinationPlan(plan_or_family)


def subordinate_apply(T, plan, t, x: StateVector) -> StateVector:
    """``S_t x = sum_i w_i T_{s_i} x`` over the atoms of the discretized ``mu_t``."""
    if not t >= 0:
        raise DomainError("time must be nonnegative")
    plan = _as_plan(plan)
    if t == 0:
        T.apply(0.0, x)  # shape check only
        return x
    m = plan.measure(t)
    return x.with_samples(integrate_weighted(T.apply_many(m.locations, x), m))


class SubordinatedSemigroup:
    """``(S_t)`` packaged with the same interface as the base semigroups."""

    def __init__(self, T, plan):
        self.base = T
        self.plan = _as_plan(plan)

    def apply(self, t, x):
        return subordinate_apply(self.base, self.plan, t, x)

    def apply_many(self, times, x):
        return np.stack([self.apply(float(t), x).samples
                         for t in np.asarray(times, float).reshape(-1)])

    def increment_many(self, times, x):
        return x.samples[None, ...] - self.apply_many(times, x)

    def generator(self, x):
        return f_of_A_apply(self.base, self.plan.family.bernstein(), x)

    def __repr__(self):
        return f"SubordinatedSemigroup({self.base!r}, {self.plan.family!r})"


def _jump_integral(T, density: PowerDensity, x, Ax, cfg):
    x_norm, ax_norm = sup_norm(x), sup_norm(Ax)
    if x_norm == 0:
        return np.zeros(x.shape)
    ax_scale = max(ax_norm, 1e-12 * x_norm)
    t_min = min(density.head_cutoff(F_OF_A_CUTOFF / ax_scale), 0.5)
    t_max = max(density.tail_cutoff(F_OF_A_CUTOFF / (2.0 * x_norm)), 2.0)

    def compute(c):
        t, w = power_density_rule(density, t_min, t_max, c)
        return integrate_weighted(T.increment_many(t, x), DiscreteMeasure(t, w))

    q = refine_until_converged(compute, cfg, fail=F_OF_A_FAIL, levels=2,
                               target=1e-12, norm=sup_norm)
    # near 0, x - T_t x = t A x + O(t^2)
    return q + density.head_moment(t_min) * Ax.samples


def f_of_A_apply(T, f: LevyTriplet, x: StateVector,
                 cfg: QuadratureConfig | None = None) -> StateVector:
    """``f(A) x = a x + b A x + int (x - T_t x) mu(dt)``.

    Power densities are integrated on log-graded panels between cutoffs
    chosen so each neglected end costs at most ``1e-8``; a refinement that
    still changes the result by more than ``1e-5`` relative raises
    :class:`~subfn.errors.ConvergenceError`.
    """
    cfg = cfg or QuadratureConfig()
    out = f.a * x.samples
    m = f.levy_measure
    Ax = None
    if f.b != 0 or isinstance(m, PowerDensity):
        Ax = T.generator(x)
    if f.b != 0:
        out = out + f.b * Ax.samples
    if isinstance(m, PowerDensity):
        out = out + _jump_integral(T, m, x, Ax, cfg)
    elif isinstance(m, AtomicMeasure) and len(m.measure):
        out = out + integrate_weighted(T.increment_many(m.measure.locations, x),
                                       m.measure)
    return x.with_samples(out)


def resolvent_apply(T, lam, x: StateVector,
                    cfg: QuadratureConfig | None = None) -> StateVector:
    """``(lam + A)^{-1} x`` as the Laplace transform of ``t -> T_t x``.

    Integrates over ``[0, 40/lam]`` (discarded tail at most
    ``exp(-40) |x| / lam``) with graded Gauss-Legendre panels.
    """
    if not lam > 0:
        raise DomainError("resolvent needs lam > 0")
    cfg = cfg or QuadratureConfig()
    t_cut = 40.0 / lam

    def compute(c):
        t, w = panel_rule(panel_edges(0.0, t_cut, c.panels, c.grading), c.nodes_per_panel)
        vals = T.apply_many(t, x)
        return np.tensordot(w * np.exp(-lam * t), vals, axes=(0, 0))

    r = refine_until_converged(compute, cfg, fail=RESOLVENT_FAIL, levels=2,
                               target=1e-12, norm=sup_norm)
    return x.with_samples(r)


@dataclass(frozen=True)
class GeneratorReport:
    h_values: np.ndarray
    errors: np.ndarray
    estimated_order: float
    quotients: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if len(self.h_values) != len(self.errors):
            raise DomainError("h_values and errors differ in length")
        if np.any(np.diff(self.h_values) >= 0):
            raise DomainError("h_values must be strictly decreasing")


def generator_fd(apply_fn, x: StateVector, h_values, reference: StateVector) -> GeneratorReport:
    """Difference quotients ``(x - apply_fn(h, x)) / h`` against ``reference``.

    The order is the least-squares slope of ``log(error)`` against ``log(h)``.
    """
    h = np.asarray(h_values, float)
    if h.size < 3 or np.any(h <= 0) or np.any(np.diff(h) >= 0):
        raise DomainError("need at least three positive, decreasing step sizes")
    quotients = [x.with_samples((x.samples - apply_fn(float(hi), x).samples) / hi)
                 for hi in h]
    errors = np.array([sup_norm(q - reference) for q in quotients])
    positive = errors > 0
    if positive.sum() >= 2:
        order = float(np.polyfit(np.log(h[positive]), np.log(errors[positive]), 1)[0])
    else:
        order = math.nan
    return GeneratorReport(h, errors, order, quotients)


def richardson(quotients, h_values, levels=2):
    """Extrapolate first-order quotients using the last ``levels`` step sizes."""
    q = [np.asarray(v.samples if isinstance(v, StateVector) else v, float)
         for v in quotients[-levels:]]
    h = list(h_values[-levels:])
    for k in range(1, levels):
        q = [((h[j - 1] / h[j]) ** k * q[j] - q[j - 1]) / ((h[j - 1] / h[j]) ** k - 1.0)
             for j in range(1, len(q))]
        h = h[1:]
    return q[0]


@dataclass(frozen=True)
class PhillipsReport:
    lhs_rhs_error: float
    order: float
    extrapolated: StateVector = field(repr=False)
    reference: StateVector = field(repr=False)
    generator_report: GeneratorReport = field(repr=False)


def phillips_check(T, alpha, x: StateVector, *, plan=None, cfg=None,
                   h_values=PHILLIPS_STEPS, richardson_levels=2) -> PhillipsReport:
    """Compare ``lim (x - S_h x)/h`` with ``f(A) x``.

    ``alpha`` is a stable index or any supported family. The quotient limit
    is Richardson-extrapolated from the smallest ``richardson_levels`` step
    sizes; ``order`` is the observed order of the raw quotients.
    """
    family = Stable(alpha) if isinstance(alpha, (int, float)) else alpha
    plan = plan or SubordinationPlan(family)
    reference = f_of_A_apply(T, family.bernstein(), x, cfg)
    report = generator_fd(lambda h, y: subordinate_apply(T, plan, h, y), x,
                          h_values, reference)
    extrapolated = x.with_samples(richardson(report.quotients, report.h_values,
                                             richardson_levels))
    return PhillipsReport(sup_norm(extrapolated - reference), report.estimated_order,
                          extrapolated, reference, report)


def rescaling_check(T, a, alpha, t, x: StateVector, **plan_kwargs):
    """``|S^{a + lam^alpha}_t x - exp(-t a) S^{lam^alpha}_t x|_inf``."""
    killed = subordinate_apply(T, SubordinationPlan(KilledStable(a, alpha), **plan_kwargs), t, x)
    plain = subordinate_apply(T, SubordinationPlan(Stable(alpha), **plan_kwargs), t, x)
    return sup_norm(killed - math.exp(-t * a) * plain)


def commutation_check(T, plan, s, t, x: StateVector):
    """``|T_s S_t x - S_t T_s x|_inf``."""
    left = T.apply(s, subordinate_apply(T, plan, t, x))
    right = subordinate_apply(T, plan, t, T.apply(s, x))
    return sup_norm(left - right)
