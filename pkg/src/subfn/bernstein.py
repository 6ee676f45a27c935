"""Bernstein functions given by Levy triplets ``(a, b, mu)``.

``f(lam) = a + b*lam + int_(0,inf) (1 - exp(-lam*t)) mu(dt)``

Levy measures are either zero, a power density ``c * t**exponent`` with
``exponent`` in (-2, -1), or a finite atomic measure.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.special import gamma

from .errors import ConvergenceError, DomainError, ParseError
from .quadrature import (DiscreteMeasure, QuadratureConfig, panel_edges,
                         panel_rule)

__all__ = [
    "ZeroMeasure",
    "PowerDensity",
    "AtomicMeasure",
    "LevyTriplet",
    "stable_triplet",
    "evaluate",
    "eval_limit_at_zero",
    "check_bernstein_signs",
    "yosida_approximation",
    "power_density_rule",
    "triplet_to_json",
    "triplet_from_json",
]

# absolute budget for each neglected end of the jump integral in evaluate()
CUTOFF_TOL = 1e-9
REFINE_LEVELS = 3
REFINE_TARGET = 1e-13
REFINE_FAIL = 1e-6


@dataclass(frozen=True)
class ZeroMeasure:
    pass


@dataclass(frozen=True)
class PowerDensity:
    """Levy density ``c * t**exponent`` on ``(0, inf)``."""

    c: float
    exponent: float

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("power density needs c > 0")
        if not -2.0 < self.exponent < -1.0:
            raise DomainError("power density exponent must lie in (-2, -1)")

    def head_moment(self, t_min):
        """``int_0^t_min t mu(dt)``."""
        p = self.exponent + 2.0
        return self.c * t_min ** p / p

    def tail_mass(self, t_max):
        """``mu([t_max, inf))``."""
        q = -(self.exponent + 1.0)
        return self.c * t_max ** (-q) / q

    def head_cutoff(self, budget):
        """Largest ``t_min`` with ``head_moment(t_min) <= budget``."""
        p = self.exponent + 2.0
        return (budget * p / self.c) ** (1.0 / p)

    def tail_cutoff(self, budget):
        """Smallest ``t_max`` with ``tail_mass(t_max) <= budget``."""
        q = -(self.exponent + 1.0)
        return (budget * q / self.c) ** (-1.0 / q)


@dataclass(frozen=True)
class AtomicMeasure:
    measure: DiscreteMeasure

    def __post_init__(self):
        if len(self.measure) and self.measure.locations[0] <= 0:
            raise DomainError("a Levy measure lives on (0, inf); no atom at 0")


LevyMeasureSpec = Union[ZeroMeasure, PowerDensity, AtomicMeasure]


@dataclass(frozen=True)
class LevyTriplet:
    """Killing rate ``a``, drift ``b`` and Levy measure of a Bernstein function."""

    a: float = 0.0
    b: float = 0.0
    levy_measure: LevyMeasureSpec = ZeroMeasure()

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise DomainError("Levy triplet needs a >= 0 and b >= 0")
        if not math.isfinite(self.a) or not math.isfinite(self.b):
            raise DomainError("Levy triplet coefficients must be finite")

    def __call__(self, lam, cfg=None):
        return evaluate(self, lam, cfg)


def stable_triplet(alpha):
    """Triplet ``(0, 0, -t**(-1-alpha) / Gamma(-alpha) dt)`` of ``lam**alpha``."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"stable index must lie in (0, 1), got {alpha}")
    c = -1.0 / gamma(-alpha)
    return LevyTriplet(0.0, 0.0, PowerDensity(float(c), -1.0 - alpha))


def power_density_rule(density: PowerDensity, t_min, t_max, cfg: QuadratureConfig):
    """Nodes and ``mu``-weights for ``int_[t_min, t_max] g(t) mu(dt)``.

    The range is split at ``t = 1`` and each side gets ``cfg.panels``
    panels. Logarithmic grading runs Gauss-Legendre in ``u = log t``.
    """
    if not 0 < t_min < t_max:
        raise DomainError("need 0 < t_min < t_max")
    if t_min < 1.0 < t_max:
        segments = [(t_min, 1.0), (1.0, t_max)]
    else:
        segments = [(t_min, t_max)]
    nodes, weights = [], []
    for lo, hi in segments:
        if cfg.grading == "logarithmic":
            u, wu = panel_rule(np.linspace(math.log(lo), math.log(hi), cfg.panels + 1),
                               cfg.nodes_per_panel)
            t = np.exp(u)
            w = wu * t
        else:
            t, w = panel_rule(panel_edges(lo, hi, cfg.panels, "uniform"),
                              cfg.nodes_per_panel)
        nodes.append(t)
        weights.append(w * density.c * t ** density.exponent)
    return np.concatenate(nodes), np.concatenate(weights)


def refine_until_converged(compute, cfg, *, target=REFINE_TARGET,
                           fail=REFINE_FAIL, levels=REFINE_LEVELS, norm=abs):
    """Evaluate ``compute(cfg)`` on successively doubled panel counts.

    Returns the finest value once the relative change between two levels
    drops below ``target``; raises :class:`ConvergenceError` if it is still
    above ``fail`` at the last level.
    """
    prev = compute(cfg)
    change = math.inf
    for level in range(1, levels + 1):
        cur = compute(cfg.refined(level))
        scale = max(norm(cur), 1e-300)
        change = norm(cur - prev) / scale
        if change <= target:
            return cur
        prev = cur
    if change > fail:
        raise ConvergenceError(
            f"quadrature relative change {change:.3g} exceeds {fail:g}")
    return prev


def _jump_part(density: PowerDensity, lam, cfg):
    p = density.exponent + 2.0
    t_min = min(density.head_cutoff(CUTOFF_TOL / lam), 0.5)
    t_max = max(density.tail_cutoff(CUTOFF_TOL), 50.0 / lam, 2.0)
    # leading terms of the neglected ends, both in closed form
    head = density.c * (lam * t_min ** p / p
                        - lam ** 2 * t_min ** (p + 1) / (2.0 * (p + 1)))
    tail = density.tail_mass(t_max)

    def compute(c):
        t, w = power_density_rule(density, t_min, t_max, c)
        return float(np.dot(w, -np.expm1(-lam * t)))

    return refine_until_converged(compute, cfg) + head + tail


def evaluate(f: LevyTriplet, lam, cfg: QuadratureConfig | None = None):
    """``f(lam)`` for ``lam > 0`` via the Levy-Khintchine integral.

    Accepts a scalar or an array of ``lam``. Raises
    :class:`ConvergenceError` if the jump integral does not settle.
    """
    cfg = cfg or QuadratureConfig()
    lam_arr = np.asarray(lam, float)
    if np.any(~(lam_arr > 0)):
        raise DomainError("Bernstein functions are evaluated at lam > 0")
    out = np.array([_evaluate_one(f, float(x), cfg) for x in lam_arr.ravel()])
    out = out.reshape(lam_arr.shape)
    return float(out) if out.ndim == 0 else out


def _evaluate_one(f, lam, cfg):
    value = f.a + f.b * lam
    m = f.levy_measure
    if isinstance(m, PowerDensity):
        value += _jump_part(m, lam, cfg)
    elif isinstance(m, AtomicMeasure):
        value += float(np.dot(m.measure.weights,
                              -np.expm1(-lam * m.measure.locations)))
    return max(value, 0.0)


def eval_limit_at_zero(f: LevyTriplet):
    """``f(0+)``, which equals the killing rate ``a``."""
    return f.a


def check_bernstein_signs(f: LevyTriplet | Callable, k_max, grid):
    """Sign test of divided differences up to order ``k_max`` (<= 4).

    The ``k``-th divided difference must satisfy
    ``(-1)**(k-1) * dd >= -1e-8 * max|dd|`` at every grid position. ``f`` may
    be a triplet or any callable mapping an array of ``lam`` to values.
    """
    grid = np.asarray(grid, float)
    if not 1 <= k_max <= 4:
        raise DomainError("k_max must be between 1 and 4")
    if grid.size <= k_max or np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise DomainError("grid must be positive, strictly increasing and "
                          "longer than k_max")
    values = evaluate(f, grid) if isinstance(f, LevyTriplet) \
        else np.asarray(f(grid), float)
    dd = values.copy()
    for k in range(1, k_max + 1):
        dd = (dd[1:] - dd[:-1]) / (grid[k:] - grid[:-k])
        scale = np.max(np.abs(dd))
        if np.any((-1) ** (k - 1) * dd < -1e-8 * scale):
            return False
    return True


def yosida_approximation(value, n):
    """``n * (1 - exp(-value / n))``: the Bernstein function of ``n*mu_{1/n}``."""
    return -n * np.expm1(-np.asarray(value, float) / n)


def triplet_to_json(f: LevyTriplet):
    m = f.levy_measure
    if isinstance(m, PowerDensity):
        measure = {"kind": "power", "c": m.c, "exponent": m.exponent}
    elif isinstance(m, AtomicMeasure):
        measure = {"kind": "atomic", "atoms": [list(a) for a in m.measure.atoms]}
    else:
        measure = {"kind": "zero"}
    return json.dumps({"a": f.a, "b": f.b, "measure": measure})


def triplet_from_json(text):
    try:
        obj = json.loads(text)
        kind = obj["measure"]["kind"]
        if kind == "zero":
            measure = ZeroMeasure()
        elif kind == "power":
            measure = PowerDensity(float(obj["measure"]["c"]),
                                   float(obj["measure"]["exponent"]))
        elif kind == "atomic":
            atoms = [(float(loc), float(w)) for loc, w in obj["measure"]["atoms"]]
            measure = AtomicMeasure(DiscreteMeasure.from_atoms(atoms))
        else:
            raise ParseError(f"unknown measure kind {kind!r}")
        return LevyTriplet(float(obj.get("a", 0.0)), float(obj.get("b", 0.0)),
                           measure)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"invalid triplet JSON: {exc}") from exc
