"""Convolution semigroups ``(mu_t)`` of sub-probability measures on [0, inf).

Supported families and their Bernstein functions:

* ``DriftKilling(a, b)``  -- ``f(lam) = a + b*lam``, ``mu_t = exp(-a t) delta_{b t}``
* ``Stable(alpha)``       -- ``f(lam) = lam**alpha``
* ``KilledStable(a, alpha)`` -- ``f(lam) = a + lam**alpha``,
  ``mu_t = exp(-a t) * (stable law at time t)``

The stable density is computed by folding the inversion contour
``gamma_Theta`` (two rays at angles +-Theta) into one real integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.special import gamma

from ._parallel import ordered_map
from .bernstein import LevyTriplet, ZeroMeasure, stable_triplet
from .errors import DiscretizationError, DomainError, QuadratureFailure
from .quadrature import DiscreteMeasure, gauss_legendre, panel_rule

__all__ = [
    "DriftKilling",
    "Stable",
    "KilledStable",
    "ContourConfig",
    "stable_density_closed_form",
    "stable_density_contour",
    "discretize",
    "mass",
    "tail_cutoff",
    "tail_mass_bound",
]


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"stable index must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class DriftKilling:
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise DomainError("drift and killing rate must be nonnegative")

    @property
    def killing(self):
        return self.a

    def bernstein(self):
        return LevyTriplet(self.a, self.b, ZeroMeasure())

    def exponent(self, lam):
        return self.a + self.b * np.asarray(lam, float)


@dataclass(frozen=True)
class Stable:
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)

    @property
    def killing(self):
        return 0.0

    def bernstein(self):
        return stable_triplet(self.alpha)

    def exponent(self, lam):
        return np.asarray(lam, float) ** self.alpha


@dataclass(frozen=True)
class KilledStable:
    a: float
    alpha: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.a >= 0:
            raise DomainError("killing rate must be nonnegative")

    @property
    def killing(self):
        return self.a

    def bernstein(self):
        s = stable_triplet(self.alpha)
        return LevyTriplet(self.a, 0.0, s.levy_measure)

    def exponent(self, lam):
        return self.a + np.asarray(lam, float) ** self.alpha


SubordinatorFamily = Union[DriftKilling, Stable, KilledStable]


def default_theta(alpha):
    """Contour angle with ``cos(Theta) < 0`` and ``cos(alpha*Theta) > 0``.

    Equals ``3*pi/4`` for ``alpha <= 1/2``; for larger ``alpha`` the angle
    moves toward ``pi/2`` so that ``exp(-t w**alpha)`` still decays along
    the rays.
    """
    return min(0.75 * math.pi, 0.5 * (0.5 * math.pi + min(math.pi, math.pi / (2 * alpha))))


@dataclass(frozen=True)
class ContourConfig:
    """Contour quadrature settings.

    ``theta=None`` selects :func:`default_theta`. ``panels`` is the minimum
    number of geometric panels on ``[r_1, R]``, ``nodes`` the Gauss-Legendre
    order per panel.
    """

    theta: float | None = None
    r_factor: float = 1.0
    panels: int = 64
    nodes: int = 16

    def __post_init__(self):
        if self.theta is not None and not 0.5 * math.pi < self.theta < math.pi:
            raise DomainError("contour angle must lie strictly between pi/2 and pi")
        if not self.r_factor > 0:
            raise DomainError("r_factor must be positive")
        if self.panels < 2 or self.nodes < 2:
            raise DomainError("need at least two panels and two nodes")

    def angle(self, alpha):
        return default_theta(alpha) if self.theta is None else self.theta


def stable_density_closed_form(t, s):
    """Density of the 1/2-stable law: ``t exp(-t^2/(4s)) / (2 sqrt(pi) s^1.5)``."""
    s_arr = np.asarray(s, float)
    if not t > 0 or np.any(s_arr <= 0):
        raise DomainError("closed-form density needs t > 0 and s > 0")
    out = t * np.exp(-t * t / (4.0 * s_arr)) / (2.0 * math.sqrt(math.pi) * s_arr ** 1.5)
    return float(out) if out.ndim == 0 else out


# radians of phase allowed per panel inside the non-negligible region
_PHASE_PER_PANEL = 1.5
# first panel [0, r_1] with r_1 this fraction of the smallest natural scale
_HEAD_FRACTION = 1e-8


def _contour_edges(alpha, t, s, theta, R, panels):
    c, ca = math.cos(theta), math.cos(alpha * theta)
    r_decay = 50.0 / (s * abs(c))
    if ca > 0:
        r_decay = min(r_decay, (50.0 / (t * ca)) ** (1.0 / alpha))
    r1 = _HEAD_FRACTION * min(1.0 / s, t ** (-1.0 / alpha))
    ratio = min(2.0, (R / r1) ** (1.0 / (panels - 1)))
    edges = [0.0, r1]
    r = r1
    while r < R:
        step = (ratio - 1.0) * r
        if r < r_decay:
            step = min(step, _PHASE_PER_PANEL / (s + t * alpha * r ** (alpha - 1.0)))
        r = min(r + step, R)
        edges.append(r)
    return np.asarray(edges)


def _contour_one(alpha, t, s, theta, cfg):
    R = cfg.r_factor * max(50.0 / (s * abs(math.cos(theta))), (50.0 / t) ** (1.0 / alpha))
    edges = _contour_edges(alpha, t, s, theta, R, cfg.panels)
    r, w = panel_rule(edges, cfg.nodes)
    e = complex(math.cos(theta), math.sin(theta))
    ea = complex(math.cos(alpha * theta), math.sin(alpha * theta))
    vals = np.exp(s * r * e - t * r ** alpha * ea) * e
    return float(np.dot(w, vals.imag)) / math.pi


def stable_density_contour(alpha, t, s, cfg: ContourConfig | None = None):
    """Density ``g_t(s)`` of the ``alpha``-stable subordinator.

    Evaluates ``(1/pi) int_0^R Im[exp(s r e^{i Theta} - t r^alpha e^{i alpha Theta})
    e^{i Theta}] dr`` on geometrically graded Gauss-Legendre panels, with
    panel widths additionally capped where the integrand oscillates.
    Values in ``[-1e-8, 0)`` are clamped to zero; anything more negative
    raises :class:`QuadratureFailure`. ``s`` may be an array.
    """
    _check_alpha(alpha)
    cfg = cfg or ContourConfig()
    s_arr = np.asarray(s, float)
    if not t > 0 or np.any(s_arr <= 0):
        raise DomainError("contour density needs t > 0 and s > 0")
    theta = cfg.angle(alpha)
    flat = s_arr.ravel()
    chunks = np.array_split(flat, max(1, min(len(flat) // 64, 32)))
    parts = ordered_map(lambda ch: [_contour_one(alpha, t, float(x), theta, cfg) for x in ch],
                        chunks)
    out = np.array([v for p in parts for v in p]).reshape(s_arr.shape)
    if np.any(out < -1e-8):
        worst = float(np.min(out))
        raise QuadratureFailure(
            f"contour density {worst:.3g} < -1e-8; increase nodes or r_factor")
    out = np.where(out < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def mass(family, t):
    """``mu_t([0, inf)) = exp(-t a)`` with ``a = f(0+)``."""
    if not t >= 0:
        raise DomainError("time must be nonnegative")
    return math.exp(-t * family.killing)


def tail_cutoff(family, t, eps_tail):
    """Truncation point ``S_max`` with tail mass at most ``eps_tail``.

    Stable families use the asymptotic tail ``t S^{-alpha} / Gamma(1-alpha)``.
    """
    if isinstance(family, DriftKilling):
        return family.b * t
    alpha = family.alpha
    return (t / (eps_tail * gamma(1.0 - alpha))) ** (1.0 / alpha)


def tail_mass_bound(family, t, S):
    """Asymptotic estimate of ``mu_t((S, inf))``."""
    if isinstance(family, DriftKilling):
        return 0.0 if family.b * t <= S else mass(family, t)
    alpha = family.alpha
    return mass(family, t) * t * S ** (-alpha) / gamma(1.0 - alpha)


def _head_estimate(alpha, s, cfg):
    x, w = gauss_legendre(cfg.nodes)
    nodes = 0.5 * s * (x + 1.0)
    return 0.5 * s * float(np.dot(w, stable_density_contour(alpha, 1.0, nodes, cfg)))


@lru_cache(maxsize=32)
def _unit_time_stable(alpha, eps_tail, n_atoms, cfg):
    s_max = (1.0 / (eps_tail * gamma(1.0 - alpha))) ** (1.0 / alpha)
    s_min = 1.0
    while _head_estimate(alpha, s_min, cfg) > eps_tail:
        s_min *= 0.5
        if s_min < 1e-300:
            raise DiscretizationError("could not locate the lower truncation point")
    du = (math.log(s_max) - math.log(s_min)) / n_atoms
    u = math.log(s_min) + du * (np.arange(n_atoms) + 0.5)
    s = np.exp(u)
    # midpoint rule in log s
    weights = stable_density_contour(alpha, 1.0, s, cfg) * s * du
    total = float(weights.sum())
    if total > 1.0:
        if total > 1.0 + 1e-6:
            raise DiscretizationError(f"discretized mass {total:.12g} exceeds 1 + 1e-6")
        weights = weights / total
    elif total < 1.0 - 2.0 * eps_tail:
        raise DiscretizationError(
            f"discretized mass {total:.12g} below 1 - 2*eps_tail; increase n_atoms")
    return DiscreteMeasure(s, weights)


def discretize(family, t, eps_tail=1e-10, n_atoms=2000,
               contour: ContourConfig | None = None):
    """Discrete approximation of ``mu_t``.

    ``t = 0`` gives ``delta_0``; drift/killing families give their single
    atom. Stable laws are discretized once at ``t = 1`` on a logarithmic
    grid ``[s_min, S_max]`` and carried to other times through the scaling
    ``mu_t = (s -> t**(1/alpha) s)_* mu_1``. Total mass lies in
    ``[exp(-a t) (1 - 2 eps_tail), exp(-a t) (1 + 1e-6)]``.
    """
    if not t >= 0:
        raise DomainError("time must be nonnegative")
    if not 0 < eps_tail < 1e-2:
        raise DomainError("eps_tail must lie in (0, 1e-2)")
    if n_atoms < 1:
        raise DomainError("n_atoms must be positive")
    if t == 0:
        return DiscreteMeasure.dirac(0.0, 1.0)
    exact = mass(family, t)
    if isinstance(family, DriftKilling):
        return DiscreteMeasure.dirac(family.b * t, exact)
    base = _unit_time_stable(float(family.alpha), float(eps_tail), int(n_atoms),
                             contour or ContourConfig())
    out = base.dilated(t ** (1.0 / family.alpha)).scaled(exact)
    total = out.mass
    if not exact * (1.0 - 2.0 * eps_tail) <= total <= exact * (1.0 + 1e-6):
        raise DiscretizationError(f"mass {total:.12g} outside bracket around {exact:.12g}")
    return out
