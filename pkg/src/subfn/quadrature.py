"""Discrete measures on [0, inf) and measure-weighted sums.

A :class:`DiscreteMeasure` is the computational stand-in for every measure
in the package (the subordinator laws ``mu_t`` and truncated Levy measures).
Vector-valued integrals against such a measure are plain weighted sums of
vectors, evaluated in a fixed order so results are bit-reproducible.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .errors import DimensionError, DomainError, ParseError, ShapeError

__all__ = [
    "DiscreteMeasure",
    "QuadratureConfig",
    "integrate_weighted",
    "convolve",
    "laplace_transform",
    "gauss_legendre",
    "panel_edges",
    "panel_rule",
    "write_measure_csv",
    "read_measure_csv",
]

# above this many atoms integrate_weighted sums pairwise rather than via BLAS
PAIRWISE_THRESHOLD = 1000


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported nonnegative measure on ``[0, inf)``.

    Locations are strictly increasing and weights nonnegative. The empty
    measure is legal and acts as the zero measure.
    """

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = _frozen(np.atleast_1d(self.locations)).reshape(-1)
        w = _frozen(np.atleast_1d(self.weights)).reshape(-1)
        if loc.shape != w.shape:
            raise DimensionError(
                f"{loc.size} locations but {w.size} weights")
        if not (np.all(np.isfinite(loc)) and np.all(np.isfinite(w))):
            raise DomainError("atoms must be finite")
        if np.any(loc < 0):
            raise DomainError("locations must be nonnegative")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if np.any(np.diff(loc) <= 0):
            raise DomainError("locations must be strictly increasing")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_atoms(cls, atoms):
        """Build from an iterable of ``(location, weight)`` pairs."""
        atoms = list(atoms)
        if not atoms:
            return cls.empty()
        loc, w = zip(*atoms)
        return cls(np.asarray(loc, float), np.asarray(w, float))

    @classmethod
    def empty(cls):
        return cls(np.empty(0), np.empty(0))

    @classmethod
    def dirac(cls, location=0.0, weight=1.0):
        return cls(np.array([float(location)]), np.array([float(weight)]))

    def __len__(self):
        return self.locations.size

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.weights.tolist()))

    @property
    def mass(self):
        return float(np.sum(self.weights))

    def is_subprobability(self, tol=1e-9):
        return self.mass <= 1.0 + tol

    def scaled(self, factor):
        """Same atoms, weights multiplied by ``factor >= 0``."""
        if factor < 0:
            raise DomainError("scale factor must be nonnegative")
        return DiscreteMeasure(self.locations, self.weights * factor)

    def dilated(self, factor):
        """Push forward under ``s -> factor * s`` with ``factor > 0``."""
        if factor <= 0:
            raise DomainError("dilation factor must be positive")
        return DiscreteMeasure(self.locations * factor, self.weights)

    def mass_above(self, threshold):
        return float(np.sum(self.weights[self.locations > threshold]))

    def __repr__(self):
        return f"DiscreteMeasure(n_atoms={len(self)}, mass={self.mass:.15g})"


@dataclass(frozen=True)
class QuadratureConfig:
    """Panel layout for graded Gauss-Legendre quadrature.

    ``panels`` counts panels per integration segment; refinement doubles it.
    """

    panels: int = 48
    nodes_per_panel: int = 16
    grading: Literal["uniform", "logarithmic"] = "logarithmic"

    def __post_init__(self):
        if int(self.panels) < 1:
            raise DomainError("panels must be >= 1")
        if int(self.nodes_per_panel) < 2:
            raise DomainError("nodes_per_panel must be >= 2")
        if self.grading not in ("uniform", "logarithmic"):
            raise DomainError(f"unknown grading {self.grading!r}")

    def refined(self, level=1):
        return QuadratureConfig(self.panels * 2 ** level,
                                self.nodes_per_panel, self.grading)


@lru_cache(maxsize=64)
def gauss_legendre(n):
    """Gauss-Legendre nodes and weights on [-1, 1] (read-only, cached)."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    return _frozen(x), _frozen(w)


def panel_edges(a, b, panels, grading="uniform", head_ratio=1e-8):
    """Panel edges for ``[a, b]``.

    Logarithmic grading is geometric; when ``a == 0`` the first panel is
    ``[0, b * head_ratio]`` and the rest are geometric up to ``b``.
    """
    if not b > a:
        raise DomainError(f"empty interval [{a}, {b}]")
    if grading == "uniform":
        return np.linspace(a, b, panels + 1)
    if a > 0:
        return np.geomspace(a, b, panels + 1)
    if panels == 1:
        return np.array([0.0, b])
    return np.concatenate(([0.0], np.geomspace(b * head_ratio, b, panels)))


def panel_rule(edges, nodes_per_panel):
    """Composite Gauss-Legendre rule on the given panel edges."""
    x, w = gauss_legendre(nodes_per_panel)
    edges = np.asarray(edges, float)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def _stack(values):
    if isinstance(values, np.ndarray):
        return values, None
    values = list(values)
    if not values:
        return None, None
    template = values[0] if hasattr(values[0], "samples") else None
    arrays = []
    for v in values:
        a = np.asarray(v.samples if hasattr(v, "samples") else v, float)
        if arrays and a.shape != arrays[0].shape:
            raise ShapeError(
                f"value shapes differ: {arrays[0].shape} vs {a.shape}")
        if template is not None and hasattr(v, "compatible_with") \
                and not template.compatible_with(v):
            raise ShapeError("state vectors live on different spaces")
        arrays.append(a)
    return np.stack(arrays), template


def _pairwise(stack, weights):
    # numpy sums pairwise along a contiguous last axis: error O(eps log n)
    terms = np.moveaxis(stack * weights.reshape((-1,) + (1,) * (stack.ndim - 1)), 0, -1)
    return np.ascontiguousarray(terms).sum(axis=-1)


def integrate_weighted(values, measure: DiscreteMeasure):
    """Weighted sum ``sum_i w_i * values[i]`` in ascending-location order.

    ``values`` is a sequence of state vectors (or arrays) matching the atoms
    positionally, or an array stacked along axis 0. Long sums use
    pairwise summation.
    """
    stack, template = _stack(values)
    n = len(measure)
    count = 0 if stack is None else stack.shape[0]
    if count != n:
        raise DimensionError(f"{count} values for {n} atoms")
    if n == 0:
        raise DimensionError("cannot infer the result shape from no values")
    w = measure.weights
    if n > PAIRWISE_THRESHOLD:
        out = _pairwise(stack, w)
    else:
        out = np.tensordot(w, stack, axes=(0, 0))
    if template is not None:
        return template.with_samples(out)
    return out


def convolve(m1: DiscreteMeasure, m2: DiscreteMeasure, bin_width: float):
    """Convolution of two discrete measures re-binned to spacing ``bin_width``.

    Every pairwise sum of locations is snapped to the nearest multiple of
    ``bin_width``; coincident atoms are merged, so total mass is preserved.
    """
    if not bin_width > 0:
        raise DomainError("bin_width must be positive")
    if len(m1) == 0 or len(m2) == 0:
        return DiscreteMeasure.empty()
    loc = (m1.locations[:, None] + m2.locations[None, :]).ravel()
    w = (m1.weights[:, None] * m2.weights[None, :]).ravel()
    snapped = np.round(loc / bin_width) * bin_width
    grid, inverse = np.unique(snapped, return_inverse=True)
    merged = np.bincount(inverse, weights=w, minlength=grid.size)
    return DiscreteMeasure(grid, merged)


def laplace_transform(measure: DiscreteMeasure, lam):
    """``sum_i w_i exp(-lam * s_i)``; vectorized over ``lam``."""
    lam_arr = np.asarray(lam, float)
    if np.any(lam_arr < 0):
        raise DomainError("Laplace variable must be nonnegative")
    if len(measure) == 0:
        out = np.zeros_like(lam_arr)
    else:
        out = np.exp(-np.multiply.outer(lam_arr, measure.locations)) @ measure.weights
    return float(out) if out.ndim == 0 else out


def write_measure_csv(measure: DiscreteMeasure, target=None):
    """Serialize as CSV ``location,weight``; returns the text if no target."""
    buf = io.StringIO()
    buf.write("location,weight\n")
    for loc, w in zip(measure.locations, measure.weights):
        buf.write(f"{loc:.17g},{w:.17g}\n")
    text = buf.getvalue()
    if target is None:
        return text
    with open(target, "w", newline="") as fh:
        fh.write(text)
    return None


def read_measure_csv(source):
    """Inverse of :func:`write_measure_csv` (path or file-like)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source) as fh:
            text = fh.read()
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["location", "weight"]:
        raise ParseError("expected header 'location,weight'")
    try:
        atoms = [(float(r[0]), float(r[1])) for r in rows[1:] if r]
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad measure row: {exc}") from exc
    try:
        return DiscreteMeasure.from_atoms(atoms)
    except (DomainError, DimensionError) as exc:
        raise ParseError(str(exc)) from exc
