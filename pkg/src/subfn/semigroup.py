"""Concrete contraction semigroups ``T_t = exp(-t A)``.

Two families are provided:

* :class:`MatrixSemigroup` -- ``A`` a symmetric positive semidefinite
  matrix, applied through a cached eigendecomposition.
* :class:`HeatSemigroup` -- the Gauss-Weierstrass semigroup on functions
  sampled on a uniform 1d or 2d grid, ``A = -Laplacian``.

Sign convention throughout the package: ``A`` is stored, the generator is
``-A``, and :func:`generator_apply` returns ``A x``.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.fft import next_fast_len
from scipy.signal import fftconvolve
from scipy.special import erfc

from ._parallel import ordered_map
from .errors import DomainError, ParseError, ShapeError

__all__ = [
    "ExtensionPolicy",
    "StateVector",
    "MatrixSemigroup",
    "HeatSemigroup",
    "apply",
    "apply_many",
    "increment",
    "generator_apply",
    "sup_norm",
    "dirichlet_laplacian",
    "periodic_grid",
    "write_state_csv",
    "read_state_csv",
    "read_matrix_csv",
    "write_matrix_csv",
]

KERNEL_STDS = 6.0
# wider kernels (more offsets than this) use Euler-Maclaurin tail sums
WIDE_KERNEL_OFFSETS = 120


class ExtensionPolicy(str, Enum):
    CONSTANT_EDGE = "constant_edge"
    PERIODIC = "periodic"


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class StateVector:
    """Element of the state space: a plain vector or grid samples.

    ``kind`` is ``"finite"``, ``"grid1d"`` or ``"grid2d"``. Grid states
    carry the spacing, the extension policy used beyond the grid, and the
    coordinates of the first sample.
    """

    samples: np.ndarray
    kind: str = "finite"
    spacing: float | None = None
    extension: ExtensionPolicy | None = None
    origin: tuple = field(default=())

    def __post_init__(self):
        s = _readonly(self.samples)
        expected = {"finite": 1, "grid1d": 1, "grid2d": 2}.get(self.kind)
        if expected is None:
            raise ShapeError(f"unknown state kind {self.kind!r}")
        if s.ndim != expected:
            raise ShapeError(f"{self.kind} state needs a {expected}-d array")
        if not np.all(np.isfinite(s)):
            raise DomainError("state entries must be finite")
        if self.kind != "finite":
            if not (self.spacing and self.spacing > 0):
                raise DomainError("grid spacing must be positive")
            ext = ExtensionPolicy(self.extension or ExtensionPolicy.CONSTANT_EDGE)
            object.__setattr__(self, "extension", ext)
            origin = tuple(float(o) for o in self.origin) or (0.0,) * expected
            if len(origin) != expected:
                raise ShapeError("origin must have one entry per axis")
            object.__setattr__(self, "origin", origin)
            object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "samples", s)

    @classmethod
    def finite(cls, entries):
        return cls(np.asarray(entries, float).reshape(-1), "finite")

    @classmethod
    def grid1d(cls, samples, spacing, extension="constant_edge", origin=0.0):
        return cls(samples, "grid1d", spacing, ExtensionPolicy(extension), (origin,))

    @classmethod
    def grid2d(cls, samples, spacing, extension="constant_edge", origin=(0.0, 0.0)):
        return cls(samples, "grid2d", spacing, ExtensionPolicy(extension),
                   tuple(origin))

    @property
    def shape(self):
        return self.samples.shape

    def coords(self):
        """Per-axis sample coordinates (grid states only)."""
        if self.kind == "finite":
            raise ShapeError("finite states have no coordinates")
        return [o + self.spacing * np.arange(n)
                for o, n in zip(self.origin, self.samples.shape)]

    def compatible_with(self, other):
        return (isinstance(other, StateVector) and self.kind == other.kind
                and self.shape == other.shape and self.spacing == other.spacing
                and self.extension == other.extension)

    def with_samples(self, samples):
        return StateVector(samples, self.kind, self.spacing, self.extension,
                           self.origin)

    def _check(self, other):
        if not self.compatible_with(other):
            raise ShapeError("state vectors live on different spaces")

    def __add__(self, other):
        self._check(other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar):
        return self.with_samples(self.samples * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_samples(-self.samples)

    def __repr__(self):
        extra = "" if self.kind == "finite" else f", h={self.spacing:g}, {self.extension.value}"
        return f"StateVector({self.kind}, shape={self.shape}{extra})"


def sup_norm(x):
    """Maximum absolute entry."""
    s = x.samples if isinstance(x, StateVector) else np.asarray(x)
    return float(np.max(np.abs(s))) if s.size else 0.0


class MatrixSemigroup:
    """``T_t = exp(-t A)`` for a symmetric positive semidefinite ``A``."""

    def __init__(self, A):
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ShapeError("generator matrix must be square")
        scale = max(np.max(np.abs(A)), 1.0)
        if np.max(np.abs(A - A.T)) > 1e-12 * scale:
            raise DomainError("generator matrix must be symmetric")
        A = 0.5 * (A + A.T)
        lam, V = np.linalg.eigh(A)
        if lam.size and lam[0] < -1e-10 * scale:
            raise DomainError(
                f"generator matrix must be positive semidefinite (min eig {lam[0]:.3g})")
        self.matrix = _readonly(A)
        self.eigenvalues = _readonly(np.clip(lam, 0.0, None))
        self.eigenvectors = _readonly(V)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    def _coeffs(self, x):
        if not isinstance(x, StateVector) or x.kind != "finite" \
                or x.shape != (self.dimension,):
            raise ShapeError(f"expected a finite state of length {self.dimension}")
        return self.eigenvectors.T @ x.samples

    def spectral(self, multiplier, x):
        """``V diag(multiplier(eigenvalues)) V^T x``."""
        return x.with_samples(self.eigenvectors @ (multiplier(self.eigenvalues)
                                                   * self._coeffs(x)))

    def apply_many(self, times, x):
        times = np.asarray(times, float).reshape(-1)
        c = self._coeffs(x)
        return np.exp(-np.outer(times, self.eigenvalues)) * c @ self.eigenvectors.T

    def increment_many(self, times, x):
        times = np.asarray(times, float).reshape(-1)
        c = self._coeffs(x)
        return -np.expm1(-np.outer(times, self.eigenvalues)) * c @ self.eigenvectors.T

    def apply(self, t, x):
        if t == 0:
            self._coeffs(x)
            return x
        return x.with_samples(self.apply_many([t], x)[0])

    def generator(self, x):
        self._coeffs(x)
        return x.with_samples(self.matrix @ x.samples)

    def __repr__(self):
        return f"MatrixSemigroup(dim={self.dimension})"


def dirichlet_laplacian(n, spacing=1.0):
    """``tridiag(-1, 2, -1) / spacing**2``: symmetric positive definite."""
    A = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    return A / spacing ** 2


def periodic_grid(fn, n=512, length=2 * math.pi):
    """Sample ``fn`` on ``n`` equispaced points of ``[0, length)``, periodic."""
    h = length / n
    x = h * np.arange(n)
    return StateVector.grid1d(fn(x), h, "periodic", 0.0)


def _laplacian_axis(a, axis, h, extension):
    mode = "wrap" if extension is ExtensionPolicy.PERIODIC else "edge"
    pad = [(0, 0)] * a.ndim
    pad[axis] = (1, 1)
    p = np.pad(a, pad, mode=mode)
    n = a.shape[axis]
    lo = np.take(p, np.arange(0, n), axis=axis)
    hi = np.take(p, np.arange(2, n + 2), axis=axis)
    return (lo - 2.0 * a + hi) / h ** 2


def _discrete_laplacian(x):
    a = x.samples
    return sum(_laplacian_axis(a, ax, x.spacing, x.extension) for ax in range(a.ndim))


def _alias_count(t, h):
    big = 2.0 * math.pi / h
    return int(math.ceil(math.sqrt(40.0 / t) / big)) + 1


def _periodic_multipliers(t, n, h):
    """DFT of the sampled heat kernel wrapped onto the period, normalized.

    Returns ``(multiplier, 1 - multiplier)``; the complement is formed
    without cancellation for small ``t``.
    """
    xi = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
    big = 2.0 * math.pi / h
    P = _alias_count(t, h)
    p = np.arange(-P, P + 1)
    p_nz = p[p != 0]
    z_nz = np.exp(-t * (p_nz * big) ** 2)
    z = 1.0 + z_nz.sum()
    alias = np.exp(-t * (xi[:, None] + p_nz[None, :] * big) ** 2)
    main = np.exp(-t * xi ** 2)
    mult = (main + alias.sum(axis=1)) / z
    comp = (-np.expm1(-t * xi ** 2) + (z_nz[None, :] - alias).sum(axis=1)) / z
    return mult, comp


def _periodic_multipliers_many(times, n, h, complement=False):
    """:func:`_periodic_multipliers` for many times, one row per time."""
    times = np.asarray(times, float)
    xi = 2.0 * math.pi * np.fft.fftfreq(n, d=h)
    big = 2.0 * math.pi / h
    out = np.empty((times.size, n))
    for start in range(0, times.size, 64):
        t = times[start:start + 64, None]
        P = max((_alias_count(float(v), h) for v in t[:, 0]), default=1)
        p_nz = np.concatenate((np.arange(-P, 0), np.arange(1, P + 1)))
        z_nz = np.exp(-t * (p_nz * big) ** 2)
        z = 1.0 + z_nz.sum(axis=1)
        alias = np.exp(-t[:, :, None] * (xi[None, :, None] + p_nz * big) ** 2).sum(axis=2)
        if complement:
            block = -np.expm1(-t * xi ** 2) + z_nz.sum(axis=1)[:, None] - alias
        else:
            block = np.exp(-t * xi ** 2) + alias
        out[start:start + 64] = block / z[:, None]
    return out


def _gauss_tail_sum(k, a):
    """``sum_{m >= k} exp(-a m^2)`` for small ``a`` (Euler-Maclaurin)."""
    k = np.asarray(k, float)
    g = np.exp(-a * k * k)
    integral = 0.5 * math.sqrt(math.pi / a) * erfc(k * math.sqrt(a))
    d1 = -2.0 * a * k * g
    d3 = (12.0 * a * a * k - 8.0 * a ** 3 * k ** 3) * g
    return integral + 0.5 * g - d1 / 12.0 + d3 / 720.0


def _edge_kernel_parts(M, t, h, n):
    """Central kernel ``K(-L..L)`` and tails ``G[k] = sum_{m=k}^{M} K(m)``.

    ``K`` is the sampled heat kernel truncated at ``|m| <= M`` and
    normalized to unit sum; ``L = min(M, n - 1)``, ``k = 0..n+1``.
    """
    a = h * h / (4.0 * t)
    L = min(M, n - 1)
    k = np.arange(n + 2)
    if M <= WIDE_KERNEL_OFFSETS:
        m = np.arange(M + 1)
        K = np.exp(-a * m * m)
        Z = K[0] + 2.0 * K[1:].sum()
        tail = np.concatenate((np.cumsum(K[::-1])[::-1], [0.0]))
        G = tail[np.minimum(k, M + 1)] / Z
        central = K[np.abs(np.arange(-L, L + 1))] / Z
        return central, G
    beyond = _gauss_tail_sum(M + 1, a)
    Z = 2.0 * (_gauss_tail_sum(0, a) - beyond) - 1.0
    G = np.where(k <= M, _gauss_tail_sum(k, a) - beyond, 0.0) / Z
    central = np.exp(-a * np.arange(-L, L + 1) ** 2) / Z
    return central, G


def _heat_axis_edge(a, axis, t, h):
    a = np.moveaxis(a, axis, -1)
    n = a.shape[-1]
    M = int(math.floor(KERNEL_STDS * math.sqrt(2.0 * t) / h))
    L = min(M, n - 1)
    K, G = _edge_kernel_parts(M, t, h, n)
    full = fftconvolve(a, K.reshape((1,) * (a.ndim - 1) + (-1,)), mode="full", axes=-1)
    out = full[..., L:L + n]
    j = np.arange(n)
    left = G[j + 1]
    right = G[n - j]
    out = out + a[..., :1] * left + a[..., -1:] * right
    return np.moveaxis(out, -1, axis)


def _heat_axis_periodic(a, axis, t, h, complement=False):
    n = a.shape[axis]
    mult, comp = _periodic_multipliers(t, n, h)
    m = comp if complement else mult
    shape = [1] * a.ndim
    shape[axis] = n
    return np.real(np.fft.ifft(np.fft.fft(a, axis=axis) * m.reshape(shape), axis=axis))


class HeatSemigroup:
    """Gauss-Weierstrass semigroup ``T_t f = k_t * f`` on grid functions.

    The kernel ``k_t`` is sampled on the grid, truncated at six standard
    deviations ``sqrt(2 t)``, and renormalized to unit mass. On periodic
    grids the wrapped kernel is applied as an exact Fourier multiplier.
    When ``sqrt(2 t) < h / 4`` the kernel is narrower than the grid and
    ``x + t * Laplacian_h x`` is returned instead.
    """

    def __init__(self, dimension=1):
        if dimension not in (1, 2):
            raise DomainError("heat semigroup dimension must be 1 or 2")
        self.dimension = dimension

    def _check(self, x):
        kind = "grid1d" if self.dimension == 1 else "grid2d"
        if not isinstance(x, StateVector) or x.kind != kind:
            raise ShapeError(f"heat semigroup in {self.dimension}d needs a {kind} state")

    def _small_time(self, t, x):
        return math.sqrt(2.0 * t) < x.spacing / 4.0

    def _apply_samples(self, t, x, complement=False):
        if self._small_time(t, x):
            lap = _discrete_laplacian(x)
            return -t * lap if complement else x.samples + t * lap
        a = x.samples
        if x.extension is ExtensionPolicy.PERIODIC:
            if complement:
                # 1 - prod(m_i) = 1 - m_0 + m_0 * (1 - m_1)
                out = _heat_axis_periodic(a, 0, t, x.spacing, complement=True)
                if a.ndim == 2:
                    first = _heat_axis_periodic(a, 0, t, x.spacing)
                    out = out + _heat_axis_periodic(first, 1, t, x.spacing, complement=True)
                return out
            for ax in range(a.ndim):
                a = _heat_axis_periodic(a, ax, t, x.spacing)
            return a
        for ax in range(a.ndim):
            a = _heat_axis_edge(a, ax, t, x.spacing)
        return x.samples - a if complement else a

    def apply(self, t, x):
        self._check(x)
        if t < 0:
            raise DomainError("semigroup time must be nonnegative")
        if t == 0:
            return x
        return x.with_samples(self._apply_samples(t, x))

    def _periodic_1d_many(self, times, x, complement):
        # one forward FFT shared by all times
        spec = np.fft.fft(x.samples)
        n, h = x.samples.size, x.spacing
        out = np.empty((times.size, n))
        small = np.array([t == 0 or self._small_time(t, x) for t in times])
        for i in np.flatnonzero(small):
            if times[i] == 0:
                out[i] = 0.0 if complement else x.samples
            else:
                out[i] = self._apply_samples(times[i], x, complement)
        idx = np.flatnonzero(~small)
        if len(idx):
            mults = _periodic_multipliers_many(times[idx], n, h, complement)
            out[idx] = np.real(np.fft.ifft(spec[None, :] * mults, axis=1))
        return out

    def _edge_1d_many(self, times, x, complement):
        # kernels zero-padded to the widest possible support, batched FFTs
        a, h = x.samples, x.spacing
        n = a.size
        size = next_fast_len(3 * n - 2, real=True)
        spec = np.fft.rfft(a, size)
        j = np.arange(n)
        out = np.empty((times.size, n))
        small = np.array([t == 0 or self._small_time(t, x) for t in times])
        for i in np.flatnonzero(small):
            if times[i] == 0:
                out[i] = 0.0 if complement else a
            else:
                out[i] = self._apply_samples(times[i], x, complement)
        idx = np.flatnonzero(~small)
        for start in range(0, idx.size, 64):
            rows = idx[start:start + 64]
            kernels = np.zeros((rows.size, size))
            edges = np.empty((rows.size, n))
            for r, i in enumerate(rows):
                M = int(math.floor(KERNEL_STDS * math.sqrt(2.0 * times[i]) / h))
                L = min(M, n - 1)
                K, G = _edge_kernel_parts(M, times[i], h, n)
                kernels[r, n - 1 - L:n + L] = K
                edges[r] = a[0] * G[j + 1] + a[-1] * G[n - j]
            full = np.fft.irfft(np.fft.rfft(kernels, axis=1) * spec, size, axis=1)
            block = full[:, n - 1:2 * n - 1] + edges
            out[rows] = a - block if complement else block
        return out

    def apply_many(self, times, x):
        self._check(x)
        times = np.asarray(times, float).reshape(-1)
        if self.dimension == 1 and x.extension is ExtensionPolicy.PERIODIC:
            return self._periodic_1d_many(times, x, False)
        if self.dimension == 1:
            return self._edge_1d_many(times, x, False)
        return np.stack(ordered_map(
            lambda t: x.samples.copy() if t == 0 else self._apply_samples(t, x), times))

    def increment_many(self, times, x):
        self._check(x)
        times = np.asarray(times, float).reshape(-1)
        if self.dimension == 1 and x.extension is ExtensionPolicy.PERIODIC:
            return self._periodic_1d_many(times, x, True)
        if self.dimension == 1:
            return self._edge_1d_many(times, x, True)
        return np.stack(ordered_map(
            lambda t: np.zeros(x.shape) if t == 0
            else self._apply_samples(t, x, complement=True), times))

    def generator(self, x):
        self._check(x)
        return x.with_samples(-_discrete_laplacian(x))

    def __repr__(self):
        return f"HeatSemigroup(dim={self.dimension})"


def _check_time(t):
    if not t >= 0:
        raise DomainError(f"semigroup time must be nonnegative, got {t}")


def apply(T, t, x):
    """``T_t x``."""
    _check_time(t)
    return T.apply(float(t), x)


def apply_many(T, times, x):
    """``T_t x`` for every ``t`` in ``times``, stacked along axis 0."""
    times = np.asarray(times, float)
    if np.any(times < 0):
        raise DomainError("semigroup times must be nonnegative")
    return T.apply_many(times, x)


def increment(T, t, x):
    """``x - T_t x`` computed without cancellation at small ``t``."""
    _check_time(t)
    return x.with_samples(T.increment_many([float(t)], x)[0])


def generator_apply(T, x):
    """``A x`` where ``T_t = exp(-t A)``; for heat this is ``-Laplacian_h x``."""
    return T.generator(x)


def write_state_csv(x: StateVector, target=None):
    """CSV ``i,value`` (finite), ``x,value`` (1d) or ``x,y,value`` (2d)."""
    buf = io.StringIO()
    if x.kind == "finite":
        buf.write("i,value\n")
        for i, v in enumerate(x.samples):
            buf.write(f"{i},{v:.17g}\n")
    elif x.kind == "grid1d":
        buf.write("x,value\n")
        for c, v in zip(x.coords()[0], x.samples):
            buf.write(f"{c:.17g},{v:.17g}\n")
    else:
        buf.write("x,y,value\n")
        cx, cy = x.coords()
        for i, c in enumerate(cx):
            for j, d in enumerate(cy):
                buf.write(f"{c:.17g},{d:.17g},{x.samples[i, j]:.17g}\n")
    text = buf.getvalue()
    if target is None:
        return text
    with open(target, "w", newline="") as fh:
        fh.write(text)
    return None


def _read_text(source):
    if hasattr(source, "read"):
        return source.read()
    with open(source) as fh:
        return fh.read()


def _uniform_spacing(coords, name):
    if coords.size < 2:
        raise ParseError(f"need at least two {name} coordinates")
    d = np.diff(coords)
    h = (coords[-1] - coords[0]) / (coords.size - 1)
    if not h > 0 or np.max(np.abs(d - h)) > 1e-9 * h:
        raise ParseError(f"{name} coordinates are not uniformly spaced")
    return h


def read_state_csv(source, extension="constant_edge"):
    """Read a state written by :func:`write_state_csv`.

    Grid spacing must be uniform to ``1e-9 * h``. The extension policy is not
    stored in the file and is taken from ``extension``.
    """
    rows = [r for r in csv.reader(io.StringIO(_read_text(source))) if r]
    if not rows:
        raise ParseError("empty state file")
    header = [c.strip() for c in rows[0]]
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:]], float)
    except ValueError as exc:
        raise ParseError(f"non-numeric entry: {exc}") from exc
    if data.size == 0 or data.shape[1] != len(header):
        raise ParseError("state file has no rows or ragged rows")
    try:
        if header == ["i", "value"]:
            order = np.argsort(data[:, 0], kind="stable")
            return StateVector.finite(data[order, 1])
        if header == ["x", "value"]:
            order = np.argsort(data[:, 0], kind="stable")
            xs = data[order, 0]
            h = _uniform_spacing(xs, "x")
            return StateVector.grid1d(data[order, 1], h, extension, xs[0])
        if header == ["x", "y", "value"]:
            xs, ys = np.unique(data[:, 0]), np.unique(data[:, 1])
            if xs.size * ys.size != data.shape[0]:
                raise ParseError("2d grid is incomplete")
            hx, hy = _uniform_spacing(xs, "x"), _uniform_spacing(ys, "y")
            if abs(hx - hy) > 1e-9 * hx:
                raise ParseError("2d grid needs equal spacing in x and y")
            order = np.lexsort((data[:, 1], data[:, 0]))
            samples = data[order, 2].reshape(xs.size, ys.size)
            return StateVector.grid2d(samples, hx, extension, (xs[0], ys[0]))
    except (DomainError, ShapeError) as exc:
        raise ParseError(str(exc)) from exc
    raise ParseError(f"unrecognized state header {rows[0]}")


def read_matrix_csv(source):
    """Square matrix, one row per line, symmetry checked to ``1e-12 * |A|``."""
    rows = [r for r in csv.reader(io.StringIO(_read_text(source))) if r]
    try:
        A = np.array([[float(c) for c in r] for r in rows], float)
    except ValueError as exc:
        raise ParseError(f"non-numeric matrix entry: {exc}") from exc
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.size == 0:
        raise ParseError("matrix must be square")
    norm = np.max(np.abs(A))
    if np.max(np.abs(A - A.T)) > 1e-12 * norm:
        raise ParseError("matrix is not symmetric")
    return A


def write_matrix_csv(A, target=None):
    text = "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in np.asarray(A))
    if target is None:
        return text
    with open(target, "w", newline="") as fh:
        fh.write(text)
    return None
