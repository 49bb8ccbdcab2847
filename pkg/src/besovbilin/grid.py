"""
Periodic grids and scaled discrete Fourier transforms.

The torus ``[-pi P, pi P)^n`` is sampled with ``N`` points per axis, so that

    dx = 2 pi P / N,        dxi = 1 / P,        dx * dxi * N = 2 pi.

The frequency lattice is ``(1/P) Z^n`` truncated to ``m in [-N/2, N/2)``.
Spectral arrays are stored in the usual FFT wraparound order: index ``i``
holds ``m = i`` for ``i < N/2`` and ``m = i - N`` otherwise.

The transforms are Riemann sums of the continuum conventions

    F f(xi)      = int exp(-i x.xi) f(x) dx
    F^{-1} F(x)  = (2 pi)^{-n} int exp(i x.xi) F(xi) dxi

and are exact inverses of each other on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import GridMismatchError, NonFiniteError


@dataclass(frozen=True)
class GridSpec:
    """Periodic grid metadata.

    Parameters
    ----------
    dim : int
        Spatial dimension ``n``.
    samples : int
        Samples per axis ``N``; must be a power of two.
    period_scale : float
        ``P``; the domain is ``[-pi P, pi P)^n``.
    """

    dim: int = 1
    samples: int = 2**14
    period_scale: float = 16.0

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        n = int(self.samples)
        if n != self.samples or n < 2 or n & (n - 1):
            raise ValueError(f"samples must be a power of two, got {self.samples}")
        if not (self.period_scale > 0 and np.isfinite(self.period_scale)):
            raise ValueError(f"period_scale must be positive, got {self.period_scale}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "samples", n)
        object.__setattr__(self, "period_scale", float(self.period_scale))

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.samples,) * self.dim

    @property
    def dx(self) -> float:
        return 2 * np.pi * self.period_scale / self.samples

    @property
    def dxi(self) -> float:
        return 1.0 / self.period_scale

    @property
    def nyquist(self) -> float:
        """Largest representable frequency magnitude per axis, ``N / (2P)``."""
        return self.samples / (2 * self.period_scale)

    @property
    def length(self) -> float:
        return 2 * np.pi * self.period_scale

    def axis_positions(self) -> np.ndarray:
        return -np.pi * self.period_scale + self.dx * np.arange(self.samples)

    def axis_indices(self) -> np.ndarray:
        """Signed frequency indices ``m`` in wraparound order."""
        return np.fft.fftfreq(self.samples, d=1.0 / self.samples).round().astype(int)

    def axis_frequencies(self) -> np.ndarray:
        return self.axis_indices() * self.dxi

    def positions(self) -> tuple[np.ndarray, ...]:
        """Component arrays of the space lattice, each of shape ``self.shape``."""
        x = self.axis_positions()
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))

    def frequencies(self) -> tuple[np.ndarray, ...]:
        """Component arrays of the frequency lattice in wraparound order."""
        xi = self.axis_frequencies()
        return tuple(np.meshgrid(*([xi] * self.dim), indexing="ij"))

    def index_of(self, m) -> tuple[int, ...]:
        """Array index holding the signed lattice frequency ``m`` (per axis)."""
        m = np.atleast_1d(np.asarray(m, dtype=int))
        if m.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} components, got {m.tolist()}")
        half = self.samples // 2
        if np.any(m < -half) or np.any(m >= half):
            raise ValueError(f"lattice index {m.tolist()} outside [-{half}, {half})")
        return tuple(int(v) % self.samples for v in m)

    @cached_property
    def _sign(self) -> np.ndarray:
        # (-1)^(sum of indices): accounts for the domain starting at -pi P.
        s = (-1.0) ** np.arange(self.samples)
        out = s
        for _ in range(self.dim - 1):
            out = np.multiply.outer(out, s)
        return out


DESK_GRID = GridSpec(dim=1, samples=2**14, period_scale=16.0)


def _check_finite(values: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        where = np.argwhere(bad)[0].tolist()
        raise NonFiniteError(f"{what} has {int(bad.sum())} non-finite entries (first at index {where})")


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples ``f(x_k)`` on the space lattice of ``grid``."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.size != self.grid.samples**self.grid.dim:
            raise GridMismatchError(
                f"field has {values.size} samples, grid expects {self.grid.samples**self.grid.dim}"
            )
        values = values.reshape(self.grid.shape)
        _check_finite(values, "field")
        object.__setattr__(self, "values", values)

    def __add__(self, other: SampledField) -> SampledField:
        require_same_grid(self, other)
        return SampledField(self.grid, self.values + other.values)

    def __sub__(self, other: SampledField) -> SampledField:
        require_same_grid(self, other)
        return SampledField(self.grid, self.values - other.values)

    def __mul__(self, c) -> SampledField:
        if isinstance(c, SampledField):
            require_same_grid(self, c)
            return SampledField(self.grid, self.values * c.values)
        return SampledField(self.grid, complex(c) * self.values)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: GridSpec) -> SampledField:
        return cls(grid, np.zeros(grid.shape, dtype=complex))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Complex samples ``F(xi_m)`` on the frequency lattice, wraparound order."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        if values.size != self.grid.samples**self.grid.dim:
            raise GridMismatchError(
                f"spectrum has {values.size} samples, grid expects {self.grid.samples**self.grid.dim}"
            )
        values = values.reshape(self.grid.shape)
        _check_finite(values, "spectrum")
        object.__setattr__(self, "values", values)


def require_same_grid(*fields) -> GridSpec:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(f"grid mismatch: {grid} vs {f.grid}")
    return grid


def _forward(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    # Transforms the trailing ``dim`` axes; leading axes are a batch.
    axes = tuple(range(-grid.dim, 0))
    return grid.dx**grid.dim * grid._sign * np.fft.fftn(values, axes=axes)


def _inverse(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    axes = tuple(range(-grid.dim, 0))
    scale = (grid.dxi * grid.samples / (2 * np.pi)) ** grid.dim
    return scale * np.fft.ifftn(grid._sign * values, axes=axes)


def forward_transform(f: SampledField) -> SpectralField:
    """Scaled DFT ``F(xi_m) = dx^n sum_k exp(-i x_k.xi_m) f(x_k)``."""
    return SpectralField(f.grid, _forward(f.grid, f.values))


def inverse_transform(F: SpectralField) -> SampledField:
    """Scaled inverse DFT ``f(x_k) = (2 pi)^{-n} dxi^n sum_m exp(i x_k.xi_m) F(xi_m)``."""
    return SampledField(F.grid, _inverse(F.grid, F.values))


def sample_multiplier(m, grid: GridSpec) -> np.ndarray:
    """Evaluate a window on the frequency lattice, rejecting non-finite values."""
    values = np.broadcast_to(np.asarray(m(*grid.frequencies())), grid.shape)
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        xi = [float(c[idx]) for c in grid.frequencies()]
        raise NonFiniteError(f"multiplier {m!r} is not finite at frequency {xi}")
    return values


def apply_multiplier(m, f: SampledField) -> SampledField:
    """Fourier multiplier ``m(D) f = F^{-1}[m f^]``."""
    mult = sample_multiplier(m, f.grid)
    return SampledField(f.grid, _inverse(f.grid, mult * _forward(f.grid, f.values)))


def lp_norm(f: SampledField, p: float) -> float:
    """Riemann-sum ``L^p`` norm; ``p = inf`` gives the max modulus."""
    if not p >= 1:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    a = np.abs(f.values)
    if np.isinf(p):
        return float(a.max())
    dv = f.grid.dx**f.grid.dim
    if p == 2:
        return float(np.sqrt(np.sum(a * a) * dv))
    return float((np.sum(a**p) * dv) ** (1.0 / p))


def inner_product(u: SampledField, g: SampledField) -> complex:
    """``<u, g> = sum_k u(x_k) conj(g(x_k)) dx^n`` (conjugate in the second slot)."""
    require_same_grid(u, g)
    return complex(np.vdot(g.values, u.values) * u.grid.dx**u.grid.dim)


def plane_wave(grid: GridSpec, m) -> SampledField:
    """``exp(i x.xi_m)`` for the lattice frequency with signed index ``m``."""
    m = np.atleast_1d(np.asarray(m, dtype=float))
    phase = sum(c * (mi * grid.dxi) for c, mi in zip(grid.positions(), m))
    return SampledField(grid, np.exp(1j * phase))
