"""
Besov and Sobolev norms of grid fields, and the peak operator.

Besov norms use the Littlewood-Paley bands of :mod:`besovbilin.windows`:

    ||f||_{B^s_{p,q}} = ( sum_{l=0}^{l_max} 2^{l s q} ||psi_l(D) f||_{L^p}^q )^{1/q}

with ``l_max`` chosen from the grid so that the bands sum to one on the whole
frequency lattice; on grid data the truncated sum is then the full sum.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .grid import (
    GridSpec,
    SampledField,
    _forward,
    _inverse,
    apply_multiplier,
    lp_norm,
)
from .windows import CubeCell, DyadicRescale, LPBand, Shift, SobolevWeight

__all__ = [
    "BesovParams",
    "SobolevParams",
    "default_lmax",
    "lp_project",
    "besov_band_norms",
    "besov_norm",
    "sobolev_norm",
    "peak_kernel",
    "peak_operator",
    "square_function",
    "SquareFunctionReport",
    "square_function_check",
    "square_estimate_ratio",
]


def default_lmax(grid: GridSpec) -> int:
    """Smallest ``l`` with ``2^l`` above every lattice frequency magnitude."""
    rmax = grid.nyquist * math.sqrt(grid.dim)
    return max(0, math.ceil(math.log2(rmax)))


@dataclass(frozen=True)
class BesovParams:
    s: float
    p: float = 2.0
    q: float = 2.0
    l_max: int | None = None

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"Besov p must be >= 1, got {self.p}")
        if not self.q > 0:
            raise ValueError(f"Besov q must be > 0, got {self.q}")

    def resolved_lmax(self, grid: GridSpec) -> int:
        return default_lmax(grid) if self.l_max is None else int(self.l_max)


@dataclass(frozen=True)
class SobolevParams:
    s: float
    p: float = 2.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"Sobolev p must be >= 1, got {self.p}")


def lp_project(f: SampledField, level: int) -> SampledField:
    """``psi_level(D) f``."""
    if level < 0:
        raise ValueError("band level must be >= 0")
    return apply_multiplier(LPBand(level), f)


def besov_band_norms(f: SampledField, p: float, l_max: int | None = None) -> list[tuple[int, float]]:
    """``[(l, ||psi_l(D) f||_{L^p}) for l = 0..l_max]`` in ascending ``l``."""
    grid = f.grid
    if l_max is None:
        l_max = default_lmax(grid)
    spec = _forward(grid, f.values)
    xi = grid.frequencies()
    out = []
    for level in range(l_max + 1):
        band = SampledField(grid, _inverse(grid, LPBand(level)(*xi) * spec))
        out.append((level, lp_norm(band, p)))
    return out


def _aggregate(weighted: np.ndarray, q: float) -> float:
    if np.isinf(q):
        return float(weighted.max()) if weighted.size else 0.0
    return float(np.sum(weighted**q) ** (1.0 / q))


def besov_norm(f: SampledField, params: BesovParams) -> float:
    bands = besov_band_norms(f, params.p, params.resolved_lmax(f.grid))
    weighted = np.array([2.0 ** (level * params.s) * b for level, b in bands])
    return _aggregate(weighted, params.q)


def sobolev_norm(f: SampledField, params: SobolevParams) -> float:
    """``||(I - Laplacian)^{s/2} f||_{L^p}``."""
    if params.s == 0:
        return lp_norm(f, params.p)
    return lp_norm(apply_multiplier(SobolevWeight(params.s), f), params.p)


def peak_kernel(grid: GridSpec, R: float, periods: int = 3) -> np.ndarray:
    """Periodized ``R^n (1 + R|x|)^{-n-1}`` on the lattice of offsets.

    Offsets are in wraparound order (offset 0 at index 0), summed over
    ``periods`` copies of the domain per axis.
    """
    n = grid.dim
    d = grid.axis_indices() * grid.dx
    shifts = grid.length * (np.arange(periods) - periods // 2)
    axis = d[:, None] + shifts[None, :]
    kern = np.zeros(grid.shape)
    grids = np.meshgrid(*([np.arange(grid.samples)] * n), indexing="ij")
    for combo in itertools.product(range(periods), repeat=n):
        r2 = sum(axis[g, c] ** 2 for g, c in zip(grids, combo))
        kern += R**n * (1.0 + R * np.sqrt(r2)) ** (-n - 1)
    return kern


def _convolve(grid: GridSpec, kernel: np.ndarray, values: np.ndarray) -> np.ndarray:
    axes = tuple(range(-grid.dim, 0))
    out = np.fft.ifftn(np.fft.fftn(kernel, axes=axes) * np.fft.fftn(values, axes=axes), axes=axes)
    return np.maximum(out.real, 0.0) * grid.dx**grid.dim


def peak_operator(f: SampledField, R: float = 1.0) -> SampledField:
    """``S_R f = zeta_R * |f|`` as a periodic convolution on the grid."""
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    kern = peak_kernel(f.grid, R)
    return SampledField(f.grid, _convolve(f.grid, kern, np.abs(f.values)))


def _spectral_box(grid: GridSpec, spec: np.ndarray, tol: float = 1e-14):
    """Per-axis [min, max] of frequencies where ``|spec| > tol * max|spec|``.

    The default ``tol`` discards FFT rounding noise.
    """
    mag = np.abs(spec)
    if mag.max() == 0:
        return None
    mask = mag > tol * mag.max()
    xi = grid.axis_frequencies()
    box = []
    for ax in range(grid.dim):
        other = tuple(a for a in range(grid.dim) if a != ax)
        hit = mask.any(axis=other) if other else mask
        box.append((xi[hit].min(), xi[hit].max()))
    return box


def square_function(f: SampledField, R: float) -> np.ndarray:
    """Pointwise ``(sum_nu |phi(R^{-1}(D - nu)) f|^2)^{1/2}`` over ``nu in Z^n``.

    ``phi`` is the unit cube cell; only ``nu`` whose window meets the spectral
    support of ``f`` are summed (the rest contribute exactly zero).
    """
    grid = f.grid
    spec = _forward(grid, f.values)
    box = _spectral_box(grid, spec)
    if box is None:
        return np.zeros(grid.shape)
    xi = grid.frequencies()
    ranges = [range(math.floor(lo - R), math.ceil(hi + R) + 1) for lo, hi in box]
    base = DyadicRescale(CubeCell((0.0,) * grid.dim), math.log2(R))
    acc = np.zeros(grid.shape)
    for nu in itertools.product(*ranges):
        w = Shift(base, nu)(*xi)
        if not np.any(w):
            continue
        piece = _inverse(grid, w * spec)
        acc += np.abs(piece) ** 2
    return np.sqrt(acc)


@dataclass(frozen=True)
class SquareFunctionReport:
    R: float
    p: float
    p_tilde: float
    square_norm: float
    reference: float
    ratio: float


def square_function_check(f: SampledField, R: float, p: float, p_tilde: float) -> SquareFunctionReport:
    """Ratio of the square-function norm in ``L^{p_tilde}`` to ``R^{n(1/2+1/p-1/p_tilde)} ||f||_p``."""
    if not 2 <= p <= p_tilde:
        raise ValueError(f"need 2 <= p <= p_tilde, got p={p}, p_tilde={p_tilde}")
    if not R >= 1:
        raise ValueError(f"need R >= 1, got {R}")
    grid = f.grid
    sq = SampledField(grid, square_function(f, R))
    L = lp_norm(sq, p_tilde)
    inv_pt = 0.0 if np.isinf(p_tilde) else 1.0 / p_tilde
    ref = R ** (grid.dim * (0.5 + 1.0 / p - inv_pt)) * lp_norm(f, p)
    ratio = 0.0 if L == 0 else L / ref
    return SquareFunctionReport(R, p, p_tilde, L, ref, ratio)


def square_estimate_ratio(f: SampledField, R: float) -> float:
    """``max_x`` of the square function over ``R^{n/2} S_R(|f|^2)^{1/2}``."""
    grid = f.grid
    sq = square_function(f, R)
    if not np.any(sq):
        return 0.0
    peak = peak_operator(SampledField(grid, np.abs(f.values) ** 2), R).values.real
    denom = R ** (grid.dim / 2) * np.sqrt(peak)
    return float(np.max(sq / denom))
