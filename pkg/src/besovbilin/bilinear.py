"""
Bilinear pseudo-differential operators on the periodic grid.

    T(f1, f2)(x) = (2 pi)^{-2n} sum_{m1, m2} exp(i x.(xi1 + xi2)) sigma(x, xi1, xi2)
                   f1^(xi1) f2^(xi2) dxi^{2n}

Three evaluation paths are provided: a direct quadrature of the double sum
(any symbol), a row-by-row path for x-independent symbols, and a product of
two Fourier multipliers per term for separable symbols.  All three agree to
rounding wherever more than one applies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import GridMismatchError, NonFiniteError
from .grid import (
    GridSpec,
    SampledField,
    _forward,
    _inverse,
    inner_product,
    require_same_grid,
)
from .windows import CubeCell, LPBand, Window, WindowProduct

__all__ = [
    "SeparableTerm",
    "Symbol",
    "SeparableSum",
    "XIndependentSampled",
    "GeneralSampled",
    "SymbolPiece",
    "apply_bilinear",
    "apply_bilinear_bruteforce",
    "apply_bilinear_xindep",
    "apply_bilinear_separable",
    "trilinear_pairing",
    "decompose_symbol",
    "recompose_symbol",
    "LeakageReport",
    "support_check",
    "pointwise_bound_check",
    "lattice_pairings",
    "lattice_sum",
]

# Rows of the (x, xi) phase matrix processed at once.
_CHUNK = 2**22
# Spectral entries below this fraction of the peak are FFT rounding noise.
_SPARSITY_TOL = 1e-14


def _as_components(xi) -> tuple:
    return tuple(xi) if isinstance(xi, tuple) else (xi,)


@dataclass(frozen=True)
class SeparableTerm:
    coefficient: float
    m1: Window
    m2: Window

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise NonFiniteError(f"non-finite coefficient {self.coefficient}")


class Symbol:
    """Base class for the three symbol representations."""

    x_dependent = False


@dataclass(frozen=True, eq=False)
class SeparableSum(Symbol):
    """``sigma(xi1, xi2) = sum_t c_t m1_t(xi1) m2_t(xi2)``."""

    terms: tuple[SeparableTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def evaluate(self, xi1, xi2) -> np.ndarray:
        """Pointwise value; ``xi1``/``xi2`` are arrays (n=1) or component tuples."""
        a, b = _as_components(xi1), _as_components(xi2)
        out = 0.0
        for t in self.terms:
            out = out + t.coefficient * np.asarray(t.m1(*a)) * np.asarray(t.m2(*b))
        return np.broadcast_to(out, np.broadcast(*a, *b).shape) if np.ndim(out) == 0 else out

    def lattice_factors(self, grid: GridSpec):
        xi = grid.frequencies()
        return [(t.coefficient, np.asarray(t.m1(*xi)), np.asarray(t.m2(*xi))) for t in self.terms]

    def sample(self, grid: GridSpec) -> XIndependentSampled:
        size = grid.samples**grid.dim
        if size * size > 2**26:
            raise MemoryError(f"sampling a separable symbol on {size}^2 lattice points is too large")
        vals = np.zeros(grid.shape * 2, dtype=complex)
        for c, a, b in self.lattice_factors(grid):
            vals += c * np.multiply.outer(a, b)
        return XIndependentSampled(grid, vals)


@dataclass(frozen=True, eq=False)
class XIndependentSampled(Symbol):
    """Symbol values on the (xi1, xi2) lattice, both axes in wraparound order."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.size != (self.grid.samples**self.grid.dim) ** 2:
            raise GridMismatchError(f"symbol has {v.size} samples, grid needs {self.grid.shape * 2}")
        v = v.reshape(self.grid.shape * 2)
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("symbol samples contain non-finite values")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True, eq=False)
class GeneralSampled(Symbol):
    """Symbol values ``sigma(x_k, xi1, xi2)`` for one-dimensional grids.

    ``values`` has shape ``(N, M, M)``: ``x`` in lattice order, the two
    frequency axes on the central ``M``-point sublattice ``m in [-M/2, M/2)``
    in wraparound order.  The symbol is taken to vanish outside that band, so
    inputs must be band-limited inside it.
    """

    grid: GridSpec
    values: np.ndarray
    x_dependent = True

    def __post_init__(self):
        if self.grid.dim != 1:
            raise ValueError("general sampled symbols are implemented for dim = 1 only")
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[0] != self.grid.samples or v.shape[1] != v.shape[2]:
            raise GridMismatchError(f"general symbol must have shape (N, M, M), got {v.shape}")
        M = v.shape[1]
        if M > self.grid.samples or M & (M - 1):
            raise GridMismatchError(f"M must be a power of two <= N, got {M}")
        if not np.all(np.isfinite(v)):
            raise NonFiniteError("symbol samples contain non-finite values")
        object.__setattr__(self, "values", v)

    @property
    def band_samples(self) -> int:
        return self.values.shape[1]

    def band_indices(self) -> np.ndarray:
        M = self.band_samples
        return np.fft.fftfreq(M, d=1.0 / M).round().astype(int)

    def band_frequencies(self) -> np.ndarray:
        return self.band_indices() * self.grid.dxi

    def to_band(self, flat_idx: np.ndarray) -> np.ndarray:
        """Map N-lattice array indices to M-band indices, -1 where outside."""
        N, M = self.grid.samples, self.band_samples
        m = np.where(flat_idx < N // 2, flat_idx, flat_idx - N)
        inside = (m >= -M // 2) & (m < M // 2)
        return np.where(inside, m % M, -1)

    @classmethod
    def from_function(cls, grid: GridSpec, M: int, fn) -> GeneralSampled:
        """Sample ``fn(x, xi1, xi2)`` with broadcasting."""
        x = grid.axis_positions()[:, None, None]
        band = np.fft.fftfreq(M, d=1.0 / M).round() * grid.dxi
        vals = np.broadcast_to(fn(x, band[None, :, None], band[None, None, :]), (grid.samples, M, M))
        return cls(grid, np.array(vals, dtype=complex))


def _flat_lattice(grid: GridSpec):
    """Integer space indices (K, n) and signed frequency indices (K, n)."""
    k = np.stack([g.ravel() for g in np.meshgrid(*([np.arange(grid.samples)] * grid.dim), indexing="ij")], 1)
    m = np.stack([g.ravel() for g in np.meshgrid(*([grid.axis_indices()] * grid.dim), indexing="ij")], 1)
    return k, m


def _phases(grid: GridSpec, k: np.ndarray, m: np.ndarray) -> np.ndarray:
    """``exp(i x_k . xi_m)`` computed from integer indices to avoid large arguments.

    ``x_k xi_m = -pi m + 2 pi k m / N`` per axis.
    """
    N = grid.samples
    km = (k[:, None, :] * m[None, :, :]) % N
    ang = 2 * np.pi * km.sum(-1) / N
    sign = np.where(m.sum(-1) % 2 == 0, 1.0, -1.0)
    return np.exp(1j * ang) * sign[None, :]


def _check_grid(sigma: Symbol, grid: GridSpec) -> None:
    sg = getattr(sigma, "grid", None)
    if sg is not None and sg != grid:
        raise GridMismatchError(f"symbol grid {sg} differs from field grid {grid}")


def _x_independent_block(sigma: Symbol, grid: GridSpec, i1, i2, m) -> np.ndarray:
    if isinstance(sigma, SeparableSum):
        xi1 = tuple(m[i1, a] * grid.dxi for a in range(grid.dim))
        xi2 = tuple(m[i2, a] * grid.dxi for a in range(grid.dim))
        block = np.zeros((len(i1), len(i2)), dtype=complex)
        for t in sigma.terms:
            block += t.coefficient * np.multiply.outer(t.m1(*xi1), t.m2(*xi2))
        return block
    if isinstance(sigma, XIndependentSampled):
        size = grid.samples**grid.dim
        return sigma.values.reshape(size, size)[np.ix_(i1, i2)]
    raise TypeError(f"unsupported symbol type {type(sigma).__name__}")


def _support(F: np.ndarray) -> np.ndarray:
    mag = np.abs(F)
    peak = mag.max()
    return np.flatnonzero(mag > _SPARSITY_TOL * peak) if peak > 0 else np.array([], dtype=int)


def apply_bilinear_bruteforce(sigma: Symbol, f1: SampledField, f2: SampledField) -> SampledField:
    """Direct evaluation of the defining double sum.

    Only lattice frequencies where the input spectra are nonzero are summed;
    entries below ``1e-14`` of the spectral peak count as zero.
    """
    grid = require_same_grid(f1, f2)
    _check_grid(sigma, grid)
    F1 = _forward(grid, f1.values).ravel()
    F2 = _forward(grid, f2.values).ravel()
    i1, i2 = _support(F1), _support(F2)
    out = np.zeros(F1.size, dtype=complex)
    if i1.size == 0 or i2.size == 0:
        return SampledField(grid, out)
    k, m = _flat_lattice(grid)

    if isinstance(sigma, GeneralSampled):
        a1, a2 = sigma.to_band(i1), sigma.to_band(i2)
        if np.any(a1 < 0) or np.any(a2 < 0):
            raise ValueError("input spectrum extends beyond the sampled band of the symbol")
        block = None
    else:
        block = _x_independent_block(sigma, grid, i1, i2, m)

    per_row = i1.size * i2.size if block is None else i1.size + i2.size
    rows = max(1, _CHUNK // per_row)
    for start in range(0, F1.size, rows):
        sl = slice(start, start + rows)
        E1 = _phases(grid, k[sl], m[i1]) * F1[i1]
        E2 = _phases(grid, k[sl], m[i2]) * F2[i2]
        if block is None:
            S = sigma.values[sl][:, a1][:, :, a2]
            out[sl] = np.einsum("km,kmn,kn->k", E1, S, E2)
        else:
            out[sl] = np.sum((E1 @ block) * E2, axis=1)
    out *= (grid.dxi / (2 * np.pi)) ** (2 * grid.dim)
    return SampledField(grid, out)


def apply_bilinear_xindep(sigma: Symbol, f1: SampledField, f2: SampledField) -> SampledField:
    """Row-by-row evaluation for symbols without x dependence.

    ``T(x) = (2 pi)^{-n} dxi^n sum_{m1} exp(i x.xi_{m1}) f1^(xi_{m1}) F^{-1}[sigma(xi_{m1}, .) f2^](x)``.
    """
    if sigma.x_dependent:
        raise ValueError("the x-independent path cannot evaluate an x-dependent symbol")
    grid = require_same_grid(f1, f2)
    _check_grid(sigma, grid)
    size = grid.samples**grid.dim
    F1 = _forward(grid, f1.values).ravel()
    F2 = _forward(grid, f2.values).ravel()
    i1 = _support(F1)
    acc = np.zeros(grid.shape, dtype=complex)
    if i1.size == 0 or not np.any(F2):
        return SampledField(grid, acc)
    k, m = _flat_lattice(grid)
    all_idx = np.arange(size)
    batch = max(1, _CHUNK // size)
    for start in range(0, i1.size, batch):
        idx = i1[start : start + batch]
        rows = _x_independent_block(sigma, grid, idx, all_idx, m)
        inner = _inverse(grid, (rows * F2[None, :]).reshape((idx.size,) + grid.shape))
        phase = (_phases(grid, k, m[idx]) * F1[idx]).T.reshape((idx.size,) + grid.shape)
        acc += np.sum(phase * inner, axis=0)
    acc *= (grid.dxi / (2 * np.pi)) ** grid.dim
    return SampledField(grid, acc)


def apply_bilinear_separable(sigma: SeparableSum, f1: SampledField, f2: SampledField) -> SampledField:
    """``sum_t c_t (m1_t(D) f1)(m2_t(D) f2)``."""
    if not isinstance(sigma, SeparableSum):
        raise TypeError("the separable path needs a SeparableSum symbol")
    grid = require_same_grid(f1, f2)
    F1 = _forward(grid, f1.values)
    F2 = _forward(grid, f2.values)
    xi = grid.frequencies()
    out = np.zeros(grid.shape, dtype=complex)
    for t in sigma.terms:
        a = np.asarray(t.m1(*xi))
        b = np.asarray(t.m2(*xi))
        if not (np.any(a * F1) and np.any(b * F2)):
            continue
        out += t.coefficient * _inverse(grid, a * F1) * _inverse(grid, b * F2)
    return SampledField(grid, out)


def apply_bilinear(sigma: Symbol, f1: SampledField, f2: SampledField, path: str = "auto") -> SampledField:
    """Dispatch to one evaluation path: ``auto``, ``separable``, ``xindep`` or ``brute``."""
    if path == "auto":
        if isinstance(sigma, SeparableSum):
            path = "separable"
        elif sigma.x_dependent:
            path = "brute"
        else:
            path = "xindep"
    if path == "separable":
        return apply_bilinear_separable(sigma, f1, f2)
    if path == "xindep":
        return apply_bilinear_xindep(sigma, f1, f2)
    if path == "brute":
        return apply_bilinear_bruteforce(sigma, f1, f2)
    raise ValueError(f"unknown evaluation path {path!r}")


def trilinear_pairing(sigma: Symbol, f1: SampledField, f2: SampledField, g: SampledField, path: str = "auto") -> complex:
    """``<T(f1, f2), g>`` with the conjugate on ``g``."""
    return inner_product(apply_bilinear(sigma, f1, f2, path), g)


@dataclass(frozen=True, eq=False)
class SymbolPiece:
    """One localized piece of a symbol.

    The piece is ``[psi_j(D_x) sigma] psi_{k1}(xi1) psi_{k2}(xi2) phi(xi1 - nu1) phi(xi2 - nu2)``.
    """

    base: Symbol
    j: int
    K: tuple[int, int]
    nu: tuple[tuple[int, ...], tuple[int, ...]]
    symbol: Symbol

    @property
    def box_center(self) -> tuple[int, ...]:
        return tuple(a + b for a, b in zip(*self.nu))

    @property
    def box_halfwidth(self) -> float:
        return 2.0 ** (self.j + 2)


def _nu_tuple(nu, dim: int) -> tuple[int, ...]:
    t = tuple(int(v) for v in np.atleast_1d(nu))
    if len(t) != dim:
        raise ValueError(f"lattice point {nu} has wrong dimension for dim={dim}")
    return t


def _symbol_dim(sigma: Symbol) -> int:
    grid = getattr(sigma, "grid", None)
    return 1 if grid is None else grid.dim


def decompose_symbol(sigma: Symbol, j: int, K, nu) -> SymbolPiece:
    """Materialize the ``(j, K, nu)`` piece of ``sigma``."""
    k1, k2 = (int(k) for k in K)
    if j < 0 or k1 < 0 or k2 < 0:
        raise ValueError("j, k1, k2 must be nonnegative")
    dim = _symbol_dim(sigma)
    nu1, nu2 = (_nu_tuple(v, dim) for v in nu)
    w1 = WindowProduct((LPBand(k1), CubeCell(nu1)))
    w2 = WindowProduct((LPBand(k2), CubeCell(nu2)))

    if isinstance(sigma, SeparableSum):
        # psi_j(D_x) acts on a constant in x: psi_0(0) = 1, psi_j(0) = 0 for j >= 1.
        terms = () if j > 0 else tuple(
            SeparableTerm(t.coefficient, WindowProduct((t.m1, w1)), WindowProduct((t.m2, w2))) for t in sigma.terms
        )
        piece = SeparableSum(terms)
    elif isinstance(sigma, XIndependentSampled):
        grid = sigma.grid
        if j > 0:
            piece = XIndependentSampled(grid, np.zeros_like(sigma.values))
        else:
            xi = grid.frequencies()
            piece = XIndependentSampled(grid, sigma.values * np.multiply.outer(w1(*xi), w2(*xi)))
    elif isinstance(sigma, GeneralSampled):
        grid = sigma.grid
        zeta = grid.axis_frequencies()
        filtered = np.fft.ifft(LPBand(j)(zeta)[:, None, None] * np.fft.fft(sigma.values, axis=0), axis=0)
        band = sigma.band_frequencies()
        piece = GeneralSampled(grid, filtered * np.multiply.outer(w1(band), w2(band))[None])
    else:
        raise TypeError(f"unsupported symbol type {type(sigma).__name__}")
    return SymbolPiece(sigma, int(j), (k1, k2), (nu1, nu2), piece)


@dataclass(frozen=True, eq=False)
class Recomposition:
    values: np.ndarray
    coverage_defect: float
    pieces: int


def recompose_symbol(sigma: Symbol, j_max: int, k_max: int, nu_bound: int) -> Recomposition:
    """Sum all pieces with ``j <= j_max``, ``k_i <= k_max``, ``|nu_i| <= nu_bound``.

    Works on sampled symbols.  ``coverage_defect`` is the largest
    ``|sigma| |1 - (total window weight)|`` over the lattice, relative to
    ``max |sigma|``; a nonzero defect means the truncation misses part of the
    symbol's support.
    """
    if isinstance(sigma, XIndependentSampled):
        grid = sigma.grid
        xi1 = xi2 = grid.frequencies()
        js = [0]
        x_cov = 0.0
    elif isinstance(sigma, GeneralSampled):
        grid = sigma.grid
        xi1 = xi2 = (sigma.band_frequencies(),)
        js = list(range(j_max + 1))
        zeta = grid.axis_frequencies()
        x_cov = float(np.max(np.abs(1.0 - sum(LPBand(j)(zeta) for j in js))))
    else:
        raise TypeError("recompose_symbol needs a sampled symbol; call SeparableSum.sample first")
    dim = grid.dim
    total = np.zeros_like(sigma.values)
    nus = list(itertools.product(range(-nu_bound, nu_bound + 1), repeat=dim))
    count = 0
    for j in js:
        for k1, k2 in itertools.product(range(k_max + 1), repeat=2):
            for nu1 in nus:
                a = LPBand(k1)(*xi1) * CubeCell(nu1)(*xi1)
                if not np.any(a):
                    continue
                for nu2 in nus:
                    b = LPBand(k2)(*xi2) * CubeCell(nu2)(*xi2)
                    if not np.any(b):
                        continue
                    total += decompose_symbol(sigma, j, (k1, k2), (nu1, nu2)).symbol.values
                    count += 1
    cov1 = sum(LPBand(k)(*xi1) for k in range(k_max + 1)) * sum(CubeCell(nu)(*xi1) for nu in nus)
    cov = np.multiply.outer(cov1, cov1)
    if isinstance(sigma, GeneralSampled):
        cov = cov[None]
    scale = np.max(np.abs(sigma.values)) or 1.0
    defect = float(np.max(np.abs(sigma.values) * np.abs(1.0 - cov)) / scale)
    return Recomposition(total, max(defect, x_cov if np.any(sigma.values) else 0.0), count)


@dataclass(frozen=True)
class LeakageReport:
    leakage: float
    center: tuple[int, ...]
    halfwidth: float
    total_mass: float


def support_check(piece: SymbolPiece, f1: SampledField, f2: SampledField, halfwidth: float | None = None) -> LeakageReport:
    """Fraction of spectral l2 mass of ``T_piece(f1, f2)`` outside ``nu1 + nu2 + [-h, h]^n``.

    ``h`` defaults to ``2^{j+2}``.  Distances are measured on the periodic
    frequency lattice.
    """
    grid = require_same_grid(f1, f2)
    h = piece.box_halfwidth if halfwidth is None else float(halfwidth)
    T = apply_bilinear(piece.symbol, f1, f2)
    mass = np.abs(_forward(grid, T.values)) ** 2
    total = float(mass.sum())
    if total == 0:
        return LeakageReport(0.0, piece.box_center, h, 0.0)
    span = grid.samples * grid.dxi
    inside = np.ones(grid.shape, dtype=bool)
    for comp, c in zip(grid.frequencies(), piece.box_center):
        d = (comp - c + span / 2) % span - span / 2
        inside &= np.abs(d) <= h + 1e-9 * grid.dxi
    return LeakageReport(float(mass[~inside].sum() / total), piece.box_center, h, total)


def pointwise_bound_check(piece: SymbolPiece, f1: SampledField, f2: SampledField, class_spec, n_decay: float = 0.0) -> float:
    """``max_x |T_piece(f1, f2)(x)| / (w S(f1)(x) S(f2)(x))``.

    ``w`` is ``class_spec.band_weight(k1, k2) * 2^{-j n_decay}``; ``S`` is the
    peak operator with ``R = 1``.
    """
    from .norms import peak_operator

    grid = require_same_grid(f1, f2)
    if not (np.any(f1.values) and np.any(f2.values)):
        return 0.0
    T = apply_bilinear(piece.symbol, f1, f2)
    k1, k2 = piece.K
    weight = class_spec.band_weight(k1, k2) * 2.0 ** (-piece.j * n_decay)
    denom = weight * peak_operator(f1).values.real * peak_operator(f2).values.real
    return float(np.max(np.abs(T.values) / denom))


def _active_cells(grid: GridSpec, values: np.ndarray) -> list[int]:
    idx = _support(_forward(grid, values).ravel())
    if idx.size == 0:
        return []
    xi = grid.axis_frequencies()[idx]
    return list(range(math.floor(xi.min()) - 1, math.ceil(xi.max()) + 2))


def lattice_pairings(sigma: Symbol, j: int, K, f1: SampledField, f2: SampledField, g: SampledField) -> dict:
    """``{(nu1, nu2): |<T_{sigma_{j,K,nu}}(f1, f2), g>|}`` over all cells that can be nonzero.

    One-dimensional grids only.  Separable symbols at ``j = 0`` are evaluated
    by filtering each input once per cell; other symbols piece by piece.
    """
    grid = require_same_grid(f1, f2, g)
    if grid.dim != 1:
        raise ValueError("lattice_pairings is implemented for dim = 1")
    k1, k2 = K
    cells1 = _active_cells(grid, f1.values)
    cells2 = _active_cells(grid, f2.values)
    out = {}
    if isinstance(sigma, SeparableSum):
        if j > 0:
            return {(a, b): 0.0 for a in cells1 for b in cells2}
        xi, = grid.frequencies()
        F1, F2 = _forward(grid, f1.values), _forward(grid, f2.values)
        gbar = np.conj(g.values) * grid.dx
        w1 = np.array([LPBand(k1)(xi) * CubeCell((a,))(xi) for a in cells1])
        w2 = np.array([LPBand(k2)(xi) * CubeCell((b,))(xi) for b in cells2])
        P = np.zeros((len(cells1), len(cells2)), dtype=complex)
        for t in sigma.terms:
            A = _inverse(grid, w1 * (np.asarray(t.m1(xi)) * F1)[None])
            B = _inverse(grid, w2 * (np.asarray(t.m2(xi)) * F2)[None])
            P += t.coefficient * (A * gbar[None]) @ B.T
        for ia, a in enumerate(cells1):
            for ib, b in enumerate(cells2):
                out[(a, b)] = float(abs(P[ia, ib]))
        return out
    for a in cells1:
        for b in cells2:
            piece = decompose_symbol(sigma, j, K, ((a,), (b,)))
            out[(a, b)] = abs(trilinear_pairing(piece.symbol, f1, f2, g))
    return out


def lattice_sum(pairings: dict, regime: str, lattice) -> float:
    """Sum ``pairings`` over one of the three regimes.

    ``first``: ``nu1`` in ``lattice``, any ``nu2``; ``second``: ``nu2`` in
    ``lattice``; ``diagonal``: ``nu1 + nu2`` in ``lattice``.
    """
    lattice = set(int(v) for v in lattice)
    if regime == "first":
        keep = lambda a, b: a in lattice
    elif regime == "second":
        keep = lambda a, b: b in lattice
    elif regime == "diagonal":
        keep = lambda a, b: a + b in lattice
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return float(sum(v for (a, b), v in pairings.items() if keep(a, b)))
