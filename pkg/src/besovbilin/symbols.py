"""
Constructors for the sharpness symbols and test functions, and finite
difference estimates of symbol seminorms.

With ``bump``, ``plateau`` and ``annulus`` from
:func:`besovbilin.windows.make_sharpness_windows`:

* Hormander family:  ``sum_k 2^{-kn/2} plateau(2^{-k} xi1) annulus(2^{-k} xi2)``
* product family:    ``(sum_k 2^{m1 k} annulus(2^{-k} xi1)) (sum_k 2^{m2 k} annulus(2^{-k} xi2))``
* mixed family:      ``plateau(xi1) (sum_k 2^{m2 k} annulus(2^{-k} xi2))``

and the test functions have spectra ``bump(xi -/+ 2^j e_1)`` (modulated
bumps) or ``bump(xi)`` (low bump).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bilinear import SeparableSum, SeparableTerm, Symbol, XIndependentSampled
from .exceptions import ConfigError, NonFiniteError, NyquistError
from .grid import GridSpec, SampledField, _inverse, sample_multiplier
from .windows import (
    Constant,
    DyadicRescale,
    FlatBump,
    Shift,
    Window,
    WindowSum,
    make_sharpness_windows,
    window_from_dict,
)

__all__ = [
    "ClassSpec",
    "DEFAULT_K_MIN",
    "max_symbol_k",
    "make_identity_symbol",
    "make_sharpness_symbol_hormander",
    "make_sharpness_symbol_product",
    "make_sharpness_symbol_mixed",
    "make_modulated_bump",
    "make_low_bump",
    "make_random_bandlimited",
    "symbol_from_descriptor",
    "SeminormTable",
    "seminorm_estimate",
]

DEFAULT_K_MIN = 10

BUMP, PLATEAU, ANNULUS = make_sharpness_windows()


@dataclass(frozen=True)
class ClassSpec:
    """Symbol class: ``hormander`` with order ``m`` or ``product`` with ``(m1, m2)``."""

    variant: str = "hormander"
    m: float = 0.0
    m1: float = 0.0
    m2: float = 0.0
    max_order: int = 4

    def __post_init__(self):
        if self.variant not in ("hormander", "product"):
            raise ValueError(f"unknown class variant {self.variant!r}")

    @classmethod
    def hormander(cls, m: float, max_order: int = 4) -> ClassSpec:
        return cls("hormander", m=m, max_order=max_order)

    @classmethod
    def product(cls, m1: float, m2: float, max_order: int = 4) -> ClassSpec:
        return cls("product", m1=m1, m2=m2, max_order=max_order)

    def weight(self, xi1, xi2) -> np.ndarray:
        a, b = np.abs(xi1), np.abs(xi2)
        if self.variant == "hormander":
            return (1.0 + a + b) ** self.m
        return (1.0 + a) ** self.m1 * (1.0 + b) ** self.m2

    def band_weight(self, k1: int, k2: int) -> float:
        """``2^{max(k1,k2) m}`` or ``2^{k1 m1 + k2 m2}``."""
        if self.variant == "hormander":
            return 2.0 ** (max(k1, k2) * self.m)
        return 2.0 ** (k1 * self.m1 + k2 * self.m2)


def max_symbol_k(grid: GridSpec) -> int:
    """Largest dyadic level whose annulus stays inside the Nyquist band."""
    return int(math.floor(math.log2(grid.nyquist))) - 1


def _check_k_range(k_min: int, k_max: int, grid: GridSpec | None) -> None:
    if not 1 <= k_min <= k_max:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    if grid is not None and k_max > max_symbol_k(grid):
        raise NyquistError(
            f"k_max={k_max} exceeds {max_symbol_k(grid)} allowed by Nyquist {grid.nyquist} of {grid}"
        )


def _dyadic_sum(weight_exp: float, k_min: int, k_max: int) -> WindowSum:
    return WindowSum(tuple((2.0 ** (weight_exp * k), DyadicRescale(ANNULUS, k)) for k in range(k_min, k_max + 1)))


def make_identity_symbol() -> SeparableSum:
    """``sigma = 1``, for which ``T(f1, f2) = f1 f2``."""
    return SeparableSum((SeparableTerm(1.0, Constant(1.0), Constant(1.0)),))


def make_sharpness_symbol_hormander(k_min: int = DEFAULT_K_MIN, k_max: int = 12, dim: int = 1, grid: GridSpec | None = None) -> SeparableSum:
    """Truncated Hormander-class sharpness symbol of order ``-dim/2``."""
    _check_k_range(k_min, k_max, grid)
    if grid is not None:
        dim = grid.dim
    terms = tuple(
        SeparableTerm(2.0 ** (-k * dim / 2), DyadicRescale(PLATEAU, k), DyadicRescale(ANNULUS, k))
        for k in range(k_min, k_max + 1)
    )
    return SeparableSum(terms)


def make_sharpness_symbol_product(m1: float, m2: float, k_min: int = DEFAULT_K_MIN, k_max: int = 12, grid: GridSpec | None = None) -> SeparableSum:
    _check_k_range(k_min, k_max, grid)
    return SeparableSum((SeparableTerm(1.0, _dyadic_sum(m1, k_min, k_max), _dyadic_sum(m2, k_min, k_max)),))


def make_sharpness_symbol_mixed(m2: float, k_min: int = DEFAULT_K_MIN, k_max: int = 12, grid: GridSpec | None = None) -> SeparableSum:
    _check_k_range(k_min, k_max, grid)
    return SeparableSum((SeparableTerm(1.0, PLATEAU, _dyadic_sum(m2, k_min, k_max)),))


def symbol_from_descriptor(desc: dict, grid: GridSpec | None = None) -> SeparableSum:
    """Build a separable symbol from a family descriptor.

    Families: ``def-symbol`` (keys ``k_min``, ``k_max``), ``product``
    (``m1``, ``m2``, ``k_min``, ``k_max``), ``mixed`` (``m2``, ``k_min``,
    ``k_max``), ``identity``, and ``separable`` with explicit
    ``terms: [{coefficient, m1, m2}]`` of window descriptors.  ``k_min``
    defaults to 1 and ``k_max`` to the largest level the grid supports.
    """
    if not isinstance(desc, dict) or "family" not in desc:
        raise ConfigError(f"symbol descriptor needs a 'family' key, got {desc!r}")
    fam = desc["family"]
    try:
        if fam == "identity":
            return make_identity_symbol()
        if fam == "separable":
            return SeparableSum(tuple(
                SeparableTerm(float(t.get("coefficient", 1.0)), window_from_dict(t["m1"]), window_from_dict(t["m2"]))
                for t in desc["terms"]
            ))
        default_max = max_symbol_k(grid) if grid is not None else 12
        k_min = int(desc.get("k_min", 1))
        k_max = int(desc.get("k_max", default_max))
        if fam == "def-symbol":
            return make_sharpness_symbol_hormander(k_min, k_max, grid=grid)
        if fam == "product":
            return make_sharpness_symbol_product(float(desc["m1"]), float(desc["m2"]), k_min, k_max, grid=grid)
        if fam == "mixed":
            return make_sharpness_symbol_mixed(float(desc["m2"]), k_min, k_max, grid=grid)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad symbol descriptor {desc!r}: {exc}") from exc
    raise ConfigError(f"unknown symbol family {fam!r}")


def _field_from_spectrum(grid: GridSpec, window: Window) -> SampledField:
    return SampledField(grid, _inverse(grid, sample_multiplier(window, grid)))


def make_modulated_bump(grid: GridSpec, j: int, sign: int) -> SampledField:
    """Field with spectrum ``bump(xi - sign 2^j e_1)``.

    ``sign = -1`` gives the first-slot input, ``sign = +1`` the second.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    if not 2.0**j + BUMP.outer < grid.nyquist:
        raise NyquistError(f"2^{j} + 2^(1/2) is not below the Nyquist frequency {grid.nyquist}")
    offset = (sign * 2.0**j,) + (0.0,) * (grid.dim - 1)
    return _field_from_spectrum(grid, Shift(BUMP, offset))


def make_low_bump(grid: GridSpec) -> SampledField:
    """``F^{-1} bump`` sampled on the grid."""
    return _field_from_spectrum(grid, BUMP)


def make_random_bandlimited(grid: GridSpec, rng: np.random.Generator, radius: float = 8.0, center=0.0) -> SampledField:
    """Random complex field whose spectrum is white noise times a smooth bump.

    The spectrum is supported in ``|xi - center| <= radius`` (center along
    ``e_1`` when a scalar is given).
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.size == 1:
        center = np.concatenate([center, np.zeros(grid.dim - 1)])
    if np.max(np.abs(center)) + radius >= grid.nyquist:
        raise NyquistError(f"band |xi - {center.tolist()}| <= {radius} exceeds Nyquist {grid.nyquist}")
    window = Shift(FlatBump(radius / 2, radius), tuple(center))
    noise = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
    return SampledField(grid, _inverse(grid, noise * sample_multiplier(window, grid)))


# Fourth-order accurate central difference stencils: order -> (offsets, weights).
_STENCILS = {
    0: (np.array([0]), np.array([1.0])),
    1: (np.arange(-2, 3), np.array([1, -8, 0, 8, -1]) / 12.0),
    2: (np.arange(-2, 3), np.array([-1, 16, -30, 16, -1]) / 12.0),
    3: (np.arange(-3, 4), np.array([1 / 8, -1, 13 / 8, 0, -13 / 8, 1, -1 / 8])),
    4: (np.arange(-3, 4), np.array([-1 / 6, 2, -13 / 2, 28 / 3, -13 / 2, 2, -1 / 6])),
}


def _fd_window(w: Window, x: np.ndarray, order: int, h: float) -> np.ndarray:
    offsets, weights = _STENCILS[order]
    out = np.zeros_like(x, dtype=float)
    for o, c in zip(offsets, weights):
        if c:
            out = out + c * np.asarray(w(x + o * h), dtype=float)
    return out / h**order


def _fd_array(values: np.ndarray, order: int, axis: int, h: float) -> np.ndarray:
    offsets, weights = _STENCILS[order]
    out = np.zeros_like(values)
    for o, c in zip(offsets, weights):
        if c:
            out = out + c * np.roll(values, -o, axis=axis)
    return out / h**order


@dataclass
class SeminormTable:
    """Weighted sups of ``d^{b1}_{xi1} d^{b2}_{xi2} sigma`` keyed by ``(alpha, b1, b2)``.

    ``per_band[key][k]`` restricts the sup to ``2^{k-1} <= |xi1| + |xi2| <= 2^{k+1}``.
    """

    spec: ClassSpec
    entries: dict = field(default_factory=dict)
    per_band: dict = field(default_factory=dict)

    def band_spread(self, key=(0, 0, 0)) -> float:
        """``max / min`` of the per-band values of one entry (nonzero bands only)."""
        vals = np.array([v for v in self.per_band[key].values() if v > 0])
        return float(vals.max() / vals.min()) if vals.size else float("nan")


def seminorm_estimate(sigma: Symbol, spec: ClassSpec, bands=range(1, 9), samples: int = 513, step: float | None = None) -> SeminormTable:
    """Estimate ``sup |d sigma| / weight`` band by band with finite differences.

    Separable symbols are differenced analytically off-lattice with step
    ``step`` (default 1/32); sampled x-independent symbols use their lattice
    spacing.  Only ``alpha = 0`` entries are produced since both
    representations are x-independent.  One-dimensional only.
    """
    if sigma.x_dependent:
        raise ValueError("seminorm_estimate handles x-independent symbols")
    orders = range(spec.max_order + 1)
    table = SeminormTable(spec)
    for b1, b2 in itertools.product(orders, orders):
        table.per_band[(0, b1, b2)] = {}

    if isinstance(sigma, XIndependentSampled):
        grid = sigma.grid
        if grid.dim != 1:
            raise ValueError("seminorm_estimate is implemented for dim = 1")
        xi = grid.axis_frequencies()
        X1, X2 = np.meshgrid(xi, xi, indexing="ij")
        weight = spec.weight(X1, X2)
        radius = np.abs(X1) + np.abs(X2)
        h = grid.dxi
        # drop points whose stencil wraps around the lattice edge
        interior = np.ones_like(X1, dtype=bool)
        edge = grid.nyquist - 3 * h
        interior &= (np.abs(X1) < edge) & (np.abs(X2) < edge)
        for b1, b2 in itertools.product(orders, orders):
            d = _fd_array(_fd_array(sigma.values, b1, 0, h), b2, 1, h)
            ratio = np.abs(d) / weight
            _record(table, (0, b1, b2), ratio, radius, interior, bands, X1, X2)
        return table

    if not isinstance(sigma, SeparableSum):
        raise TypeError(f"unsupported symbol type {type(sigma).__name__}")
    h = 1.0 / 32 if step is None else step
    for k in bands:
        L = 2.0 ** (k + 1)
        x = np.linspace(-L, L, samples)
        X1, X2 = np.meshgrid(x, x, indexing="ij")
        radius = np.abs(X1) + np.abs(X2)
        mask = (radius >= 2.0 ** (k - 1)) & (radius <= L)
        weight = spec.weight(X1, X2)
        for b1, b2 in itertools.product(orders, orders):
            d = np.zeros_like(X1)
            for t in sigma.terms:
                d = d + t.coefficient * np.multiply.outer(_fd_window(t.m1, x, b1, h), _fd_window(t.m2, x, b2, h))
            ratio = np.abs(d) / weight
            _record(table, (0, b1, b2), ratio, radius, mask, [k], X1, X2)
    for key, bandvals in table.per_band.items():
        table.entries[key] = max(bandvals.values()) if bandvals else 0.0
    return table


def _record(table, key, ratio, radius, mask, bands, X1, X2):
    bad = ~np.isfinite(ratio) & mask
    if np.any(bad):
        i = tuple(np.argwhere(bad)[0])
        raise NonFiniteError(f"non-finite difference quotient for {key} at (xi1, xi2) = ({X1[i]}, {X2[i]})")
    for k in bands:
        sel = mask & (radius >= 2.0 ** (k - 1)) & (radius <= 2.0 ** (k + 1))
        table.per_band[key][k] = float(ratio[sel].max()) if np.any(sel) else 0.0
    table.entries[key] = max(table.per_band[key].values()) if table.per_band[key] else 0.0
