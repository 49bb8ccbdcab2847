"""
Smooth cutoff windows in frequency space.

Every window is built from the smoothstep

    h(t) = eta(t) / (eta(t) + eta(1 - t)),    eta(t) = exp(-1/t) for t > 0, else 0,

which is exactly 0 for t <= 0, exactly 1 for t >= 1 and satisfies
h(t) + h(1 - t) = 1.  Windows are immutable callables taking the frequency
components as separate arrays: ``w(xi)`` in one dimension, ``w(xi1, xi2)`` in
two, and so on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, ClassVar

import numpy as np

from .exceptions import ConfigError

__all__ = [
    "smoothstep",
    "Window",
    "FlatBump",
    "FlatAnnulus",
    "DyadicRescale",
    "CubeCell",
    "SobolevWeight",
    "Constant",
    "LPBand",
    "Shift",
    "WindowSum",
    "WindowProduct",
    "Analytic",
    "register_analytic",
    "make_psi_family",
    "make_cube_partition",
    "make_cube_dominator",
    "make_sharpness_windows",
    "window_from_dict",
]


def _eta(t: np.ndarray) -> np.ndarray:
    pos = t > 0
    safe = np.where(pos, t, 1.0)
    return np.where(pos, np.exp(-1.0 / safe), 0.0)


def smoothstep(t):
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    a = _eta(t)
    b = _eta(1.0 - t)
    out = a / (a + b)
    return float(out) if out.ndim == 0 else out


def _radius(xi) -> np.ndarray:
    if len(xi) == 1:
        return np.abs(np.asarray(xi[0], dtype=float))
    return np.sqrt(sum(np.asarray(c, dtype=float) ** 2 for c in xi))


class Window:
    """Base class. Subclasses implement ``__call__(*xi)`` and ``to_dict``."""

    kind: ClassVar[str] = ""

    def __call__(self, *xi):
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __mul__(self, other: Window) -> WindowProduct:
        return WindowProduct((self, other))


@dataclass(frozen=True)
class FlatBump(Window):
    """Radial bump equal to 1 on ``|xi| <= inner`` and 0 on ``|xi| >= outer``."""

    inner: float
    outer: float
    kind: ClassVar[str] = "flat_bump"

    def __post_init__(self):
        if not 0 <= self.inner < self.outer:
            raise ConfigError(f"flat_bump needs 0 <= inner < outer, got {self.inner}, {self.outer}")

    def __call__(self, *xi):
        r = _radius(xi)
        return smoothstep((self.outer - r) / (self.outer - self.inner))

    def to_dict(self):
        return {"kind": self.kind, "r": [self.inner, self.outer]}


@dataclass(frozen=True)
class FlatAnnulus(Window):
    """1 on ``r2 <= |xi| <= r3``, vanishing outside ``r1 <= |xi| <= r4``."""

    r1: float
    r2: float
    r3: float
    r4: float
    kind: ClassVar[str] = "flat_annulus"

    def __post_init__(self):
        if not 0 <= self.r1 < self.r2 <= self.r3 < self.r4:
            raise ConfigError(f"flat_annulus radii must increase, got {self.radii}")

    @property
    def radii(self):
        return (self.r1, self.r2, self.r3, self.r4)

    def __call__(self, *xi):
        r = _radius(xi)
        rise = smoothstep((r - self.r1) / (self.r2 - self.r1))
        fall = smoothstep((self.r4 - r) / (self.r4 - self.r3))
        return rise * fall

    def to_dict(self):
        return {"kind": self.kind, "r": list(self.radii)}


@dataclass(frozen=True)
class DyadicRescale(Window):
    """``base(2^{-exponent} xi)``."""

    base: Window
    exponent: float
    kind: ClassVar[str] = "dyadic_rescale"

    def __call__(self, *xi):
        c = 2.0 ** (-self.exponent)
        return self.base(*(np.asarray(x, dtype=float) * c for x in xi))

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict(), "scale_exponent": self.exponent}


@dataclass(frozen=True)
class CubeCell(Window):
    """Tensor cell ``prod_i w(xi_i - center_i)``, ``w(t) = h(1 - |t|)``.

    The translates over ``center in Z^n`` sum to one.
    """

    center: tuple[float, ...] = (0.0,)
    kind: ClassVar[str] = "cube_cell"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))

    def __call__(self, *xi):
        if len(xi) != len(self.center):
            raise ValueError(f"cube cell of dimension {len(self.center)} called with {len(xi)} components")
        out = 1.0
        for x, c in zip(xi, self.center):
            out = out * smoothstep(1.0 - np.abs(np.asarray(x, dtype=float) - c))
        return out

    def to_dict(self):
        return {"kind": self.kind, "center": list(self.center)}


@dataclass(frozen=True)
class SobolevWeight(Window):
    """Bessel-potential weight ``(1 + |xi|^2)^{s/2}``."""

    s: float
    kind: ClassVar[str] = "sobolev_weight"

    def __call__(self, *xi):
        r = _radius(xi)
        return (1.0 + r * r) ** (self.s / 2)

    def to_dict(self):
        return {"kind": self.kind, "s": self.s}


@dataclass(frozen=True)
class Constant(Window):
    value: float = 1.0
    kind: ClassVar[str] = "constant"

    def __call__(self, *xi):
        return np.full(np.broadcast(*xi).shape, self.value, dtype=float)

    def to_dict(self):
        return {"kind": self.kind, "value": self.value}


_PSI0 = FlatBump(1.0, 2.0)


@dataclass(frozen=True)
class LPBand(Window):
    """Littlewood-Paley band ``psi_level``.

    ``psi_0`` is ``FlatBump(1, 2)``; for ``level >= 1``,
    ``psi_level(xi) = psi_0(2^{-level} xi) - psi_0(2^{1-level} xi)``.
    """

    level: int
    kind: ClassVar[str] = "lp_band"

    def __post_init__(self):
        if int(self.level) != self.level or self.level < 0:
            raise ConfigError(f"band level must be a nonnegative integer, got {self.level}")

    def __call__(self, *xi):
        r = _radius(xi)
        if self.level == 0:
            return _PSI0(r)
        return _PSI0(r * 2.0**-self.level) - _PSI0(r * 2.0 ** (1 - self.level))

    def to_dict(self):
        return {"kind": self.kind, "level": int(self.level)}


@dataclass(frozen=True)
class Shift(Window):
    """``base(xi - offset)``."""

    base: Window
    offset: tuple[float, ...]
    kind: ClassVar[str] = "shift"

    def __post_init__(self):
        object.__setattr__(self, "offset", tuple(float(c) for c in np.atleast_1d(self.offset)))

    def __call__(self, *xi):
        return self.base(*(np.asarray(x, dtype=float) - c for x, c in zip(xi, self.offset)))

    def to_dict(self):
        return {"kind": self.kind, "base": self.base.to_dict(), "offset": list(self.offset)}


@dataclass(frozen=True)
class WindowSum(Window):
    """Linear combination ``sum_t c_t w_t``."""

    terms: tuple[tuple[float, Window], ...]
    kind: ClassVar[str] = "sum"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(c), w) for c, w in self.terms))

    def __call__(self, *xi):
        out = np.zeros(np.broadcast(*xi).shape)
        for c, w in self.terms:
            out = out + c * w(*xi)
        return out

    def to_dict(self):
        return {"kind": self.kind, "terms": [[c, w.to_dict()] for c, w in self.terms]}


@dataclass(frozen=True)
class WindowProduct(Window):
    factors: tuple[Window, ...]
    kind: ClassVar[str] = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def __call__(self, *xi):
        out = 1.0
        for w in self.factors:
            out = out * w(*xi)
        return out

    def to_dict(self):
        return {"kind": self.kind, "factors": [w.to_dict() for w in self.factors]}


_ANALYTIC: dict[str, Callable] = {
    "gaussian": lambda *xi: np.exp(-0.5 * _radius(xi) ** 2),
}


def register_analytic(tag: str, fn: Callable) -> None:
    """Make ``fn(*xi)`` available as ``Analytic(tag)`` and in descriptors."""
    _ANALYTIC[tag] = fn


@dataclass(frozen=True)
class Analytic(Window):
    """A registered closed-form function, addressed by tag."""

    tag: str
    kind: ClassVar[str] = "analytic"

    def __post_init__(self):
        if self.tag not in _ANALYTIC:
            raise ConfigError(f"unknown analytic window {self.tag!r}; known: {sorted(_ANALYTIC)}")

    def __call__(self, *xi):
        return _ANALYTIC[self.tag](*xi)

    def to_dict(self):
        return {"kind": self.kind, "tag": self.tag}


def make_psi_family(l_max: int) -> list[LPBand]:
    """Bands ``psi_0 .. psi_{l_max}``; they sum to 1 on ``|xi| <= 2^{l_max}``."""
    if l_max < 0:
        raise ValueError("l_max must be >= 0")
    return [LPBand(level) for level in range(l_max + 1)]


def make_cube_partition(nu) -> CubeCell:
    """Translate ``phi(xi - nu)`` of the unit-cube partition of unity."""
    return CubeCell(tuple(np.atleast_1d(nu)))


def make_cube_dominator(dim: int = 1) -> FlatBump:
    """Radial window equal to 1 on ``[-1, 1]^n`` and supported in ``[-2, 2]^n``."""
    return FlatBump(math.sqrt(dim), 2.0)


def make_sharpness_windows() -> tuple[FlatBump, FlatBump, FlatAnnulus]:
    """Return ``(bump, plateau, annulus)`` used by the sharpness constructions.

    ``bump`` is supported in ``|xi| <= 2^{1/2}``; ``plateau`` is 1 on
    ``|xi| <= 2^{1/2}`` and supported in ``|xi| <= 2``; ``annulus`` is 1 on
    ``2^{-1/4} <= |xi| <= 2^{1/4}`` and supported in ``2^{-1/2} <= |xi| <= 2^{1/2}``.
    """
    bump = FlatBump(2**0.25, 2**0.5)
    plateau = FlatBump(2**0.5, 2.0)
    annulus = FlatAnnulus(2**-0.5, 2**-0.25, 2**0.25, 2**0.5)
    return bump, plateau, annulus


def window_from_dict(d: dict) -> Window:
    """Inverse of ``Window.to_dict``."""
    try:
        kind = d["kind"]
        if kind == "flat_bump":
            return FlatBump(*map(float, d["r"]))
        if kind == "flat_annulus":
            return FlatAnnulus(*map(float, d["r"]))
        if kind == "dyadic_rescale":
            return DyadicRescale(window_from_dict(d["base"]), float(d["scale_exponent"]))
        if kind == "cube_cell":
            return CubeCell(tuple(d.get("center", [0.0])))
        if kind == "sobolev_weight":
            return SobolevWeight(float(d["s"]))
        if kind == "constant":
            return Constant(float(d.get("value", 1.0)))
        if kind == "lp_band":
            return LPBand(int(d["level"]))
        if kind == "shift":
            return Shift(window_from_dict(d["base"]), tuple(d["offset"]))
        if kind == "sum":
            return WindowSum(tuple((float(c), window_from_dict(w)) for c, w in d["terms"]))
        if kind == "product":
            return WindowProduct(tuple(window_from_dict(w) for w in d["factors"]))
        if kind == "analytic":
            return Analytic(d["tag"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad window descriptor {d!r}: {exc}") from exc
    raise ConfigError(f"unknown window kind {d.get('kind')!r}")
