"""
Scripted numerical experiments.

Each runner returns an :class:`ExperimentReport` whose pass flag is derived
from its list of :class:`Check` objects, never set by hand.  Independent
j-points run concurrently when the ``BESOVBILIN_THREADS`` environment
variable is set above 1; results are always assembled in input order.

Typical use::

    >>> from besovbilin.experiments import run_closed_form_check
    >>> rep = run_closed_form_check(j_range=(5, 6))
    >>> rep.passed
    True
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bilinear import (
    GeneralSampled,
    apply_bilinear_bruteforce,
    apply_bilinear_separable,
    decompose_symbol,
    lattice_pairings,
    lattice_sum,
    pointwise_bound_check,
)
from .exceptions import ConfigError, NyquistError
from .grid import DESK_GRID, GridSpec, SampledField, lp_norm
from .norms import (
    BesovParams,
    SobolevParams,
    besov_norm,
    sobolev_norm,
    square_estimate_ratio,
    square_function_check,
)
from .symbols import (
    BUMP,
    ClassSpec,
    make_low_bump,
    make_modulated_bump,
    make_random_bandlimited,
    make_sharpness_symbol_hormander,
    make_sharpness_symbol_mixed,
    make_sharpness_symbol_product,
    max_symbol_k,
    symbol_from_descriptor,
)
from .windows import LPBand

__all__ = [
    "THREADS_ENV",
    "Check",
    "Record",
    "ExperimentReport",
    "SweepConfig",
    "BoundednessConfig",
    "fit_growth_exponent",
    "expected_sharpness_exponent",
    "run_closed_form_check",
    "run_norm_scaling",
    "run_sharpness_sweep",
    "run_boundedness_probe",
    "run_lemma_checks",
    "default_sharpness_configs",
    "default_boundedness_configs",
    "run_suite",
]

THREADS_ENV = "BESOVBILIN_THREADS"
DEFAULT_J_RANGE = (5, 6, 7, 8)


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _pmap(fn, items) -> list:
    items = list(items)
    workers = min(_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Check:
    """A named numeric assertion ``value <= limit`` (or ``>=``)."""

    name: str
    value: float
    limit: float
    relation: str = "<="

    def __post_init__(self):
        if self.relation not in ("<=", ">="):
            raise ValueError(f"relation must be '<=' or '>=', got {self.relation!r}")

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value):
            return False
        return self.value <= self.limit if self.relation == "<=" else self.value >= self.limit

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "limit": self.limit, "relation": self.relation, "pass": self.passed}


@dataclass(frozen=True)
class Record:
    """One measured point of an experiment."""

    j: int
    output_norm: float
    input_norms: tuple[float, ...] = ()
    ratio: float | None = None
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "j": self.j,
            "output_norm": self.output_norm,
            "input_norms": list(self.input_norms),
            "ratio": self.ratio,
        }


CSV_COLUMNS = ("experiment", "j", "norm", "ratio", "slope", "expected", "pass")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class ExperimentReport:
    """Outcome of one experiment.

    ``passed`` is true iff at least one check was recorded and all checks
    pass.  ``slope``, ``intercept`` and ``residual`` are filled only for
    sweeps with three or more j-points.
    """

    name: str
    records: list[Record] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    slope: float | None = None
    intercept: float | None = None
    residual: float | None = None
    expected: float | None = None
    tolerance: float | None = None
    runtime: float = 0.0
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def failed_checks(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": self.passed,
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "runtime": self.runtime,
            "seed": self.seed,
            "notes": list(self.notes),
            "records": [r.to_dict() for r in self.records],
            "checks": [c.to_dict() for c in self.checks],
        }

    def csv_rows(self) -> list[dict]:
        """Flat rows with :data:`CSV_COLUMNS`; runtime is left out so rows are reproducible."""
        rows = []
        for r in self.records:
            tag = f"{self.name}:{r.label}" if r.label else self.name
            rows.append(dict(zip(CSV_COLUMNS, map(_fmt, (tag, r.j, r.output_norm, r.ratio, self.slope, self.expected, self.passed)))))
        for c in self.checks:
            rows.append(dict(zip(CSV_COLUMNS, map(_fmt, (f"{self.name}:{c.name}", None, c.value, None, None, c.limit, c.passed)))))
        return rows

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{c.name}={c.value:.3g} (limit {c.relation} {c.limit:.3g})" for c in self.failed_checks())
        return f"[{status}] {self.name} ({self.runtime:.1f}s)" + (f": {worst}" if worst else "")


def _spread(values) -> float:
    v = np.asarray([x for x in values], dtype=float)
    if v.size == 0 or np.any(v <= 0):
        return float("inf")
    return float(v.max() / v.min())


# ---------------------------------------------------------------- fitting


def fit_growth_exponent(points) -> tuple[float, float, float]:
    """Least-squares fit of ``log2(value) = slope * j + intercept``.

    Parameters
    ----------
    points : iterable of (j, value)
        At least three points with positive values.

    Returns
    -------
    slope, intercept, residual
        ``residual`` is the largest absolute deviation of ``log2(value)``
        from the fitted line.
    """
    pts = [(float(j), float(v)) for j, v in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points to fit a growth exponent, got {len(pts)}")
    js = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise ValueError("growth-exponent fit needs finite positive values")
    if np.ptp(js) == 0:
        raise ValueError("growth-exponent fit needs at least two distinct j")
    y = np.log2(vals)
    A = np.stack([js, np.ones_like(js)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    residual = float(np.max(np.abs(y - (slope * js + intercept))))
    return float(slope), float(intercept), residual


# ---------------------------------------------------------------- shared helpers


def _norm(f: SampledField, params) -> float:
    if isinstance(params, BesovParams):
        return besov_norm(f, params)
    if isinstance(params, SobolevParams):
        return sobolev_norm(f, params)
    raise ConfigError(f"norm parameters must be BesovParams or SobolevParams, got {type(params).__name__}")


def _check_j_range(j_range, grid: GridSpec) -> tuple[int, ...]:
    js = tuple(sorted(int(j) for j in j_range))
    if not js:
        raise ConfigError("j_range is empty")
    if js[0] < 0:
        raise ConfigError("j_range must be nonnegative")
    top = js[-1]
    if not 2.0**top + BUMP.outer < grid.nyquist:
        raise NyquistError(f"j={top} needs frequencies above the Nyquist frequency {grid.nyquist}")
    return js


def _aligned_k_range(j_range, grid: GridSpec) -> tuple[int, int]:
    """Symbol level range used by the sweeps: ``[min j, largest level the grid holds]``."""
    k_max = max_symbol_k(grid)
    k_min = max(1, min(j_range))
    if k_min > k_max:
        raise NyquistError(f"j_range {tuple(j_range)} starts above the largest symbol level {k_max} of {grid}")
    return k_min, k_max


def _resolve_symbol(desc: dict, grid: GridSpec, j_range):
    desc = dict(desc)
    notes = []
    if desc.get("family") in ("def-symbol", "product", "mixed"):
        k_min, k_max = _aligned_k_range(j_range, grid)
        if "k_min" not in desc:
            desc["k_min"] = k_min
            notes.append(f"symbol k_min aligned to min(j_range) = {k_min}")
        desc.setdefault("k_max", k_max)
    return symbol_from_descriptor(desc, grid), desc, notes


def _pair(grid: GridSpec, j: int, pair: str) -> tuple[SampledField, SampledField]:
    if pair == "high_low":
        return make_low_bump(grid), make_modulated_bump(grid, j, +1)
    if pair == "first_high":
        return make_modulated_bump(grid, j, -1), make_low_bump(grid)
    if pair == "diagonal":
        return make_modulated_bump(grid, j, -1), make_modulated_bump(grid, j, +1)
    raise ConfigError(f"unknown input pair {pair!r}")


def _max_rel_error(a: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.abs(ref)))
    return float(np.max(np.abs(a - ref)) / scale) if scale else float(np.max(np.abs(a)))


# ---------------------------------------------------------------- closed forms


def run_closed_form_check(
    grid: GridSpec = DESK_GRID,
    j_range=DEFAULT_J_RANGE,
    m2_values=(-0.5, -0.25),
    tolerance: float = 1e-6,
    time_limit: float = 10.0,
    refine: bool = True,
    brute_grid: GridSpec | None = GridSpec(1, 64, 2.0),
) -> ExperimentReport:
    """Compare the sharpness constructions with their closed forms.

    For each ``j`` the Hormander symbol on the diagonal pair must give
    ``2^{-jn/2} (F^{-1} bump)^2`` and the mixed symbol with each ``m2`` on
    the high-low pair must give ``2^{j m2} e^{i 2^j x_1} (F^{-1} bump)^2``.
    The largest ``j`` is repeated on a grid with ``2N`` samples, and the
    brute-force path is compared with the separable one on ``brute_grid``.
    """
    t0 = time.perf_counter()
    js = _check_j_range(j_range, grid)
    k_min, k_max = _aligned_k_range(js, grid)
    rep = ExperimentReport("closed_form", tolerance=tolerance)
    rep.notes.append(f"symbol levels k in [{k_min}, {k_max}]")

    def errors(g: GridSpec, j: int, kmin: int, kmax: int) -> tuple[float, list[float], float]:
        t = time.perf_counter()
        low = make_low_bump(g).values
        x1 = g.positions()[0]
        f1, f2 = _pair(g, j, "diagonal")
        T = apply_bilinear_separable(make_sharpness_symbol_hormander(kmin, kmax, grid=g), f1, f2)
        e_diag = _max_rel_error(T.values, 2.0 ** (-j * g.dim / 2) * low**2)
        lo, hi = _pair(g, j, "high_low")
        e_mixed = []
        for m2 in m2_values:
            T = apply_bilinear_separable(make_sharpness_symbol_mixed(m2, kmin, kmax, grid=g), lo, hi)
            ref = 2.0 ** (j * m2) * np.exp(1j * 2.0**j * x1) * low**2
            e_mixed.append(_max_rel_error(T.values, ref))
        return e_diag, e_mixed, time.perf_counter() - t

    results = _pmap(lambda j: errors(grid, j, k_min, k_max), js)
    worst = 0.0
    for j, (e_diag, e_mixed, dt) in zip(js, results):
        rep.records.append(Record(j, e_diag, label="diagonal_rel_error"))
        for m2, e in zip(m2_values, e_mixed):
            rep.records.append(Record(j, e, label=f"mixed_m2={m2:g}_rel_error"))
        rep.checks.append(Check(f"diagonal_identity_j{j}", e_diag, tolerance))
        for m2, e in zip(m2_values, e_mixed):
            rep.checks.append(Check(f"mixed_identity_m2={m2:g}_j{j}", e, tolerance))
        rep.checks.append(Check(f"runtime_j{j}_seconds", dt, time_limit))
        worst = max(worst, e_diag, *e_mixed)

    if refine:
        fine = GridSpec(grid.dim, grid.samples * 2, grid.period_scale)
        j = js[-1]
        e_diag, e_mixed, _ = errors(fine, j, k_min, k_max)
        e_fine = max(e_diag, *e_mixed)
        e_coarse = max(results[-1][0], *results[-1][1])
        rep.records.append(Record(j, e_fine, label="refined_grid_rel_error"))
        rep.checks.append(Check(f"refined_identity_j{j}", e_fine, tolerance))
        # rounding-level errors fluctuate; "stable" means within a factor 10 or below 1e-12
        rep.checks.append(Check("refinement_not_worse", e_fine, max(10 * e_coarse, 1e-12)))

    if brute_grid is not None:
        bk = max_symbol_k(brute_grid)
        jb = bk
        sym = make_sharpness_symbol_hormander(1, bk, grid=brute_grid)
        f1, f2 = _pair(brute_grid, jb, "diagonal")
        a = apply_bilinear_bruteforce(sym, f1, f2).values
        b = apply_bilinear_separable(sym, f1, f2).values
        dev = _max_rel_error(a, b)
        rep.records.append(Record(jb, dev, label="brute_vs_separable"))
        rep.checks.append(Check("brute_force_agreement", dev, 1e-10))

    rep.runtime = time.perf_counter() - t0
    rep.notes.append(f"largest closed-form relative error {worst:.3g}")
    return rep


def run_norm_scaling(
    grid: GridSpec = DESK_GRID,
    j_range=DEFAULT_J_RANGE,
    cases=((0.0, 2.0, 2.0), (1.0, 2.0, 2.0), (0.5, 4.0, 1.0)),
    tolerance: float = 0.05,
) -> ExperimentReport:
    """Check that ``||f_{2,j}|| / 2^{js}`` is flat in ``j`` for Sobolev and Besov norms.

    ``cases`` lists ``(s, p, q)``; the Sobolev norm uses ``(s, p)``.  The
    check is ``max / min - 1 <= tolerance`` over ``j``.
    """
    t0 = time.perf_counter()
    js = _check_j_range(j_range, grid)
    rep = ExperimentReport("norm_scaling", tolerance=tolerance)
    fields = _pmap(lambda j: make_modulated_bump(grid, j, +1), js)
    for s, p, q in cases:
        for kind, params in (("sobolev", SobolevParams(s, p)), ("besov", BesovParams(s, p, q))):
            label = f"{kind}_s={s:g}_p={p:g}" + (f"_q={q:g}" if kind == "besov" else "")
            vals = []
            for j, f in zip(js, fields):
                nrm = _norm(f, params)
                scaled = nrm / 2.0 ** (j * s)
                vals.append(scaled)
                rep.records.append(Record(j, nrm, ratio=scaled, label=label))
            rep.checks.append(Check(f"{label}_variation", _spread(vals) - 1.0, tolerance))
    rep.runtime = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------- sharpness


def expected_sharpness_exponent(desc: dict, pair: str, s: float, dim: int = 1) -> float:
    """Growth exponent of the output norm predicted for a symbol family and input pair."""
    fam = desc.get("family")
    if fam == "def-symbol":
        return s - dim / 2 if pair == "high_low" else -dim / 2
    if fam == "mixed" and pair == "high_low":
        return s + float(desc["m2"])
    if fam == "product" and pair == "diagonal":
        return float(desc["m1"]) + float(desc["m2"])
    if fam == "identity":
        return s if pair == "high_low" else 0.0
    raise ConfigError(f"no predicted exponent for family {fam!r} with pair {pair!r} (output vanishes)")


@dataclass(frozen=True)
class SweepConfig:
    """Configuration of a growth-exponent sweep.

    Parameters
    ----------
    symbol : dict
        Symbol descriptor (see :func:`besovbilin.symbols.symbol_from_descriptor`).
        Missing ``k_min`` is aligned to ``min(j_range)``.
    pair : {"high_low", "diagonal"}
        ``high_low`` feeds ``(F^{-1} bump, f_{2,j})``; ``diagonal`` feeds
        ``(f_{1,j}, f_{2,j})``.
    output, inputs
        Norm parameters of the output and of the two inputs.
    expected_exponent : float, optional
        Defaults to :func:`expected_sharpness_exponent`.
    """

    symbol: dict = field(default_factory=lambda: {"family": "def-symbol"})
    pair: str = "high_low"
    output: BesovParams | SobolevParams = BesovParams(0.0)
    inputs: tuple = (SobolevParams(0.0), SobolevParams(0.0))
    j_range: tuple[int, ...] = DEFAULT_J_RANGE
    grid: GridSpec = DESK_GRID
    expected_exponent: float | None = None
    tolerance: float = 0.1
    max_residual: float = 0.1
    name: str = ""

    def __post_init__(self):
        if not self.tolerance > 0 or not self.max_residual > 0:
            raise ConfigError("tolerances must be positive")
        if self.pair not in ("high_low", "diagonal"):
            raise ConfigError(f"unknown input pair {self.pair!r}")
        js = _check_j_range(self.j_range, self.grid)
        if len(js) < 4:
            raise ConfigError(f"a sweep needs at least 4 j-points, got {len(js)}")
        object.__setattr__(self, "j_range", js)
        if self.expected_exponent is None:
            e = expected_sharpness_exponent(self.symbol, self.pair, self.output.s, self.grid.dim)
            object.__setattr__(self, "expected_exponent", e)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        kind = "besov" if isinstance(self.output, BesovParams) else "sobolev"
        extra = "".join(f"_{k}={self.symbol[k]:g}" for k in ("m1", "m2") if k in self.symbol)
        return f"sharpness_{self.symbol.get('family')}{extra}_{self.pair}_{kind}_s={self.output.s:g}"


def run_sharpness_sweep(config: SweepConfig) -> ExperimentReport:
    """Fit the growth exponent of ``||T(f1, f2)||`` over ``j`` and compare it with the prediction."""
    t0 = time.perf_counter()
    grid = config.grid
    sym, desc, notes = _resolve_symbol(config.symbol, grid, config.j_range)
    rep = ExperimentReport(config.label, expected=config.expected_exponent, tolerance=config.tolerance, notes=notes)

    def point(j):
        f1, f2 = _pair(grid, j, config.pair)
        T = apply_bilinear_separable(sym, f1, f2)
        out = _norm(T, config.output)
        ins = tuple(_norm(f, p) for f, p in zip((f1, f2), config.inputs))
        prod = ins[0] * ins[1]
        return Record(j, out, ins, out / prod if prod else None)

    rep.records = _pmap(point, config.j_range)
    rep.slope, rep.intercept, rep.residual = fit_growth_exponent((r.j, r.output_norm) for r in rep.records)
    rep.checks.append(Check("slope_error", abs(rep.slope - config.expected_exponent), config.tolerance))
    rep.checks.append(Check("fit_residual", rep.residual, config.max_residual))
    rep.runtime = time.perf_counter() - t0
    return rep


def default_sharpness_configs(grid: GridSpec = DESK_GRID, j_range=DEFAULT_J_RANGE) -> list[SweepConfig]:
    """The sweeps of the bundled ``sharpness`` suite."""
    cfgs = []
    hor = {"family": "def-symbol"}
    for s in (0.0, 0.5, 1.0):
        cfgs.append(SweepConfig(hor, "high_low", BesovParams(s), j_range=j_range, grid=grid))
        cfgs.append(SweepConfig(hor, "high_low", SobolevParams(s), j_range=j_range, grid=grid))
        cfgs.append(SweepConfig(hor, "diagonal", BesovParams(s), j_range=j_range, grid=grid, tolerance=0.05))
    for m2 in (-0.5, -0.25):
        cfgs.append(SweepConfig({"family": "mixed", "m2": m2}, "high_low", BesovParams(0.0), j_range=j_range, grid=grid))
    cfgs.append(SweepConfig({"family": "product", "m1": -0.25, "m2": -0.25}, "diagonal", BesovParams(0.0), j_range=j_range, grid=grid))
    return cfgs


# ---------------------------------------------------------------- boundedness

_BOUNDEDNESS_FAMILIES = ("diagonal", "high_low", "first_high", "random_diagonal", "random_high_low")


@dataclass(frozen=True)
class BoundednessConfig:
    """Exponents and inputs for a boundedness probe.

    The probe measures ``R(j) = ||T(f1, f2)||_{B^s_{p,q}} / (||f1||_{B^{s1}_{p1,q1}} ||f2||_{B^{s2}_{p2,q2}})``
    maximized over the input ``families`` at each ``j``.  ``expect`` is
    ``"auto"`` (decided by :meth:`admissible`), ``"bounded"`` or ``"growth"``.
    """

    s1: float
    s2: float
    p1: float = 2.0
    p2: float = 2.0
    q1: float = 2.0
    q2: float = 2.0
    p: float = 1.0
    q: float = 1.0
    s: float | None = None
    symbol: dict = field(default_factory=lambda: {"family": "def-symbol"})
    families: tuple[str, ...] = ("diagonal", "high_low", "random_diagonal", "random_high_low")
    j_range: tuple[int, ...] = DEFAULT_J_RANGE
    grid: GridSpec = DESK_GRID
    seed: int = 0
    random_radius: float = math.sqrt(2.0)
    bound_ratio: float = 4.0
    growth_factor: float = 2.0
    expect: str = "auto"
    name: str = ""

    def __post_init__(self):
        if self.s is None:
            object.__setattr__(self, "s", self.s1 + self.s2)
        inv = lambda v: 0.0 if np.isinf(v) else 1.0 / v
        if not 1 <= self.p <= 2:
            raise ConfigError(f"output p must lie in [1, 2], got {self.p}")
        if not (self.p1 >= 2 and self.p2 >= 2):
            raise ConfigError(f"input p1, p2 must be >= 2, got {self.p1}, {self.p2}")
        if inv(self.p) > inv(self.p1) + inv(self.p2) + 1e-12:
            raise ConfigError(f"need 1/p <= 1/p1 + 1/p2, got p={self.p}, p1={self.p1}, p2={self.p2}")
        if min(self.q, self.q1, self.q2) <= 0:
            raise ConfigError("q, q1, q2 must be positive")
        if abs(inv(self.q) - inv(self.q1) - inv(self.q2)) > 1e-12:
            raise ConfigError(f"need 1/q = 1/q1 + 1/q2, got q={self.q}, q1={self.q1}, q2={self.q2}")
        if abs(self.s - self.s1 - self.s2) > 1e-12:
            raise ConfigError(f"need s = s1 + s2, got s={self.s}, s1={self.s1}, s2={self.s2}")
        if self.expect not in ("auto", "bounded", "growth"):
            raise ConfigError(f"expect must be auto, bounded or growth, got {self.expect!r}")
        bad = [f for f in self.families if f not in _BOUNDEDNESS_FAMILIES]
        if bad or not self.families:
            raise ConfigError(f"unknown or empty input families {bad}; known: {_BOUNDEDNESS_FAMILIES}")
        js = _check_j_range(self.j_range, self.grid)
        if len(js) < 2:
            raise ConfigError("a probe needs at least 2 j-points")
        object.__setattr__(self, "j_range", js)

    def admissible(self) -> bool:
        """Whether the exponents lie in the range where boundedness is predicted."""
        half = self.grid.dim / 2
        fam = self.symbol.get("family")
        if fam == "identity":
            return self.s > 0 and min(self.s1, self.s2) >= 0
        if fam == "product":
            m1, m2 = float(self.symbol["m1"]), float(self.symbol["m2"])
            return self.s1 < m1 + half and self.s2 < m2 + half and self.s > -half
        return self.s1 < half and self.s2 < half and self.s > -half

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return f"boundedness_{self.symbol.get('family')}_s1={self.s1:g}_s2={self.s2:g}_p={self.p:g}_q={self.q:g}"


def _family_inputs(cfg: BoundednessConfig, family: str, j: int) -> tuple[SampledField, SampledField]:
    grid = cfg.grid
    if not family.startswith("random_"):
        return _pair(grid, j, family)
    idx = _BOUNDEDNESS_FAMILIES.index(family)
    rng = np.random.default_rng([cfg.seed, idx, j])
    r = cfg.random_radius
    if family == "random_diagonal":
        c1 = -(2.0**j)
    else:
        c1 = 0.0
    f1 = make_random_bandlimited(grid, rng, r, center=c1)
    f2 = make_random_bandlimited(grid, rng, r, center=2.0**j)
    return f1, f2


def run_boundedness_probe(cfg: BoundednessConfig) -> ExperimentReport:
    """Measure ``R(j)`` and assert uniformity (admissible) or growth (inadmissible)."""
    t0 = time.perf_counter()
    sym, desc, notes = _resolve_symbol(cfg.symbol, cfg.grid, cfg.j_range)
    out_p = BesovParams(cfg.s, cfg.p, cfg.q)
    in_p = (BesovParams(cfg.s1, cfg.p1, cfg.q1), BesovParams(cfg.s2, cfg.p2, cfg.q2))
    expect = cfg.expect if cfg.expect != "auto" else ("bounded" if cfg.admissible() else "growth")
    rep = ExperimentReport(cfg.label, seed=cfg.seed, notes=notes)
    rep.notes.append(f"admissible={cfg.admissible()}, asserting {expect}")

    def point(args):
        family, j = args
        f1, f2 = _family_inputs(cfg, family, j)
        T = apply_bilinear_separable(sym, f1, f2)
        out = besov_norm(T, out_p)
        ins = (besov_norm(f1, in_p[0]), besov_norm(f2, in_p[1]))
        return Record(j, out, ins, out / (ins[0] * ins[1]), label=family)

    grid_pts = list(itertools.product(cfg.families, cfg.j_range))
    rep.records = _pmap(point, grid_pts)
    R = []
    for j in cfg.j_range:
        best = max(r.ratio for r in rep.records if r.j == j)
        R.append(best)
        rep.records.append(Record(j, best, ratio=best, label="R"))
    if expect == "bounded":
        rep.checks.append(Check("ratio_spread", _spread(R), cfg.bound_ratio))
    else:
        rep.checks.append(Check("ratio_growth", R[-1] / R[0] if R[0] > 0 else float("inf"), cfg.growth_factor, ">="))
    if all(v > 0 for v in R) and len(R) >= 3:
        rep.slope, rep.intercept, rep.residual = fit_growth_exponent(zip(cfg.j_range, R))
    rep.runtime = time.perf_counter() - t0
    return rep


def default_boundedness_configs(grid: GridSpec = DESK_GRID, j_range=DEFAULT_J_RANGE, seed: int = 0) -> list[BoundednessConfig]:
    """Three admissible tuples, one inadmissible diagonal tuple and the product control."""
    kw = dict(grid=grid, j_range=j_range, seed=seed)
    inf = float("inf")
    return [
        BoundednessConfig(0.0, 0.0, p1=2, p2=2, q1=4, q2=4, p=2, q=2, **kw),
        BoundednessConfig(0.1, 0.0, p1=4, p2=4, q1=2, q2=2, p=2, q=1, **kw),
        BoundednessConfig(-0.1, -0.2, p1=2, p2=2, q1=inf, q2=inf, p=1, q=inf, **kw),
        BoundednessConfig(-0.5, -0.5, p1=2, p2=2, q1=4, q2=4, p=2, q=2, families=("diagonal", "random_diagonal"), **kw),
        BoundednessConfig(
            0.5, 0.0, p1=2, p2=inf, q1=2, q2=inf, p=2, q=2,
            symbol={"family": "identity"}, families=("first_high", "diagonal"), name="boundedness_identity_control", **kw,
        ),
    ]


# ---------------------------------------------------------------- lemma bundle


def _best_cells(sigma, k1: int, k2: int, radius: float) -> tuple[tuple[int, int], float]:
    """Integer cells ``(nu1, nu2)`` where ``|sigma| psi_{k1} psi_{k2}`` peaks, and the peak.

    The cube cell centered at an integer point equals 1 there, so the piece
    at the returned cells reaches the peak value.
    """
    cells = np.arange(-math.ceil(radius), math.ceil(radius) + 1).astype(float)
    v = np.abs(sigma.evaluate(cells[:, None], cells[None, :])) * np.multiply.outer(LPBand(k1)(cells), LPBand(k2)(cells))
    a, b = np.unravel_index(int(np.argmax(v)), v.shape)
    return (int(cells[a]), int(cells[b])), float(v[a, b])


def _check_lattice_exponents(p1: float, p2: float, r: float) -> None:
    inv = lambda v: 0.0 if np.isinf(v) else 1.0 / v
    lo = 1 - inv(p1) - inv(p2)
    if not lo - 1e-12 <= inv(r) <= 0.5 + 1e-12:
        raise ConfigError(f"lattice-sum exponents need 1 - 1/p1 - 1/p2 <= 1/r <= 1/2, got p1={p1}, p2={p2}, r={r}")


def run_lemma_checks(
    grid: GridSpec = DESK_GRID,
    seed: int = 0,
    small_grid: GridSpec = GridSpec(1, 256, 4.0),
    radii=(1, 2, 4, 8),
    p_tildes=(2.0, 4.0),
    k_pairs=None,
    lattice_sizes=(1, 4, 16, 64),
    lattice_exponents=(2.0, 2.0, 2.0),
    principal_amplitude: float = 0.5,
) -> ExperimentReport:
    """Stability checks for the square-function, pointwise and lattice-sum estimates.

    * square function: ratios over ``radii`` for each ``p_tilde``, and the
      pointwise square estimate constant; ``max/min <= 4``.
    * pointwise bound: Hormander-class pieces over ``k_pairs`` at ``j = 0``
      on ``grid``, product-class pieces with ``(m1, m2) = (-1/4, -1/4)``, and
      an x-dependent symbol over ``j = 0..3`` on ``small_grid``;
      ``max/min <= 10`` within each sweep.  Identically zero pieces are
      skipped.  Only pieces whose symbol peak reaches ``principal_amplitude``
      times the class weight enter the spread; the others only touch window
      transitions and must stay below the largest principal ratio.
    * lattice sums: ``C(L) = sum / (|L|^{1/2} ||f1|| ||f2|| ||g||)`` in all
      three regimes over ``lattice_sizes``; ``max/min <= 4``.
    """
    if grid.dim != 1 or small_grid.dim != 1:
        raise ConfigError("lemma checks run on one-dimensional grids")
    _check_lattice_exponents(*lattice_exponents)
    t0 = time.perf_counter()
    rep = ExperimentReport("lemmas", seed=seed)
    rng = np.random.default_rng(seed)

    # square function
    f = make_random_bandlimited(grid, rng, 8.0)
    for pt in p_tildes:
        ratios = [square_function_check(f, R, 2.0, pt).ratio for R in radii]
        for R, v in zip(radii, ratios):
            rep.records.append(Record(int(R), v, ratio=v, label=f"square_function_p_tilde={pt:g}"))
        rep.checks.append(Check(f"square_function_spread_p_tilde={pt:g}", _spread(ratios), 4.0))
    consts = [square_estimate_ratio(f, R) for R in radii]
    for R, v in zip(radii, consts):
        rep.records.append(Record(int(R), v, ratio=v, label="square_estimate"))
    rep.checks.append(Check("square_estimate_spread", _spread(consts), 4.0))

    # pointwise bound, K sweep at j = 0
    k_top = max_symbol_k(grid)
    if k_pairs is None:
        k_pairs = [(k1, k2) for k1 in range(4, min(8, k_top + 1)) for k2 in range(k1 + 1)]
    width = 0.6 * grid.nyquist
    f1 = make_random_bandlimited(grid, rng, width)
    f2 = make_random_bandlimited(grid, rng, width)
    hor = make_sharpness_symbol_hormander(1, k_top, grid=grid)
    prod = make_sharpness_symbol_product(-0.25, -0.25, 1, k_top, grid=grid)
    sweeps = (
        ("pointwise_hormander", hor, ClassSpec.hormander(-0.5)),
        ("pointwise_product", prod, ClassSpec.product(-0.25, -0.25)),
    )
    for label, sym, spec in sweeps:
        def one(K, sym=sym, spec=spec):
            nu, peak = _best_cells(sym, K[0], K[1], 2.0 ** (max(K) + 1) + 2)
            amp = peak / spec.band_weight(*K)
            if amp == 0:
                return amp, 0.0
            return amp, pointwise_bound_check(decompose_symbol(sym, 0, K, nu), f1, f2, spec)
        out = _pmap(one, k_pairs)
        principal, tail = [], []
        for K, (amp, v) in zip(k_pairs, out):
            if amp == 0:
                continue
            rep.records.append(Record(0, v, (amp,), ratio=v, label=f"{label}_K={K[0]},{K[1]}"))
            (principal if amp >= principal_amplitude else tail).append(v)
        rep.checks.append(Check(f"{label}_spread", _spread(principal), 10.0))
        if tail:
            # pieces that only meet window transitions must stay under the same constant
            rep.checks.append(Check(f"{label}_tail_over_principal", max(tail) / max(principal), 1.0))

    # pointwise bound, j sweep with an x-dependent symbol
    n_decay = 1.0
    js = (0, 1, 2, 3)
    M = small_grid.samples // 4
    base = make_sharpness_symbol_hormander(1, 2)

    def amp(x):
        return 1.0 + sum(2.0 ** (-j * n_decay) * np.cos(2.0**j * x) for j in js[1:])

    xdep = GeneralSampled.from_function(small_grid, M, lambda x, a, b: amp(x) * base.evaluate(a, b))
    band_edge = M // 2 * small_grid.dxi
    g1 = make_random_bandlimited(small_grid, rng, 0.75 * band_edge)
    g2 = make_random_bandlimited(small_grid, rng, 0.75 * band_edge)
    jk = [(j, K) for K in ((1, 1), (2, 1), (2, 2)) for j in js]

    def one_j(args):
        j, K = args
        nu, _ = _best_cells(base, K[0], K[1], band_edge)
        return pointwise_bound_check(decompose_symbol(xdep, j, K, nu), g1, g2, ClassSpec.hormander(-0.5), n_decay)

    vals = _pmap(one_j, jk)
    for (j, K), v in zip(jk, vals):
        rep.records.append(Record(j, v, ratio=v, label=f"pointwise_xdep_K={K[0]},{K[1]}"))
    rep.checks.append(Check("pointwise_xdep_spread", _spread(vals), 10.0))

    # lattice sums
    c = 40.0
    h1 = make_random_bandlimited(grid, rng, 4.0, center=-c)
    h2 = make_random_bandlimited(grid, rng, 4.0, center=c)
    g = make_random_bandlimited(grid, rng, 12.0)
    pairs = lattice_pairings(hor, 0, (5, 5), h1, h2, g)
    p1, p2, r = lattice_exponents
    scale = lp_norm(h1, p1) * lp_norm(h2, p2) * lp_norm(g, r)
    centers = {"first": -int(c), "second": int(c), "diagonal": 0}
    for regime, mid in centers.items():
        cs = []
        for L in lattice_sizes:
            lat = range(mid - L // 2, mid - L // 2 + L)
            cs.append(lattice_sum(pairs, regime, lat) / (math.sqrt(L) * scale))
        for L, v in zip(lattice_sizes, cs):
            rep.records.append(Record(int(L), v, ratio=v, label=f"lattice_{regime}"))
        rep.checks.append(Check(f"lattice_{regime}_spread", _spread(cs), 4.0))

    rep.runtime = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------- suites


def run_suite(name: str, grid: GridSpec = DESK_GRID, j_range=DEFAULT_J_RANGE, seed: int = 0) -> list[ExperimentReport]:
    """Run a bundled suite: ``sharpness`` or ``lemmas``."""
    if name == "sharpness":
        reports = [run_closed_form_check(grid, j_range), run_norm_scaling(grid, j_range)]
        reports += [run_sharpness_sweep(c) for c in default_sharpness_configs(grid, j_range)]
        reports += [run_boundedness_probe(c) for c in default_boundedness_configs(grid, j_range, seed)]
        return reports
    if name == "lemmas":
        return [run_lemma_checks(grid, seed)]
    raise ConfigError(f"unknown suite {name!r}; choose 'sharpness' or 'lemmas'")
