"""
JSON interchange for fields, symbols and experiment reports.

Field files::

    {"dimension": 1, "samples_per_axis": 64, "period_scale": 2.0,
     "side": "space" | "frequency", "values": [[re, im], ...]}

Values are listed in row-major lattice order; on the frequency side the
lattice uses FFT wraparound order (index ``i`` holds ``m = i`` for
``i < N/2`` and ``m = i - N`` otherwise).

Symbol files carry a ``representation`` discriminator:
``separable_sum`` (window descriptors per term), ``x_independent_sampled``
or ``general_sampled`` (embedded value arrays with a declared ``shape``).
A bare family descriptor such as ``{"family": "def-symbol", "k_min": 5}``
is accepted as well.
"""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import jsonschema
import numpy as np

from .bilinear import GeneralSampled, SeparableSum, SeparableTerm, Symbol, XIndependentSampled
from .exceptions import ConfigError
from .experiments import CSV_COLUMNS, ExperimentReport
from .grid import GridSpec, SampledField, SpectralField
from .symbols import symbol_from_descriptor
from .windows import window_from_dict

__all__ = [
    "FIELD_SCHEMA",
    "SYMBOL_SCHEMA",
    "grid_to_dict",
    "grid_from_dict",
    "field_to_dict",
    "field_from_dict",
    "load_field",
    "save_field",
    "symbol_to_dict",
    "symbol_from_dict",
    "load_symbol",
    "save_symbol",
    "load_json",
    "validate",
    "write_reports_json",
    "write_reports_csv",
    "write_plot_data",
]

_PAIRS = {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}

_GRID_PROPS = {
    "dimension": {"type": "integer", "minimum": 1},
    "samples_per_axis": {"type": "integer", "minimum": 2},
    "period_scale": {"type": "number", "exclusiveMinimum": 0},
}

FIELD_SCHEMA = {
    "type": "object",
    "required": ["dimension", "samples_per_axis", "period_scale", "values"],
    "properties": {**_GRID_PROPS, "side": {"enum": ["space", "frequency"]}, "values": _PAIRS},
}

SYMBOL_SCHEMA = {
    "type": "object",
    "oneOf": [
        {"required": ["representation"]},
        {"required": ["family"], "not": {"required": ["representation"]}},
    ],
    "properties": {
        "representation": {"enum": ["separable_sum", "x_independent_sampled", "general_sampled"]},
        "family": {"type": "string"},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["m1", "m2"],
                "properties": {"coefficient": {"type": "number"}, "m1": {"type": "object"}, "m2": {"type": "object"}},
            },
        },
        "shape": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "values": _PAIRS,
        **_GRID_PROPS,
    },
}


def validate(doc, schema: dict, what: str) -> None:
    """Validate ``doc`` against ``schema``, raising :class:`ConfigError` with the offending path."""
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid {what} at {where}: {exc.message}") from None


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None


def _dump(path, doc) -> None:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------- grids and fields


def grid_to_dict(grid: GridSpec) -> dict:
    return {"dimension": grid.dim, "samples_per_axis": grid.samples, "period_scale": grid.period_scale}


def grid_from_dict(d: dict) -> GridSpec:
    try:
        return GridSpec(int(d["dimension"]), int(d["samples_per_axis"]), float(d["period_scale"]))
    except KeyError as exc:
        raise ConfigError(f"grid header is missing {exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad grid header: {exc}") from None


def _pairs(values: np.ndarray) -> list:
    flat = np.asarray(values, dtype=complex).ravel()
    return np.stack([flat.real, flat.imag], axis=1).tolist()


def _from_pairs(values, count: int, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (count, 2):
        raise ConfigError(f"{what}: expected {count} [re, im] pairs, got array of shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def field_to_dict(f: SampledField | SpectralField) -> dict:
    side = "frequency" if isinstance(f, SpectralField) else "space"
    return {**grid_to_dict(f.grid), "side": side, "values": _pairs(f.values)}


def field_from_dict(d: dict) -> SampledField | SpectralField:
    validate(d, FIELD_SCHEMA, "field file")
    grid = grid_from_dict(d)
    vals = _from_pairs(d["values"], grid.samples**grid.dim, "field values").reshape(grid.shape)
    if d.get("side", "space") == "frequency":
        return SpectralField(grid, vals)
    return SampledField(grid, vals)


def load_field(path, side: str = "space") -> SampledField | SpectralField:
    """Load a field file, converting to ``side`` (``space`` or ``frequency``)."""
    from .grid import forward_transform, inverse_transform

    f = field_from_dict(load_json(path))
    if side == "space" and isinstance(f, SpectralField):
        return inverse_transform(f)
    if side == "frequency" and isinstance(f, SampledField):
        return forward_transform(f)
    return f


def save_field(path, f) -> None:
    _dump(path, field_to_dict(f))


# ---------------------------------------------------------------- symbols


def symbol_to_dict(sigma: Symbol, descriptor: dict | None = None) -> dict:
    """Serialize a symbol; ``descriptor`` (a family descriptor) is stored alongside when given."""
    extra = {"descriptor": descriptor} if descriptor else {}
    if isinstance(sigma, SeparableSum):
        terms = [{"coefficient": t.coefficient, "m1": t.m1.to_dict(), "m2": t.m2.to_dict()} for t in sigma.terms]
        return {"representation": "separable_sum", "terms": terms, **extra}
    if isinstance(sigma, XIndependentSampled):
        return {
            "representation": "x_independent_sampled",
            **grid_to_dict(sigma.grid),
            "shape": list(sigma.values.shape),
            "values": _pairs(sigma.values),
            **extra,
        }
    if isinstance(sigma, GeneralSampled):
        return {
            "representation": "general_sampled",
            **grid_to_dict(sigma.grid),
            "shape": list(sigma.values.shape),
            "values": _pairs(sigma.values),
            **extra,
        }
    raise TypeError(f"cannot serialize symbol of type {type(sigma).__name__}")


def symbol_from_dict(d: dict, grid: GridSpec | None = None) -> Symbol:
    """Inverse of :func:`symbol_to_dict`; family descriptors are built on ``grid``."""
    validate(d, SYMBOL_SCHEMA, "symbol file")
    rep = d.get("representation")
    if rep is None:
        return symbol_from_descriptor(d, grid)
    if rep == "separable_sum":
        if "terms" not in d:
            raise ConfigError("separable_sum symbol needs 'terms'")
        return SeparableSum(tuple(
            SeparableTerm(float(t.get("coefficient", 1.0)), window_from_dict(t["m1"]), window_from_dict(t["m2"]))
            for t in d["terms"]
        ))
    sgrid = grid_from_dict(d)
    if "shape" not in d or "values" not in d:
        raise ConfigError(f"{rep} symbol needs 'shape' and 'values'")
    shape = tuple(int(v) for v in d["shape"])
    vals = _from_pairs(d["values"], int(np.prod(shape)), "symbol values").reshape(shape)
    if rep == "x_independent_sampled":
        return XIndependentSampled(sgrid, vals)
    return GeneralSampled(sgrid, vals)


def load_symbol(path, grid: GridSpec | None = None) -> Symbol:
    return symbol_from_dict(load_json(path), grid)


def save_symbol(path, sigma: Symbol, descriptor: dict | None = None) -> None:
    _dump(path, symbol_to_dict(sigma, descriptor))


# ---------------------------------------------------------------- reports


def write_reports_json(path, reports: list[ExperimentReport], meta: dict | None = None) -> None:
    doc = {**(meta or {}), "pass": all(r.passed for r in reports), "reports": [r.to_dict() for r in reports]}
    _dump(path, doc)


def write_reports_csv(path, reports: list[ExperimentReport]) -> None:
    """Flat CSV with columns ``experiment, j, norm, ratio, slope, expected, pass``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in reports:
            w.writerows(r.csv_rows())


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_.=," else "_" for c in name)


def write_plot_data(directory, reports: list[ExperimentReport]) -> list[str]:
    """Write one two-column ``j value`` file per (report, record label).

    The value column is the record's ``ratio`` when present, else its norm.
    Returns the written paths in order.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for rep in reports:
        groups: dict[str, list] = {}
        for r in rep.records:
            groups.setdefault(r.label or "value", []).append(r)
        for label, recs in groups.items():
            path = directory / f"{_safe(rep.name)}__{_safe(label)}.dat"
            with open(path, "w") as fh:
                col = "ratio" if all(r.ratio is not None for r in recs) else "norm"
                fh.write(f"# j {col}\n")
                for r in recs:
                    v = r.ratio if col == "ratio" else r.output_norm
                    fh.write(f"{r.j} {v!r}\n")
            written.append(os.fspath(path))
    return written
