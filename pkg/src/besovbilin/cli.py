"""
Command-line interface.

Subcommands: ``besov-norm``, ``sobolev-norm``, ``apply-op``, ``make-symbol``,
``make-function`` and ``experiment``.  Exit codes: 0 success, 1 failed
experiment check, 2 usage or configuration error, 3 numeric failure.
Worker threads for experiments are capped by ``BESOVBILIN_THREADS``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import io
from .bilinear import SeparableSum, apply_bilinear
from .exceptions import BesovBilinError, ConfigError, GridMismatchError, NonFiniteError, NyquistError
from .experiments import (
    DEFAULT_J_RANGE,
    BoundednessConfig,
    SweepConfig,
    run_boundedness_probe,
    run_closed_form_check,
    run_lemma_checks,
    run_norm_scaling,
    run_sharpness_sweep,
    run_suite,
)
from .grid import DESK_GRID, GridSpec, SampledField, plane_wave, require_same_grid
from .norms import BesovParams, SobolevParams, besov_band_norms, besov_norm, sobolev_norm
from .symbols import (
    make_low_bump,
    make_modulated_bump,
    make_random_bandlimited,
    symbol_from_descriptor,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

PRESETS = {"desk": DESK_GRID}


def _extended(text: str) -> float:
    """Parse a real number, accepting ``inf``."""
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _print(doc) -> None:
    print(json.dumps(doc, indent=1))


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("grid")
    g.add_argument("--grid-preset", choices=sorted(PRESETS), help="named grid (desk: n=1, N=2^14, P=16)")
    g.add_argument("--dim", type=int, help="spatial dimension n")
    g.add_argument("--samples", type=int, help="samples per axis N (power of two)")
    g.add_argument("--period-scale", type=float, help="period scale P")


def _grid(args, default: GridSpec = DESK_GRID) -> GridSpec:
    base = PRESETS[args.grid_preset] if args.grid_preset else default
    try:
        return GridSpec(
            args.dim if args.dim is not None else base.dim,
            args.samples if args.samples is not None else base.samples,
            args.period_scale if args.period_scale is not None else base.period_scale,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------- commands


def cmd_besov_norm(args) -> int:
    f = io.load_field(args.field)
    params = BesovParams(args.s, args.p, args.q, args.l_max)
    bands = besov_band_norms(f, params.p, params.resolved_lmax(f.grid))
    _print({
        "norm": besov_norm(f, params),
        "params": {"s": params.s, "p": params.p, "q": params.q, "l_max": params.resolved_lmax(f.grid)},
        "per_band": [{"l": lvl, "band_norm": b} for lvl, b in bands],
    })
    return EXIT_OK


def cmd_sobolev_norm(args) -> int:
    f = io.load_field(args.field)
    params = SobolevParams(args.s, args.p)
    _print({"norm": sobolev_norm(f, params), "params": {"s": params.s, "p": params.p}})
    return EXIT_OK


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b)) / scale) if scale else 0.0


def cmd_apply_op(args) -> int:
    f1 = io.load_field(args.f1)
    f2 = io.load_field(args.f2)
    grid = require_same_grid(f1, f2)
    sigma = io.load_symbol(args.symbol, grid)
    try:
        T = apply_bilinear(sigma, f1, f2, args.path)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, BesovBilinError):
            raise
        raise ConfigError(f"path {args.path!r} is unavailable for this symbol: {exc}") from None
    io.save_field(args.out, T)
    doc = {"out": args.out, "path": args.path}
    if args.compare_paths:
        paths = ["brute"]
        if not sigma.x_dependent:
            paths.append("xindep")
        if isinstance(sigma, SeparableSum):
            paths.append("separable")
        outs = {p: apply_bilinear(sigma, f1, f2, p).values for p in paths}
        dev = max((_relative(outs[a], outs[b]) for a in paths for b in paths if a < b), default=0.0)
        doc["compared_paths"] = paths
        doc["max_relative_deviation"] = dev
    _print(doc)
    return EXIT_OK


def cmd_make_symbol(args) -> int:
    grid = _grid(args)
    desc = {"family": args.family}
    for key in ("k_min", "k_max", "m1", "m2"):
        v = getattr(args, key)
        if v is not None:
            desc[key] = v
    sigma = symbol_from_descriptor(desc, grid)
    if args.sampled:
        sigma = sigma.sample(grid)
    io.save_symbol(args.out, sigma, desc)
    _print({"out": args.out, "descriptor": desc, "representation": "x_independent_sampled" if args.sampled else "separable_sum"})
    return EXIT_OK


def cmd_make_function(args) -> int:
    grid = _grid(args)
    kind = args.kind
    if kind == "zero":
        f = SampledField.zeros(grid)
    elif kind == "low-bump":
        f = make_low_bump(grid)
    elif kind == "modulated-bump":
        if args.j is None:
            raise ConfigError("modulated-bump needs --j")
        f = make_modulated_bump(grid, args.j, args.sign)
    elif kind == "random":
        rng = np.random.default_rng(args.seed)
        f = make_random_bandlimited(grid, rng, args.radius, args.center)
    elif kind == "spike":
        # unit spectral spike: F = 1 at xi = frequency e_1, zero elsewhere
        m = round(args.frequency / grid.dxi)
        if abs(m * grid.dxi - args.frequency) > 1e-9 or not -grid.samples // 2 <= m < grid.samples // 2:
            raise NyquistError(f"frequency {args.frequency} is not a lattice point of {grid}")
        f = plane_wave(grid, (m,) + (0,) * (grid.dim - 1)) * (grid.dxi / (2 * math.pi)) ** grid.dim
    else:  # argparse restricts the choices
        raise ConfigError(f"unknown function kind {kind!r}")
    io.save_field(args.out, f)
    _print({"out": args.out, "kind": kind, "grid": io.grid_to_dict(grid), "seed": args.seed})
    return EXIT_OK


# ---------------------------------------------------------------- experiment configs

RUN_CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "grid": {
            "oneOf": [
                {"type": "string", "enum": sorted(PRESETS)},
                {
                    "type": "object",
                    "required": ["samples_per_axis", "period_scale"],
                    "properties": io._GRID_PROPS,
                },
            ]
        },
        "seed": {"type": "integer"},
        "j_range": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "suite": {"enum": ["sharpness", "lemmas"]},
        "experiments": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": ["closed_form", "norm_scaling", "sharpness", "boundedness", "lemmas"]}},
            },
        },
        "output": {
            "type": "object",
            "properties": {"json": {"type": "string"}, "csv": {"type": "string"}, "plot_data": {"type": "string"}},
        },
    },
}


def _norm_params(d: dict):
    kind = d.get("kind", "besov")
    s = float(d.get("s", 0.0))
    p = float(d.get("p", 2.0))
    if kind == "besov":
        return BesovParams(s, p, float(d.get("q", 2.0)))
    if kind == "sobolev":
        return SobolevParams(s, p)
    raise ConfigError(f"norm kind must be besov or sobolev, got {kind!r}")


def _num(v):
    return float("inf") if v in ("inf", "Infinity") else float(v)


def _experiment(spec: dict, grid: GridSpec, j_range, seed: int):
    """Return a zero-argument callable running one configured experiment."""
    spec = dict(spec)
    kind = spec.pop("kind")
    try:
        if kind == "closed_form":
            kw = {k: spec[k] for k in ("m2_values", "tolerance") if k in spec}
            return lambda: run_closed_form_check(grid, j_range, **kw)
        if kind == "norm_scaling":
            kw = {k: spec[k] for k in ("cases", "tolerance") if k in spec}
            return lambda: run_norm_scaling(grid, j_range, **kw)
        if kind == "sharpness":
            cfg = SweepConfig(
                symbol=spec.get("symbol", {"family": "def-symbol"}),
                pair=spec.get("pair", "high_low"),
                output=_norm_params(spec.get("output", {})),
                inputs=tuple(_norm_params(d) for d in spec.get("inputs", [{"kind": "sobolev"}] * 2)),
                j_range=tuple(j_range),
                grid=grid,
                expected_exponent=spec.get("expected_exponent"),
                tolerance=float(spec.get("tolerance", 0.1)),
                name=spec.get("name", ""),
            )
            return lambda: run_sharpness_sweep(cfg)
        if kind == "boundedness":
            exps = {k: _num(spec[k]) for k in ("s1", "s2", "p1", "p2", "q1", "q2", "p", "q", "s") if k in spec}
            extra = {k: spec[k] for k in ("symbol", "expect", "name") if k in spec}
            if "families" in spec:
                extra["families"] = tuple(spec["families"])
            cfg = BoundednessConfig(**exps, **extra, j_range=tuple(j_range), grid=grid, seed=int(spec.get("seed", seed)))
            return lambda: run_boundedness_probe(cfg)
        if kind == "lemmas":
            return lambda: run_lemma_checks(grid, int(spec.get("seed", seed)))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad {kind} experiment entry: {exc}") from None
    raise ConfigError(f"unknown experiment kind {kind!r}")


def cmd_experiment(args) -> int:
    cfg = io.load_json(args.config) if args.config else {}
    io.validate(cfg, RUN_CONFIG_SCHEMA, "run config")
    if args.grid_preset or args.samples or args.period_scale or args.dim:
        grid = _grid(args)
    elif isinstance(cfg.get("grid"), str):
        grid = PRESETS[cfg["grid"]]
    elif isinstance(cfg.get("grid"), dict):
        grid = io.grid_from_dict({"dimension": 1, **cfg["grid"]})
    else:
        grid = DESK_GRID
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    j_range = tuple(cfg.get("j_range", DEFAULT_J_RANGE))
    suite = args.suite or cfg.get("suite")

    if suite:
        runners = [lambda: run_suite(suite, grid, j_range, seed)]
    else:
        entries = cfg.get("experiments", [])
        if not entries:
            raise ConfigError("no experiments selected: give --suite or a config with a non-empty 'experiments' list")
        runners = [(lambda r=_experiment(e, grid, j_range, seed): [r()]) for e in entries]

    reports = []
    for run in runners:
        reports.extend(run())
    out = cfg.get("output", {})
    json_path = args.json or out.get("json")
    csv_path = args.csv or out.get("csv")
    plot_dir = args.plot_data or out.get("plot_data")
    meta = {"grid": io.grid_to_dict(grid), "seed": seed, "j_range": list(j_range), "suite": suite}
    if json_path:
        io.write_reports_json(json_path, reports, meta)
    if csv_path:
        io.write_reports_csv(csv_path, reports)
    if plot_dir:
        io.write_plot_data(plot_dir, reports)
    for r in reports:
        print(r.summary(), file=sys.stderr)
    ok = all(r.passed for r in reports)
    _print({"pass": ok, "reports": len(reports), "failed": [r.name for r in reports if not r.passed], "seed": seed})
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besovbilin",
        description="Bilinear pseudo-differential operators, Besov/Sobolev norms and scaling experiments on periodic grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("besov-norm", help="Besov norm of a field file, with per-band norms")
    p.add_argument("--field", required=True, help="field JSON file")
    p.add_argument("--s", type=float, default=0.0, help="smoothness s")
    p.add_argument("--p", type=_extended, default=2.0, help="integrability p in [1, inf]")
    p.add_argument("--q", type=_extended, default=2.0, help="summability q in (0, inf]")
    p.add_argument("--l-max", type=int, default=None, help="band cutoff (default: covers the whole lattice)")
    p.set_defaults(func=cmd_besov_norm)

    p = sub.add_parser("sobolev-norm", help="Bessel-potential norm of a field file")
    p.add_argument("--field", required=True)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--p", type=_extended, default=2.0)
    p.set_defaults(func=cmd_sobolev_norm)

    p = sub.add_parser("apply-op", help="evaluate T_sigma(f1, f2) and write the output field")
    p.add_argument("--symbol", required=True, help="symbol JSON file (sampled or descriptor)")
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--out", required=True, help="output field JSON file")
    p.add_argument("--path", choices=["auto", "separable", "xindep", "brute"], default="auto")
    p.add_argument("--compare-paths", action="store_true", help="also run every applicable path and report the max relative deviation")
    p.set_defaults(func=cmd_apply_op)

    p = sub.add_parser("make-symbol", help="write a symbol file for a named family")
    p.add_argument("--family", required=True, choices=["def-symbol", "product", "mixed", "identity"])
    p.add_argument("--k-min", dest="k_min", type=int, help="lowest dyadic level (default 1)")
    p.add_argument("--k-max", dest="k_max", type=int, help="highest dyadic level (default: grid limit)")
    p.add_argument("--m1", type=float)
    p.add_argument("--m2", type=float)
    p.add_argument("--sampled", action="store_true", help="store lattice samples instead of window descriptors")
    p.add_argument("--out", required=True)
    _add_grid_args(p)
    p.set_defaults(func=cmd_make_symbol)

    p = sub.add_parser("make-function", help="write a test-function field file")
    p.add_argument("--kind", required=True, choices=["zero", "low-bump", "modulated-bump", "random", "spike"])
    p.add_argument("--j", type=int, help="dyadic level of a modulated bump")
    p.add_argument("--sign", type=int, choices=[-1, 1], default=1, help="modulation direction of a modulated bump")
    p.add_argument("--seed", type=int, default=0, help="seed for --kind random")
    p.add_argument("--radius", type=float, default=8.0, help="spectral radius for --kind random")
    p.add_argument("--center", type=float, default=0.0, help="spectral center (along e_1) for --kind random")
    p.add_argument("--frequency", type=float, default=0.0, help="spike frequency (along e_1) for --kind spike")
    p.add_argument("--out", required=True)
    _add_grid_args(p)
    p.set_defaults(func=cmd_make_function)

    p = sub.add_parser("experiment", help="run configured experiments or a bundled suite")
    p.add_argument("--config", help="run config JSON file")
    p.add_argument("--suite", choices=["sharpness", "lemmas"], help="bundled suite (overrides the config's list)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", help="report JSON path")
    p.add_argument("--csv", help="report CSV path")
    p.add_argument("--plot-data", help="directory for two-column plot files")
    _add_grid_args(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except NonFiniteError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, GridMismatchError, NyquistError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
