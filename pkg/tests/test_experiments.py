import csv
import io as stdio

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besovbilin.exceptions import ConfigError, NyquistError
from besovbilin.experiments import (
    BoundednessConfig,
    Check,
    ExperimentReport,
    Record,
    SweepConfig,
    expected_sharpness_exponent,
    fit_growth_exponent,
    run_boundedness_probe,
    run_closed_form_check,
    run_norm_scaling,
    run_sharpness_sweep,
    run_suite,
)
from besovbilin.grid import GridSpec
from besovbilin.io import write_reports_csv
from besovbilin.norms import BesovParams, SobolevParams

GRID = GridSpec(1, 2048, 8.0)
JS = (3, 4, 5, 6)


def test_fit_exact_power_law():
    slope, intercept, resid = fit_growth_exponent([(j, 3.0 * 2.0 ** (-0.7 * j)) for j in range(2, 9)])
    assert slope == pytest.approx(-0.7, abs=1e-12)
    assert intercept == pytest.approx(np.log2(3.0), abs=1e-12)
    assert resid <= 1e-12


def test_fit_constant_data():
    slope, _, resid = fit_growth_exponent([(j, 5.0) for j in range(4)])
    assert abs(slope) <= 1e-12
    assert resid <= 1e-12


@settings(max_examples=50, deadline=None)
@given(
    alpha=st.floats(-2, 2),
    noise=st.lists(st.floats(-0.05, 0.05), min_size=11, max_size=11),
)
def test_fit_is_robust_to_five_percent_noise(alpha, noise):
    # |log2(1 +- 0.05)| <= 0.074; the least-squares slope over j = 0..10
    # moves by at most 0.074 * sum|j - 5| / sum (j - 5)^2 = 0.074 * 30 / 110
    pts = [(j, 2.0 ** (alpha * j) * (1 + e)) for j, e in enumerate(noise)]
    slope, _, _ = fit_growth_exponent(pts)
    assert abs(slope - alpha) <= 0.0202


def test_fit_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_growth_exponent([(1, 1.0), (2, 2.0)])
    with pytest.raises(ValueError):
        fit_growth_exponent([(1, 1.0), (2, 0.0), (3, 1.0)])
    with pytest.raises(ValueError):
        fit_growth_exponent([(1, 1.0), (1, 2.0), (1, 3.0)])


def test_check_relations():
    assert Check("a", 1.0, 2.0).passed
    assert not Check("a", 3.0, 2.0).passed
    assert Check("a", 3.0, 2.0, ">=").passed
    assert not Check("a", float("nan"), 2.0).passed
    with pytest.raises(ValueError):
        Check("a", 1.0, 2.0, "<")


def test_report_without_checks_fails():
    assert not ExperimentReport("empty").passed
    rep = ExperimentReport("x", records=[Record(1, 2.0)], checks=[Check("c", 0.0, 1.0)])
    assert rep.passed
    assert rep.summary().startswith("[PASS] x")


def test_expected_exponents():
    assert expected_sharpness_exponent({"family": "def-symbol"}, "high_low", 1.0) == 0.5
    assert expected_sharpness_exponent({"family": "def-symbol"}, "diagonal", 1.0) == -0.5
    assert expected_sharpness_exponent({"family": "mixed", "m2": -0.25}, "high_low", 0.5) == 0.25
    assert expected_sharpness_exponent({"family": "product", "m1": -0.25, "m2": -0.5}, "diagonal", 0.0) == -0.75
    with pytest.raises(ConfigError):
        expected_sharpness_exponent({"family": "product", "m1": 0, "m2": 0}, "high_low", 0.0)


def test_closed_form_on_small_grid():
    rep = run_closed_form_check(GRID, JS, refine=False, brute_grid=None)
    assert rep.passed, rep.summary()


@pytest.mark.parametrize("s", [0.0, 1.0])
def test_sharpness_sweep_on_small_grid(s):
    rep = run_sharpness_sweep(SweepConfig({"family": "def-symbol"}, "high_low", BesovParams(s), j_range=JS, grid=GRID))
    assert rep.passed, rep.summary()
    assert rep.slope == pytest.approx(s - 0.5, abs=0.05)


def test_sweep_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(j_range=(3, 4, 5), grid=GRID)
    with pytest.raises(ConfigError):
        SweepConfig(pair="sideways", j_range=JS, grid=GRID)
    with pytest.raises(NyquistError):
        SweepConfig(j_range=(4, 5, 6, 7), grid=GRID)
    with pytest.raises(ConfigError):
        SweepConfig({"family": "mixed", "m2": -0.5}, "diagonal", j_range=JS, grid=GRID)


def test_boundedness_config_validation():
    with pytest.raises(ConfigError):
        BoundednessConfig(0.0, 0.0, p=3.0, grid=GRID, j_range=JS)
    with pytest.raises(ConfigError):
        BoundednessConfig(0.0, 0.0, q1=2, q2=2, q=2, grid=GRID, j_range=JS)
    with pytest.raises(ConfigError):
        BoundednessConfig(0.0, 0.0, s=1.0, grid=GRID, j_range=JS)
    with pytest.raises(ConfigError):
        BoundednessConfig(0.0, 0.0, families=("nope",), grid=GRID, j_range=JS)
    assert BoundednessConfig(0.0, 0.0, grid=GRID, j_range=JS).admissible()
    assert not BoundednessConfig(-0.5, -0.5, grid=GRID, j_range=JS).admissible()


def test_boundedness_probe_on_small_grid():
    cfg = BoundednessConfig(0.0, 0.0, q1=4, q2=4, p=2, q=2, grid=GRID, j_range=JS)
    rep = run_boundedness_probe(cfg)
    assert rep.passed, rep.summary()


def test_norm_scaling_report_is_deterministic(tmp_path):
    a = run_norm_scaling(GRID, JS)
    b = run_norm_scaling(GRID, JS)
    assert a.passed
    write_reports_csv(tmp_path / "a.csv", [a])
    write_reports_csv(tmp_path / "b.csv", [b])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    rows = list(csv.DictReader(stdio.StringIO((tmp_path / "a.csv").read_text())))
    assert list(rows[0]) == ["experiment", "j", "norm", "ratio", "slope", "expected", "pass"]


def test_unknown_suite():
    with pytest.raises(ConfigError):
        run_suite("everything", GRID, JS)


def test_fit_recovers_exact_decay():
    slope, _, resid = fit_growth_exponent([(j, 2.0 ** (-j / 2)) for j in range(5, 9)])
    assert slope == pytest.approx(-0.5, abs=1e-13) and resid <= 1e-13


def test_fit_perturbation_bound_on_four_points():
    # with only j = 5..8 the worst-case shift is 0.4 |log2(0.95)| + 0.4 log2(1.05) = 0.058
    worst = 0.0
    for signs in np.ndindex(2, 2, 2, 2):
        eps = [0.05 if s else -0.05 for s in signs]
        slope, _, _ = fit_growth_exponent([(j, 3 * 2.0 ** (-j / 2) * (1 + e)) for j, e in zip(range(5, 9), eps)])
        worst = max(worst, abs(slope + 0.5))
    assert worst == pytest.approx(0.4 * (np.log2(1.05) - np.log2(0.95)), rel=1e-9)


def test_terms_outside_k_range_give_zero():
    from besovbilin.bilinear import apply_bilinear_separable
    from besovbilin.symbols import make_modulated_bump, make_sharpness_symbol_hormander

    f1, f2 = make_modulated_bump(GRID, 6, -1), make_modulated_bump(GRID, 6, 1)
    T = apply_bilinear_separable(make_sharpness_symbol_hormander(2, 4, grid=GRID), f1, f2)
    assert np.max(np.abs(T.values)) <= 1e-14 * np.max(np.abs(f1.values * f2.values))
