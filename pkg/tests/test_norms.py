import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from besovbilin.grid import DESK_GRID, GridSpec, SampledField, SpectralField, inverse_transform, lp_norm
from besovbilin.norms import (
    BesovParams,
    SobolevParams,
    besov_band_norms,
    besov_norm,
    default_lmax,
    lp_project,
    peak_kernel,
    peak_operator,
    sobolev_norm,
    square_estimate_ratio,
    square_function_check,
)
from besovbilin.symbols import make_low_bump, make_random_bandlimited


def spike(grid, m):
    F = np.zeros(grid.shape, dtype=complex)
    F[grid.index_of(m)] = 1.0
    return inverse_transform(SpectralField(grid, F))


def test_default_lmax_covers_lattice():
    assert default_lmax(DESK_GRID) == 9
    assert default_lmax(GridSpec(2, 64, 1.0)) == 6


@pytest.mark.parametrize("s", [-1.0, 0.0, 0.5, 1.0])
@pytest.mark.parametrize("q", [1.0, 2.0, np.inf])
def test_spike_besov_norm_closed_form(s, q):
    # a spike at xi = 64 lies in band 6 only, where psi_6 = 1
    g = DESK_GRID
    f = spike(g, 64 * 16)
    l2 = g.dxi / (2 * np.pi) * np.sqrt(2 * np.pi * g.period_scale)
    assert besov_norm(f, BesovParams(s, 2.0, q)) == pytest.approx(2.0 ** (6 * s) * l2, rel=1e-12)


def test_spike_sobolev_norm_closed_form():
    g = DESK_GRID
    f = spike(g, 64 * 16)
    l2 = lp_norm(f, 2)
    assert sobolev_norm(f, SobolevParams(1.0)) == pytest.approx((1 + 64.0**2) ** 0.5 * l2, rel=1e-12)


def test_besov_l2_sandwich(rng):
    g = GridSpec(1, 2048, 8.0)
    for _ in range(5):
        f = make_random_bandlimited(g, rng, 60.0)
        b = besov_norm(f, BesovParams(0.0))
        l2 = lp_norm(f, 2)
        assert 2**-0.5 * l2 - 1e-12 <= b <= l2 + 1e-12


def test_bands_reconstruct_field(rng, mid_grid):
    f = make_random_bandlimited(mid_grid, rng, 40.0)
    total = sum((lp_project(f, l) for l in range(default_lmax(mid_grid) + 1)), SampledField.zeros(mid_grid))
    assert np.max(np.abs(total.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


def test_band_norm_list_is_ascending(mid_grid, rng):
    f = make_random_bandlimited(mid_grid, rng, 10.0)
    bands = besov_band_norms(f, 2.0)
    assert [l for l, _ in bands] == list(range(default_lmax(mid_grid) + 1))
    assert all(v == 0.0 or v < 1e-12 for l, v in bands if l >= 5)


def test_besov_embedding_in_q(mid_grid, rng):
    # l^{q} norms decrease in q
    f = make_random_bandlimited(mid_grid, rng, 60.0)
    vals = [besov_norm(f, BesovParams(0.5, 2.0, q)) for q in (1.0, 2.0, 4.0, np.inf)]
    assert all(a >= b - 1e-14 for a, b in zip(vals, vals[1:]))


@settings(max_examples=20, deadline=None)
@given(
    c=st.floats(-5, 5).filter(lambda v: abs(v) > 1e-3),
    s=st.sampled_from([-0.5, 0.0, 1.0]),
    p=st.sampled_from([1.0, 2.0, 4.0]),
    q=st.sampled_from([1.0, 2.0, np.inf]),
    seed=st.integers(0, 1000),
)
def test_besov_homogeneity_and_triangle(c, s, p, q, seed):
    g = GridSpec(1, 256, 4.0)
    r = np.random.default_rng(seed)
    f = make_random_bandlimited(g, r, 20.0)
    h = make_random_bandlimited(g, r, 20.0)
    prm = BesovParams(s, p, q)
    nf = besov_norm(f, prm)
    assert besov_norm(c * f, prm) == pytest.approx(abs(c) * nf, rel=1e-10)
    assert besov_norm(f + h, prm) <= nf + besov_norm(h, prm) + 1e-10


def test_parameter_validation():
    with pytest.raises(ValueError):
        BesovParams(0.0, 0.5)
    with pytest.raises(ValueError):
        BesovParams(0.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        SobolevParams(0.0, 0.9)


def test_peak_operator_of_constant(mid_grid):
    g = mid_grid
    out = peak_operator(SampledField(g, np.ones(g.shape)), 1.0).values.real
    expected = peak_kernel(g, 1.0).sum() * g.dx
    assert np.ptp(out) <= 1e-12 * expected
    assert out.mean() == pytest.approx(expected, rel=1e-12)
    # kernel integrates to 2 on the line; three periods capture all but the tail
    assert 1.9 < expected < 2.0


def test_peak_operator_nonnegative_and_self_dominating(mid_grid, rng):
    f = make_random_bandlimited(mid_grid, rng, 5.0)
    S = peak_operator(f)
    assert np.all(S.values.real >= 0)
    low = make_low_bump(mid_grid)
    S = peak_operator(low).values.real
    SS = peak_operator(SampledField(mid_grid, S)).values.real
    ratio = SS / S
    assert ratio.min() > 1.0
    assert ratio.max() < 4.0


def test_peak_operator_rejects_bad_radius(small_grid):
    with pytest.raises(ValueError):
        peak_operator(SampledField.zeros(small_grid), 0.0)


def test_square_function_on_zero(small_grid):
    rep = square_function_check(SampledField.zeros(small_grid), 2.0, 2.0, 4.0)
    assert rep.ratio == 0.0
    assert square_estimate_ratio(SampledField.zeros(small_grid), 2.0) == 0.0


def test_square_function_l2_identity_at_unit_radius(mid_grid, rng):
    # at p = p_tilde = 2 the ratio is (sum phi_nu^2) weighted, between 1/2 and 1
    f = make_random_bandlimited(mid_grid, rng, 6.0)
    rep = square_function_check(f, 1.0, 2.0, 2.0)
    assert 2**-0.5 <= rep.ratio <= 1.0 + 1e-12


def test_square_function_argument_checks(small_grid):
    f = SampledField.zeros(small_grid)
    with pytest.raises(ValueError):
        square_function_check(f, 2.0, 4.0, 2.0)
    with pytest.raises(ValueError):
        square_function_check(f, 0.5, 2.0, 2.0)


def test_lp_project_selects_single_band():
    g = DESK_GRID
    f = spike(g, 32 * 16)
    for level in range(default_lmax(g) + 1):
        out = lp_project(f, level).values
        if level == 5:
            assert np.max(np.abs(out - f.values)) <= 1e-15
        else:
            assert np.max(np.abs(out)) <= 1e-15 * np.max(np.abs(f.values))
    assert not np.any(lp_project(SampledField.zeros(g), 3).values)


@pytest.mark.parametrize("p", [1.0, 4.0, np.inf])
def test_spike_besov_norm_general_p(p):
    g = DESK_GRID
    f = spike(g, 16 * 16)
    inv_p = 0.0 if np.isinf(p) else 1.0 / p
    expected = 2.0 ** (4 * 0.5) * g.dxi / (2 * np.pi) * (2 * np.pi * g.period_scale) ** inv_p
    assert besov_norm(f, BesovParams(0.5, p, 2.0)) == pytest.approx(expected, rel=1e-10)


def test_zero_field_norms(small_grid):
    z = SampledField.zeros(small_grid)
    assert besov_norm(z, BesovParams(1.0, 3.0, 1.0)) == 0.0
    assert sobolev_norm(z, SobolevParams(2.0, 4.0)) == 0.0
    assert not np.any(peak_operator(z).values)


def test_sobolev_order_zero_is_lp(mid_grid, rng):
    f = make_random_bandlimited(mid_grid, rng, 30.0)
    for p in (1.0, 2.0, 3.0):
        assert sobolev_norm(f, SobolevParams(0.0, p)) == lp_norm(f, p)


def test_double_peak_operator_is_comparable():
    # S(S(|f|^2)) and S(|f|^2) agree up to a uniform factor
    g = GridSpec(1, 1024, 4.0)
    lo, hi = np.inf, 0.0
    for seed in range(10):
        f = make_random_bandlimited(g, np.random.default_rng(seed), 6.0)
        a = SampledField(g, np.abs(f.values) ** 2)
        S = peak_operator(a).values.real
        SS = peak_operator(SampledField(g, S)).values.real
        lo, hi = min(lo, (SS / S).min()), max(hi, (SS / S).max())
    C = max(hi, 1 / lo)
    print(f"S(S(|f|^2)) / S(|f|^2) in [{lo:.3f}, {hi:.3f}], C = {C:.3f}")
    assert C <= 4.0


@pytest.mark.parametrize("p", [2.0, 4.0])
def test_sobolev_to_besov_embedding_constant_is_stable(p):
    g = GridSpec(1, 4096, 8.0)
    ratios = []
    for seed in range(12):
        r = np.random.default_rng([int(p), seed])
        radius = 2.0 ** r.uniform(1, 7)
        f = make_random_bandlimited(g, r, radius, center=r.uniform(-50, 50))
        ratios.append(besov_norm(f, BesovParams(0.5, p, 1.0)) / sobolev_norm(f, SobolevParams(0.75, p)))
    print(f"p={p}: B^0.5_(p,1) / L^p_0.75 in [{min(ratios):.3f}, {max(ratios):.3f}]")
    assert max(ratios) / min(ratios) <= 4.0
    assert max(ratios) <= 4.0
