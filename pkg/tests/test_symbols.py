import numpy as np
import pytest
from scipy import integrate

from besovbilin.exceptions import ConfigError, NyquistError
from besovbilin.grid import DESK_GRID, GridSpec, forward_transform, lp_norm
from besovbilin.symbols import (
    ClassSpec,
    make_identity_symbol,
    make_low_bump,
    make_modulated_bump,
    make_random_bandlimited,
    make_sharpness_symbol_hormander,
    make_sharpness_symbol_mixed,
    make_sharpness_symbol_product,
    max_symbol_k,
    seminorm_estimate,
    symbol_from_descriptor,
)
from besovbilin.bilinear import SeparableSum
from besovbilin.windows import make_sharpness_windows


def test_max_symbol_k():
    assert max_symbol_k(DESK_GRID) == 8
    assert max_symbol_k(GridSpec(1, 64, 2.0)) == 3


def test_hormander_symbol_values():
    sym = make_sharpness_symbol_hormander(1, 6)
    # diagonal point (-2^k, 2^k): plateau and annulus both equal 1 for the k-th term only
    for k in range(1, 7):
        v = sym.evaluate(np.array([-(2.0**k)]), np.array([2.0**k]))[0]
        assert v == pytest.approx(2.0 ** (-k / 2), rel=1e-14)
    assert sym.evaluate(np.array([0.0]), np.array([0.0]))[0] == 0.0


def test_product_and_mixed_values():
    prod = make_sharpness_symbol_product(-0.25, -0.5, 1, 6)
    assert prod.evaluate(np.array([8.0]), np.array([16.0]))[0] == pytest.approx(2.0 ** (-0.75 - 2.0))
    mixed = make_sharpness_symbol_mixed(-0.5, 1, 6)
    assert mixed.evaluate(np.array([0.0]), np.array([32.0]))[0] == pytest.approx(2.0**-2.5)
    assert mixed.evaluate(np.array([4.0]), np.array([32.0]))[0] == 0.0


def test_k_range_validation():
    with pytest.raises(ValueError):
        make_sharpness_symbol_hormander(0, 3)
    with pytest.raises(NyquistError):
        make_sharpness_symbol_hormander(1, 9, grid=DESK_GRID)


def test_descriptors():
    g = DESK_GRID
    assert len(symbol_from_descriptor({"family": "def-symbol"}, g).terms) == 8
    assert len(symbol_from_descriptor({"family": "def-symbol", "k_min": 5}, g).terms) == 4
    assert isinstance(symbol_from_descriptor({"family": "identity"}), SeparableSum)
    sep = symbol_from_descriptor(
        {"family": "separable", "terms": [{"coefficient": 2, "m1": {"kind": "constant"}, "m2": {"kind": "lp_band", "level": 2}}]}
    )
    assert sep.evaluate(np.array([0.0]), np.array([4.0]))[0] == 2.0
    with pytest.raises(ConfigError):
        symbol_from_descriptor({"family": "unknown"})
    with pytest.raises(ConfigError):
        symbol_from_descriptor({"family": "product", "m1": 0.0})
    with pytest.raises(ConfigError):
        symbol_from_descriptor({"k_min": 1})


def test_low_bump_plancherel_against_quadrature():
    bump, _, _ = make_sharpness_windows()
    val, _ = integrate.quad(lambda t: bump(t) ** 2, -(2**0.5), 2**0.5, points=[-(2**0.25), 2**0.25], epsabs=1e-13)
    exact = val / (2 * np.pi)
    # the lattice sum converges as the frequency step 1/P shrinks
    errs = [abs(lp_norm(make_low_bump(GridSpec(1, 2**10 * P, P)), 2) ** 2 - exact) / exact for P in (16, 32, 64, 128)]
    assert errs[0] <= 1e-3
    assert errs[-1] <= 1e-9
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_modulated_bump_spectrum_is_shifted():
    g = DESK_GRID
    F = np.abs(forward_transform(make_modulated_bump(g, 6, -1)).values)
    (xi,) = g.frequencies()
    peak = xi[np.argmax(F)]
    assert abs(peak + 64.0) <= 2**0.25
    assert np.max(F[np.abs(xi + 64) > 2**0.5]) <= 1e-14 * F.max()
    with pytest.raises(NyquistError):
        make_modulated_bump(g, 9, 1)
    with pytest.raises(ValueError):
        make_modulated_bump(g, 3, 0)


def test_random_bandlimited_is_seeded_and_bandlimited():
    g = GridSpec(1, 1024, 4.0)
    a = make_random_bandlimited(g, np.random.default_rng(7), 10.0, center=20.0)
    b = make_random_bandlimited(g, np.random.default_rng(7), 10.0, center=20.0)
    assert np.array_equal(a.values, b.values)
    F = np.abs(forward_transform(a).values)
    (xi,) = g.frequencies()
    assert np.max(F[np.abs(xi - 20) > 10]) <= 1e-14 * F.max()
    with pytest.raises(NyquistError):
        make_random_bandlimited(g, np.random.default_rng(0), 100.0, center=40.0)


def test_seminorms_of_constant_symbol():
    t = seminorm_estimate(make_identity_symbol(), ClassSpec.hormander(0.0), bands=range(1, 4))
    assert t.entries[(0, 0, 0)] == pytest.approx(1.0)
    # fourth differences with step 1/32 amplify rounding by about 32^4
    assert all(v <= 1e-8 for k, v in t.entries.items() if k != (0, 0, 0))


def test_seminorms_of_sharpness_symbol_are_band_uniform():
    sym = make_sharpness_symbol_hormander(1, 9)
    t = seminorm_estimate(sym, ClassSpec.hormander(-0.5), bands=range(4, 8))
    assert t.band_spread((0, 0, 0)) <= 10.0
    # derivatives never grow with the band, so one constant covers all bands
    for key, bands in t.per_band.items():
        vals = [bands[k] for k in sorted(bands)]
        assert all(b <= a * 1.01 for a, b in zip(vals, vals[1:])), key


def test_seminorms_ignore_term_order():
    sym = make_sharpness_symbol_hormander(1, 6)
    rev = SeparableSum(tuple(reversed(sym.terms)))
    spec = ClassSpec.hormander(-0.5, max_order=1)
    a = seminorm_estimate(sym, spec, bands=range(2, 5))
    b = seminorm_estimate(rev, spec, bands=range(2, 5))
    for key in a.entries:
        assert a.entries[key] == pytest.approx(b.entries[key], rel=1e-12, abs=1e-15)


def test_seminorms_on_sampled_symbol_agree_with_analytic():
    g = GridSpec(1, 512, 8.0)
    sym = make_sharpness_symbol_hormander(1, 4)
    spec = ClassSpec.hormander(-0.5, max_order=0)
    a = seminorm_estimate(sym, spec, bands=range(2, 5)).entries[(0, 0, 0)]
    b = seminorm_estimate(sym.sample(g), spec, bands=range(2, 5)).entries[(0, 0, 0)]
    assert b == pytest.approx(a, rel=0.05)


def test_class_weights():
    h = ClassSpec.hormander(-0.5)
    assert h.band_weight(6, 3) == 2.0**-3
    p = ClassSpec.product(-0.25, -0.5)
    assert p.band_weight(4, 2) == 2.0**-2
    assert p.weight(np.array(3.0), np.array(1.0)) == pytest.approx(4**-0.25 * 2**-0.5)
    with pytest.raises(ValueError):
        ClassSpec("other")


@pytest.mark.parametrize("k", [2, 4, 6])
def test_sharpness_symbol_sample_points(k):
    hor = make_sharpness_symbol_hormander(1, 8)
    assert hor.evaluate(np.array([0.5 * 2.0**k]), np.array([2.0**k]))[0] == pytest.approx(2.0 ** (-k / 2))
    # at (2^k, 2^{k+5}) only the level k+5 term is nonzero, so the value
    # vanishes exactly when that level is outside the symbol's range
    far = hor.evaluate(np.array([2.0**k]), np.array([2.0 ** (k + 5)]))[0]
    assert far == (pytest.approx(2.0 ** (-(k + 5) / 2)) if k + 5 <= 8 else 0.0)
    prod = make_sharpness_symbol_product(-0.25, -0.5, 1, 8)
    assert prod.evaluate(np.array([2.0**k]), np.array([2.0 ** (k - 1)]))[0] == pytest.approx(2.0 ** (-0.25 * k - 0.5 * (k - 1)))
    assert prod.evaluate(np.array([0.0]), np.array([2.0**k]))[0] == 0.0
    mixed = make_sharpness_symbol_mixed(-0.25, 1, 8)
    assert mixed.evaluate(np.array([0.0]), np.array([2.0**k]))[0] == pytest.approx(2.0 ** (-0.25 * k))
    assert mixed.evaluate(np.array([3.0]), np.array([2.0**k]))[0] == 0.0


def test_modulated_bumps_share_modulus_and_sit_in_annulus():
    g = DESK_GRID
    (xi,) = g.frequencies()
    ref = np.abs(make_low_bump(g).values)
    for j in range(5, 9):
        f = make_modulated_bump(g, j, 1)
        assert np.max(np.abs(np.abs(f.values) - ref)) <= 1e-14
        assert np.max(np.abs(np.abs(make_modulated_bump(g, j, -1).values) - ref)) <= 1e-14
        F = np.abs(forward_transform(f).values)
        outside = (np.abs(xi) < 2 ** (j - 0.25)) | (np.abs(xi) > 2 ** (j + 0.25))
        assert np.max(F[outside]) <= 1e-14 * F.max()


def test_low_bump_is_real_and_even():
    f = make_low_bump(DESK_GRID).values
    assert np.max(np.abs(f.imag)) <= 1e-15 * np.max(np.abs(f))
    # x_k -> -x_k maps index k to N - k (index 0 is -pi P, which has no partner)
    assert np.max(np.abs(f[1:] - f[1:][::-1])) <= 1e-15


def test_low_bump_sobolev_norm_matches_lattice_plancherel():
    from besovbilin.norms import SobolevParams, sobolev_norm

    bump, _, _ = make_sharpness_windows()
    g = DESK_GRID
    (xi,) = g.frequencies()
    lattice = np.sqrt(np.sum(bump(xi) ** 2) * g.dxi / (2 * np.pi))
    assert sobolev_norm(make_low_bump(g), SobolevParams(0.0)) == pytest.approx(lattice, rel=1e-8)


def test_sharpness_symbol_under_order_zero_decays():
    sym = make_sharpness_symbol_hormander(1, 9)
    t = seminorm_estimate(sym, ClassSpec.hormander(0.0, max_order=0), bands=range(4, 8))
    vals = [t.per_band[(0, 0, 0)][k] for k in range(4, 8)]
    steps = [b / a for a, b in zip(vals, vals[1:])]
    assert all(abs(s - 2**-0.5) <= 0.05 for s in steps)


def test_product_symbol_seminorms_band_stable():
    sym = make_sharpness_symbol_product(-0.25, -0.25, 1, 9)
    t = seminorm_estimate(sym, ClassSpec.product(-0.25, -0.25, max_order=1), bands=range(4, 8))
    assert t.band_spread((0, 0, 0)) <= 10.0
    for key, bands in t.per_band.items():
        vals = [bands[k] for k in sorted(bands)]
        assert all(np.isfinite(vals)) and all(b <= a * 1.01 for a, b in zip(vals, vals[1:])), key
