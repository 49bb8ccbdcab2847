"""
besovbilin: bilinear pseudo-differential operators on periodic grids.

Scaled DFTs, smooth Littlewood-Paley windows, Besov and Sobolev norms,
three evaluation paths for ``T_sigma(f1, f2)``, the sharpness symbol
families, and experiment runners that measure growth exponents and
ratio stability.
"""

from .bilinear import (
    GeneralSampled,
    SeparableSum,
    SeparableTerm,
    Symbol,
    SymbolPiece,
    XIndependentSampled,
    apply_bilinear,
    apply_bilinear_bruteforce,
    apply_bilinear_separable,
    apply_bilinear_xindep,
    decompose_symbol,
    lattice_pairings,
    lattice_sum,
    pointwise_bound_check,
    recompose_symbol,
    support_check,
    trilinear_pairing,
)
from .exceptions import BesovBilinError, ConfigError, GridMismatchError, NonFiniteError, NyquistError
from .experiments import (
    BoundednessConfig,
    ExperimentReport,
    SweepConfig,
    fit_growth_exponent,
    run_boundedness_probe,
    run_closed_form_check,
    run_lemma_checks,
    run_norm_scaling,
    run_sharpness_sweep,
    run_suite,
)
from .grid import (
    DESK_GRID,
    GridSpec,
    SampledField,
    SpectralField,
    apply_multiplier,
    forward_transform,
    inner_product,
    inverse_transform,
    lp_norm,
)
from .norms import (
    BesovParams,
    SobolevParams,
    besov_norm,
    lp_project,
    peak_operator,
    sobolev_norm,
    square_function_check,
)
from .symbols import (
    ClassSpec,
    make_identity_symbol,
    make_low_bump,
    make_modulated_bump,
    make_random_bandlimited,
    make_sharpness_symbol_hormander,
    make_sharpness_symbol_mixed,
    make_sharpness_symbol_product,
    seminorm_estimate,
    symbol_from_descriptor,
)
from .windows import (
    FlatAnnulus,
    FlatBump,
    make_cube_partition,
    make_psi_family,
    make_sharpness_windows,
    smoothstep,
)

__version__ = "0.1.0"
