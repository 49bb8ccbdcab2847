"""Walk through the sharpness constructions on the desk grid.

Builds the modulated bumps, checks the closed-form output of the
Hormander-type symbol, and fits the growth exponent of the output norm.

    python3 demos/sharpness_tour.py
"""

import numpy as np

from besovbilin import (
    DESK_GRID,
    BesovParams,
    apply_bilinear,
    besov_norm,
    fit_growth_exponent,
    make_low_bump,
    make_modulated_bump,
    make_sharpness_symbol_hormander,
)
from besovbilin.symbols import max_symbol_k

grid = DESK_GRID
js = range(5, 9)
sym = make_sharpness_symbol_hormander(5, max_symbol_k(grid), grid=grid)
low = make_low_bump(grid).values

print("j   closed-form error   ||T(f1j, f2j)||_B0   ||T(g, f2j)||_B^1/2")
diag, high_low = [], []
for j in js:
    f1, f2 = make_modulated_bump(grid, j, -1), make_modulated_bump(grid, j, +1)
    T = apply_bilinear(sym, f1, f2)
    ref = 2.0 ** (-j / 2) * low**2
    err = np.max(np.abs(T.values - ref)) / np.max(np.abs(ref))
    d = besov_norm(T, BesovParams(0.0))
    h = besov_norm(apply_bilinear(sym, make_low_bump(grid), f2), BesovParams(0.5))
    diag.append((j, d))
    high_low.append((j, h))
    print(f"{j}   {err:.2e}            {d:.4e}           {h:.4e}")

# the diagonal pair decays like 2^{-j/2}; the high-low pair grows like 2^{j(s - 1/2)}
print("diagonal slope  ", round(fit_growth_exponent(diag)[0], 4))
print("high-low slope  ", round(fit_growth_exponent(high_low)[0], 4))
