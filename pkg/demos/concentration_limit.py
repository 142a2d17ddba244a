"""Near-proportional meeting rates concentrate firms on the median type.

With an asymmetric unimodal preference the mass point of the limit
profile is the circular median of the preference density, not its mode.
Concentration requires frictions below (alpha - 1/2)/(1 - alpha); past
that threshold the equilibrium is diffuse again.
"""

import numpy as np

from frictional_matching import (
    ALPHA_CAP,
    FrictionParams,
    Grid,
    make_preference,
    median_point,
    quadrature,
    solve_fixed_point,
)

grid = Grid(256)
ell = make_preference("skew_gaussian", grid, center=0.6,
                      sd_left=0.25, sd_right=0.05)
med = median_point(ell)
mode = float(grid.points[int(np.argmax(ell.density))])
print(f"Skewed preference: mode at {mode:.3f}, circular median at {med:.3f}\n")

print(f"{'alpha':>6} {'r_f':>5} {'mass within 0.05 of median':>28} {'peak':>7}")
for alpha, r_f in ((0.8, 1.0), (0.99, 1.0), (0.99, 8.0), (ALPHA_CAP, 8.0),
                   (0.99, 50.0)):
    s = solve_fixed_point(ell, FrictionParams.from_r_f(r_f, alpha=alpha)).profile
    near = np.abs((grid.points - med + 0.5) % 1.0 - 0.5) <= 0.05
    mass = quadrature(np.where(near, s.shares, 0.0))
    peak = float(grid.points[int(np.argmax(s.shares))])
    print(f"{alpha:6.3f} {r_f:5.1f} {mass:28.4f} {peak:7.3f}")

print("\nOnce concentration takes hold the peak sits at the median, away "
      "from the mode.  The last row shows the threshold at work: at "
      "alpha = 0.99 concentration needs r_f < 49, so r_f = 50 yields a "
      "diffuse profile despite the near-proportional rates.")
