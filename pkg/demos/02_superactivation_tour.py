"""A tour of the glued activation: segments, gaps, and the constant tail."""

from fractions import Fraction

import numpy as np

from uat_topo.enumeration import nat_to_poly
from uat_topo.superactivation import Mode, Superactivation, sigma_self_check

sigma = Superactivation(mode=Mode.LITERAL)

# Segment m occupies [2m - 1, 2m] (alpha = 1) and carries polynomial m exactly.
for m in (1, 5, 6, 14):
    t = Fraction(2 * m - 1) + Fraction(1, 3)
    print(f"sigma({t}) = {sigma.at(t)}   p_{m}(1/3) = {nat_to_poly(m)(Fraction(1, 3))}")

# Left of the first segment the function is constant.
print("\ntail:", [sigma.at(Fraction(t)) for t in (-5, 0, 1)])

# The three modes agree at segment ends but join them differently.
ts = np.linspace(10.0, 11.0, 6)  # the gap between segments 5 and 6
for mode in Mode:
    vals = Superactivation(mode=mode)(ts)
    print(f"{mode.value:>8}:", np.round(vals, 4))

# Numerical self check at the junctions.  Only the smooth mode is flat there;
# literal has corners and blend joins with nonzero slope.
for mode in Mode:
    rep = sigma_self_check(Superactivation(mode=mode), 30, 11)
    print(f"{mode.value:>8}: value gap {rep['max_value_gap']:.1e}, "
          f"flatness {rep['max_flatness_ratio']:.1e}")

# Huge arguments stay exact: sigma(w x - theta) is evaluated from the
# segment coordinate, never from a float near 10^40.
m = 10**20
theta = Fraction(-(2 * m - 1))
print("\nfar segment:", Superactivation().eval_affine(Fraction(1), theta, np.array([0.0, 0.5])))
