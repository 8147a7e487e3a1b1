"""Inputs that are whole curves: learning (integral of x)^2 from quadrature features."""

import numpy as np

from uat_topo.lcs import (FunctionalFamilySpec, QuadratureFunctionals, approximate_lcs,
                          exp_family_probe, sine_curve_sample)
from uat_topo.tfnn import SpanGrid, get_activation

# 61 curves t -> sin(c t), c in [0, 3], each tabulated on 101 points.
sample = sine_curve_sample()
ramp = get_activation("ramp")

# The first functional is the integral itself, so one feature already does it.
spec = FunctionalFamilySpec(QuadratureFunctionals(101), 1)
net, residual = approximate_lcs(sample, spec, ramp, nodes=128)
print(f"128 ramp nodes on the integral: max residual {residual:.2e}")

# Adding functionals never hurts a best fit over nested dictionaries.
grid = SpanGrid((1.0, -1.0), 32)
for count in (1, 2, 4, 8):
    spec = FunctionalFamilySpec(QuadratureFunctionals(101), count)
    _, r = approximate_lcs(sample, spec, ramp, grid=grid, method="minimax")
    print(f"  {count} functionals: {r:.2e}")

# A different basis: exponentials of the functionals, least squares.
for cap in (1, 2, 4):
    probe = exp_family_probe(sample, FunctionalFamilySpec(QuadratureFunctionals(101), 2), cap)
    print(f"exp probe, degree cap {cap}: residual {probe.residual:.2e} ({probe.columns} columns)")
