"""One hidden neuron approximating familiar functions to a chosen accuracy."""

from fractions import Fraction

import numpy as np

from uat_topo.serialization import int_to_str
from uat_topo.neuron import TargetFn1D, builtin_targets, eval_neuron, neuron_lookup
from uat_topo.superactivation import Superactivation

sigma = Superactivation()
fns = builtin_targets()

print(f"{'target':>8} {'eps':>7} {'error':>9} {'m bits':>7} {'theta digits':>13}")
for name in ("sin", "exp", "abs", "runge"):
    for eps in (1e-1, 1e-2, 1e-3):
        params, cert = neuron_lookup(TargetFn1D(fns[name], 0, 1, name), eps, sigma, max_degree=1024)
        digits = len(int_to_str(abs(params.theta.numerator)))  # may exceed str()'s digit cap
        print(f"{name:>8} {eps:>7g} {cert.max_abs_error:>9.2e} {params.m.bit_length():>7} {digits:>13}")

# The same recipe works on any interval; only w and theta change.
target = TargetFn1D(np.cos, Fraction(-2), Fraction(3), "cos")
params, cert = neuron_lookup(target, 1e-2, sigma, max_degree=1024)
print(f"\ncos on [-2, 3]: w = {params.w}, error {cert.max_abs_error:.2e}")
xs = np.array([-2.0, 0.0, 3.0])
print("cos(x)    :", np.round(np.cos(xs), 4))
print("neuron(x) :", np.round(eval_neuron(params, sigma, xs), 4))
