"""Kolmogorov-style networks: exact recovery, then a resolution ladder."""

from fractions import Fraction

import numpy as np

from uat_topo.enumeration import RationalPoly, poly_to_nat
from uat_topo.kst import cube_inner_provider, eval_kst, fit_kst, product_cube_sample, synthesize
from uat_topo.superactivation import Superactivation

sigma = Superactivation()
dims = (1, 1)  # the unit square as a product of two intervals
prov = cube_inner_provider(dims, 3)
print(f"{prov.terms} terms for M = {prov.M}")

# Build a network from known outer polynomials, sample it, and fit it back.
ms = [poly_to_nat(RationalPoly((Fraction(k, 5), Fraction(1, k + 2)))) for k in range(prov.terms)]
oracle = synthesize(prov, ms, sigma)
sample = product_cube_sample(dims, lambda x: 0.0, per_axis=15)
sample.target_values = oracle.evaluate_psi(prov.inner_sums(sample.points))
net, cert = fit_kst(sample, prov, sigma, 1e-9, sweeps=5000, tol=1e-11)
print(f"oracle recovery: error {cert.max_abs_error:.1e}, weights {sorted({t.w for t in net.terms})}")

rng = np.random.default_rng(0)
pts = [(rng.random(1), rng.random(1)) for _ in range(5)]
print("fresh points:", np.round(eval_kst(net, pts) - eval_kst(oracle, pts), 12))

# A target outside the model class: the error shrinks as the inner maps refine.
sample = product_cube_sample(dims, lambda x: float(np.concatenate(x).sum() / 2))
for r in (2, 3, 4, 5):
    _, cert = fit_kst(sample, cube_inner_provider(dims, r), sigma, 1e-2)
    print(f"resolution {r}: error {cert.max_abs_error:.3f}, passed {cert.passed}")
