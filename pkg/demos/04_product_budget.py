"""xy from two ridge features, with the error budget split term by term."""

import numpy as np

from uat_topo.superactivation import Superactivation
from uat_topo.tfnn import CompactSample, assemble_network, eval_network, product_ridge_demo

# xy = ((x + y)^2 - (x - y)^2) / 4 holds exactly, so the decomposition
# spends none of its half of the budget.
sample, family, dec = product_ridge_demo(21)
eps = 1e-2
net, cert = assemble_network(sample, family, dec, eps, Superactivation(), max_degree=1024)

b = cert.budget
print("decomposition share:", b["decomposition"], " measured slack:", b["measured_slack"])
for feature, share, err in zip(family.names(), b["terms"], b["term_errors"]):
    print(f"  term on {feature}: share {share}, neuron error {err:.2e}")
print(f"assembled error {cert.max_abs_error:.2e} < {eps}: {cert.passed}")

# Evaluate the two-neuron network on a few fresh points.
pts = [(0.1, 0.9), (0.5, 0.5), (0.33, 0.77)]
fresh = CompactSample(pts, np.array([x * y for x, y in pts]))
print("network:", np.round(eval_network(net, fresh, family), 6))
print("x * y  :", [round(x * y, 6) for x, y in pts])
