"""Constructive universal approximation on general input spaces.

Single-neuron approximation with an explicit superactivation, shallow
networks over basic families of features, and Kolmogorov-style networks.
"""

from .enumeration import (RationalPoly, nat_to_poly, nat_to_rational, pair, poly_to_nat,
                          rational_to_nat, unpair)
from .superactivation import Mode, Superactivation, sigma_self_check
from .neuron import (CertificationFailed, DegreeExhausted, ErrorCertificate, NeuronParams,
                     TargetFn1D, eval_neuron, neuron_lookup)
from .tfnn import (BasicFamily, CompactSample, Decomposition, DecompositionTerm, ShallowNetwork,
                   assemble_network, eval_network, feature_hull, fit_span, sup_error,
                   verify_decomposition)
from .lcs import FunctionalFamilySpec, approximate_lcs, exp_family_probe, make_functionals
from .kst import InnerProvider, KstNetwork, big_psi, cube_inner_provider, eval_kst, fit_kst

__version__ = "0.1.0"
