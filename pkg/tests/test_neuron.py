import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import Chebyshev

from uat_topo.enumeration import RationalPoly, nat_to_poly, poly_to_nat
from uat_topo.neuron import (CertificationFailed, DegreeExhausted, ErrorCertificate, NeuronParams,
                             TargetFn1D, chebyshev_fit, convergents, eval_neuron, neuron_lookup,
                             neuron_params, rationalize_poly)
from uat_topo.superactivation import Mode, Superactivation

LIT = Superactivation(F(1), Mode.LITERAL)
BLEND = Superactivation()


def test_fit_constant():
    fit = chebyshev_fit(TargetFn1D(lambda t: 0.75 + 0 * t, 0, 1), 1e-9)
    assert fit.degree == 0
    assert fit.grid_error == 0.0
    assert fit.poly.coef[0] == 0.75


def test_fit_identity():
    fit = chebyshev_fit(TargetFn1D(lambda t: t, 0, 1), 1e-6)
    assert fit.degree == 1
    assert fit.grid_error <= 1e-15


def test_fit_sin_dense_oracle():
    fit = chebyshev_fit(TargetFn1D(np.sin, 0, 1), 1e-3)
    assert fit.degree <= 7
    xs = np.linspace(0, 1, 100_001)
    assert np.max(np.abs(fit.poly(xs) - np.sin(xs))) < 5e-4


def test_fit_lowest_degree_wins():
    fit = chebyshev_fit(TargetFn1D(np.exp, 0, 1), 1e-6)
    lower = Chebyshev.interpolate(np.exp, fit.degree - 1, domain=[0, 1])
    grid = np.linspace(0, 1, 10 * fit.degree)
    assert np.max(np.abs(lower(grid) - np.exp(grid))) >= 5e-7


def test_fit_degree_exhausted():
    with pytest.raises(DegreeExhausted):
        chebyshev_fit(TargetFn1D(lambda t: np.abs(t - 0.5), 0, 1), 1e-6, max_degree=16)


def test_fit_rejects_bad_eps():
    with pytest.raises(ValueError):
        chebyshev_fit(TargetFn1D(np.sin, 0, 1), 0.0)


def test_target_needs_ordered_interval():
    with pytest.raises(ValueError):
        TargetFn1D(np.sin, 1, 1)


def test_rationalize_exact_passthrough():
    p = RationalPoly((F(1, 3), F(-7, 2), F(5)))
    assert rationalize_poly(p, 1e-1) == p
    assert rationalize_poly([F(1, 3), 2], 1e-9) == RationalPoly((F(1, 3), F(2)))


def test_rationalize_third():
    q = rationalize_poly([0.333333333], 1 * 1e-6)
    assert q == RationalPoly((F(1, 3),))


def test_rationalize_pi_like():
    q = rationalize_poly([math.pi, math.e], 2 * 1e-2)
    assert abs(float(q.coeffs[0]) - math.pi) < 1e-2
    assert abs(float(q.coeffs[1]) - math.e) < 1e-2
    assert q.coeffs[0] == F(22, 7)


@given(st.lists(st.floats(-100, 100), min_size=1, max_size=8), st.floats(1e-9, 1.0))
def test_rationalize_sup_bound(coeffs, budget):
    q = rationalize_poly(coeffs, budget)
    ts = np.linspace(0, 1, 257)
    base = np.polynomial.polynomial.polyval(ts, coeffs)
    assert np.max(np.abs(q.evaluate(ts) - base)) <= budget * (1 + 1e-9) + 1e-12 * (1 + np.abs(base).max())


@given(st.fractions(max_denominator=10**6))
def test_convergents_end_at_value(x):
    cs = list(convergents(x))
    assert cs[-1] == x
    for c in cs:
        assert abs(x - c) <= F(1, c.denominator ** 2)


def test_first_convergent_within_tolerance_wins():
    x = F(314159, 100000)
    cs = list(convergents(x))
    # 3.14159 = [3; 7, 15, 1, ...]
    assert cs[:4] == [F(3), F(22, 7), F(333, 106), F(355, 113)]
    assert rationalize_poly([float(x)], 2e-3) == RationalPoly((F(22, 7),))


def test_lookup_constant_exact():
    params, cert = neuron_lookup(TargetFn1D(lambda t: 0.25 + 0 * t, 0, 1), 1e-3, LIT)
    assert nat_to_poly(params.m) == RationalPoly((F(1, 4),))
    assert cert.max_abs_error == 0.0
    assert cert.passed


def test_lookup_weight_on_shifted_interval():
    params, cert = neuron_lookup(TargetFn1D(np.sin, 2, 5), 1e-2, BLEND)
    assert params.w == F(1, 3)
    assert params.theta == F(2, 3) - (2 * params.m - 1)
    assert cert.passed


@pytest.mark.parametrize("sigma", [LIT, BLEND])
def test_lookup_sin(sigma):
    params, cert = neuron_lookup(TargetFn1D(np.sin, 0, 1), 1e-2, sigma)
    assert cert.grid_size == 10_000
    assert cert.max_abs_error < 1e-2
    assert cert.passed and cert.budget_ok
    xs = np.linspace(0, 1, 10_000)
    assert np.max(np.abs(eval_neuron(params, sigma, xs) - np.sin(xs))) == cert.max_abs_error


@pytest.mark.parametrize("alpha", [F(1), F(5, 2)])
def test_parameter_identities(alpha):
    sigma = Superactivation(alpha)
    target = TargetFn1D(np.exp, F(-1, 2), F(3, 4))
    p, _ = neuron_lookup(target, 1e-3, sigma)
    assert p.w * (p.b - p.a) == alpha
    assert p.theta - alpha * p.a / (p.b - p.a) == -(2 * p.m - 1) * alpha


def test_lookup_smooth_mode_constant_and_coarse():
    sigma = Superactivation(F(1), Mode.SMOOTH)
    p, cert = neuron_lookup(TargetFn1D(lambda t: -2.0 + 0 * t, 0, 1), 1e-3, sigma)
    assert cert.max_abs_error == 0.0
    p, cert = neuron_lookup(TargetFn1D(np.sin, 0, 1), 0.5, sigma, max_degree=256)
    assert cert.passed


def test_eval_neuron_endpoints():
    params, _ = neuron_lookup(TargetFn1D(np.cos, 0, 2), 1e-2, LIT)
    p = nat_to_poly(params.m)
    assert eval_neuron(params, LIT, F(0)) == p(0)
    assert eval_neuron(params, LIT, F(2)) == p(1)
    with pytest.raises(ValueError):
        eval_neuron(params, LIT, F(3))
    with pytest.raises(ValueError):
        eval_neuron(params, LIT, np.array([0.5, 2.5]))


def test_dual_path_consistency():
    # small index: t -> t on [1, 3] is p_6 = t, fitted exactly
    rng = np.random.default_rng(3)
    target = TargetFn1D(lambda x: (x - 1) / 2, 1, 3)
    for sigma in (LIT, BLEND, Superactivation(F(3, 2), Mode.LITERAL)):
        params, cert = neuron_lookup(target, 1e-6, sigma)
        assert params.m == 6 and cert.max_abs_error < 1e-15
        for x in rng.uniform(1, 3, 100):
            xf = F(x)
            seg = eval_neuron(params, sigma, xf)
            glob = sigma.at(params.w * xf - params.theta)
            assert abs(float(seg) - float(glob)) < 1e-12


def test_certificate_pass_flag():
    assert ErrorCertificate(10, 0.1, 0.2).passed
    assert not ErrorCertificate(10, 0.2, 0.2).passed


def test_neuron_params_formula():
    p = neuron_params(5, F(1), F(4), Superactivation(F(2)))
    assert p == NeuronParams(5, F(2, 3), F(2, 3) - 9 * 2, Mode.BLEND, F(1), F(4), F(2))


def test_high_degree_params_are_exact():
    # |t - 1/2| at 1e-3 needs a few hundred coefficients; m is a huge integer
    params, cert = neuron_lookup(TargetFn1D(lambda t: np.abs(t - 0.5), 0, 1), 1e-3, BLEND,
                                 max_degree=1024)
    assert cert.passed
    assert params.m.bit_length() > 10_000
    assert params.theta == -(2 * params.m - 1)
    assert poly_to_nat(nat_to_poly(params.m)) == params.m


@pytest.mark.parametrize("mode", list(Mode))
def test_zero_target_avoids_index_zero(mode):
    sigma = Superactivation(mode=mode)
    target = TargetFn1D(lambda t: np.zeros_like(np.asarray(t, dtype=float)), 0, 1, "zero")
    params, cert = neuron_lookup(target, 0.1, sigma)
    assert params.m >= 1 and cert.passed
    xs = np.linspace(0, 1, 101)
    # evaluate through the global argument, not the segment shortcut
    direct = sigma.eval_affine(params.w, params.theta, xs)
    assert np.max(np.abs(direct)) < 0.1
