from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from uat_topo.enumeration import RationalPoly, nat_to_poly, poly_to_nat
from uat_topo.kst import (InnerProvider, KstNetwork, KstTerm, LocalLinear, PolySmoother,
                          backfit, big_psi, cube_inner_provider, eval_kst, fit_kst,
                          product_cube_sample, staircase, synthesize)
from uat_topo.neuron import eval_neuron
from uat_topo.superactivation import Mode, Superactivation

SIGMA = Superactivation()
TS = np.linspace(0.0, 1.0, 20001)


def oracle_ms(Q):
    polys = [RationalPoly((Fraction(k, 7) - Fraction(1, 3), Fraction((-1) ** k * (k + 1), 4)))
             for k in range(Q)]
    return [poly_to_nat(p) for p in polys]


# -- provider ---------------------------------------------------------------


def test_one_dim_provider_has_three_monotone_maps():
    prov = cube_inner_provider(1, 4)
    assert prov.terms == 3
    for q in range(3):
        v = prov.psi(0, q, TS[:, None])
        assert np.all(np.diff(v) >= 0)
        assert v.min() >= 0 and v.max() <= 1


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("r", [1, 2, 3, 4, 5, 6])
def test_refinement_consistency(d, r):
    coarse, fine = cube_inner_provider(d, r), cube_inner_provider(d, r + 1)
    x = np.repeat(TS[:, None], d, axis=1)
    for q in range(coarse.terms):
        gap = np.max(np.abs(coarse.psi(0, q, x) - fine.psi(0, q, x)))
        assert gap <= coarse.cell_width


@given(st.integers(1, 3), st.integers(1, 8))
def test_endpoints_in_unit_interval(d, r):
    prov = cube_inner_provider(d, r)
    for q in range(prov.terms):
        for end in (0.0, 1.0):
            v = prov.psi(0, q, np.full(d, end))
            assert 0.0 <= v <= 1.0


def test_maps_are_deterministic():
    a, b = cube_inner_provider((2, 1), 3), cube_inner_provider((2, 1), 3)
    x = np.random.default_rng(0).random((50, 2))
    for q in range(a.terms):
        assert np.array_equal(a.psi(0, q, x), b.psi(0, q, x))


def test_staircase_stays_near_identity():
    for cells in (2, 8, 32):
        for shift in (0.0, 0.3 / cells):
            v = staircase(TS, cells, shift, 0.2)
            assert np.max(np.abs(v - TS)) <= 0.5 / cells + 1e-12


def test_provider_rejects_bad_config():
    with pytest.raises(ValueError):
        cube_inner_provider(0, 3)
    with pytest.raises(ValueError):
        cube_inner_provider(2, 0)


# -- big_psi ----------------------------------------------------------------


def constant_provider(v0, v1):
    def psi(p, q, xp):
        val = v0 if p == 0 else v1
        xp = np.asarray(xp)
        return np.full(xp.shape[0], val) if xp.ndim > 1 else val
    return InnerProvider((1, 1), psi)


def test_big_psi_zero():
    assert big_psi(constant_provider(0.0, 0.0), 0, (np.zeros(1), np.zeros(1))) == 0.0


def test_big_psi_adds_factors():
    assert big_psi(constant_provider(0.25, 0.5), 3, (np.zeros(1), np.ones(1))) == 0.75


def test_big_psi_range_scan():
    prov = cube_inner_provider((2, 1), 5)
    rng = np.random.default_rng(1)
    pts = [(rng.random(2), rng.random(1)) for _ in range(10_000)]
    psi = prov.inner_sums(pts)
    assert psi.min() >= 0 and psi.max() <= prov.n
    for i in range(0, 10_000, 997):
        assert big_psi(prov, 2, pts[i]) == pytest.approx(psi[i, 2], abs=1e-15)


@pytest.mark.parametrize("q", [-1, 7, 100])
def test_big_psi_q_out_of_range(q):
    prov = cube_inner_provider((2, 1), 2)
    with pytest.raises(IndexError):
        big_psi(prov, q, (np.zeros(2), np.zeros(1)))


# -- smoothers and backfitting ---------------------------------------------


def test_local_linear_reproduces_lines():
    xs = np.linspace(0, 2, 40)
    ys = 3 * xs - 1
    s = LocalLinear(0.1).fit(xs, ys)
    assert np.allclose(s(np.array([0.05, 1.3, 1.97])), [-0.85, 2.9, 4.91])
    assert np.allclose(LocalLinear(0.1).operator(xs) @ ys, ys)


def test_operator_matches_fit():
    rng = np.random.default_rng(2)
    xs, ys = np.sort(rng.random(60)), rng.random(60)
    for sm in (LocalLinear(0.2), PolySmoother(3)):
        assert np.allclose(sm.operator(xs) @ ys, sm.fit(xs, ys)(xs))


def test_backfit_additive_model():
    rng = np.random.default_rng(3)
    psi = rng.random((200, 3))
    g = 1 + psi[:, 0] - 2 * psi[:, 2]
    res = backfit(psi, g, PolySmoother(1), 200, tol=1e-12)
    assert res.residual <= 1e-12
    assert sum(h(psi[:, q]) for q, h in enumerate(res.outers)) == pytest.approx(g, abs=1e-10)


def test_backfit_rejects_zero_sweeps():
    with pytest.raises(ValueError):
        backfit(np.zeros((3, 3)), np.zeros(3), PolySmoother(1), 0)


# -- fit_kst ----------------------------------------------------------------


@pytest.mark.parametrize("dims", [(1,), (2,), (1, 1)])
def test_constant_target(dims):
    c = 0.7
    prov = cube_inner_provider(dims, 3)
    sample = product_cube_sample(dims, lambda x: c)
    net, cert = fit_kst(sample, prov, SIGMA, 1e-10, sweeps=1)
    assert cert.passed and cert.max_abs_error < 1e-10
    psi = prov.inner_sums(sample.points)
    for q in range(prov.terms):
        alone = eval_neuron(net.params(q), net.sigma, psi[:, q])
        assert alone == pytest.approx(c / prov.terms, abs=1e-10)


@pytest.mark.parametrize("dims", [(2,), (1, 1)])
@pytest.mark.parametrize("smoother", ["local-linear", "poly"])
def test_oracle_round_trip(dims, smoother):
    prov = cube_inner_provider(dims, 3)
    oracle = synthesize(prov, oracle_ms(prov.terms), SIGMA)
    sample = product_cube_sample(dims, lambda x: 0.0, per_axis=15)
    sample.target_values = oracle.evaluate_psi(prov.inner_sums(sample.points))
    sm = None if smoother == "local-linear" else PolySmoother(1, 0, prov.n)
    net, cert = fit_kst(sample, prov, SIGMA, 1e-9, sweeps=5000, smoother=sm, tol=1e-11)
    assert cert.max_abs_error < 1e-8
    rng = np.random.default_rng(4)
    pts = [tuple(rng.random(d) for d in dims) for _ in range(100)]
    assert np.max(np.abs(eval_kst(net, pts) - eval_kst(oracle, pts))) < 1e-8


@pytest.mark.parametrize("dims", [(2,), (1, 1)])
def test_resolution_ladder(dims):
    sample = product_cube_sample(dims, lambda x: float(np.concatenate(x).sum() / 2))
    errs = [fit_kst(sample, cube_inner_provider(dims, r), SIGMA, 1e-2)[1].max_abs_error
            for r in (2, 3, 4)]
    assert all(b <= a + 1e-10 for a, b in zip(errs, errs[1:]))


def test_structure_and_unit_weights():
    dims = (2, 1)
    prov = cube_inner_provider(dims, 2)
    sample = product_cube_sample(dims, lambda x: float(np.sin(np.concatenate(x).sum())), per_axis=6)
    net, cert = fit_kst(sample, prov, SIGMA, 1e-2, sweeps=5)
    assert len(net.terms) == 2 * 3 + 1
    assert all(t.w == 1 for t in net.terms)
    assert net.sigma.alpha == prov.n
    assert len(cert.budget["term_errors"]) == 7
    assert cert.budget["term_budget"] == pytest.approx(1e-2 / 7)


def test_honest_failure_does_not_raise():
    dims = (1, 1)
    sample = product_cube_sample(dims, lambda x: float(x[0][0] * x[1][0]), per_axis=10)
    _, cert = fit_kst(sample, cube_inner_provider(dims, 1), SIGMA, 1e-6, sweeps=3)
    assert cert.passed is False


def test_fit_kst_rejects_bad_args():
    prov = cube_inner_provider(1, 2)
    sample = product_cube_sample((1,), lambda x: 0.0, per_axis=5)
    with pytest.raises(ValueError):
        fit_kst(sample, prov, SIGMA, 0.0)
    with pytest.raises(ValueError):
        fit_kst(sample, prov, SIGMA, 1e-2, sweeps=0)


# -- eval_kst ---------------------------------------------------------------


@pytest.mark.parametrize("mode", list(Mode))
def test_zero_inner_sums_give_constant_coefficients(mode):
    prov = constant_provider(0.0, 0.0)
    ms = [5, 14, 9228, 3, 4]
    net = synthesize(prov, ms, Superactivation(mode=mode))
    expected = sum(nat_to_poly(m).coeffs[0] if nat_to_poly(m).coeffs else 0 for m in ms)
    assert eval_kst(net, (np.zeros(1), np.zeros(1))) == pytest.approx(float(expected), abs=1e-12)


def test_terms_match_neurons():
    prov = cube_inner_provider((1, 1), 3)
    net = synthesize(prov, [9228, 6, 13, 4, 1])
    rng = np.random.default_rng(5)
    pts = [(rng.random(1), rng.random(1)) for _ in range(50)]
    psi = prov.inner_sums(pts)
    by_neuron = sum(eval_neuron(net.params(q), net.sigma, psi[:, q]) for q in range(5))
    assert eval_kst(net, pts) == pytest.approx(by_neuron, abs=1e-12)


def test_changing_one_term_changes_one_neuron():
    prov = cube_inner_provider((1, 1), 3)
    base = synthesize(prov, [6] * 5)
    other = synthesize(prov, [6, 6, 9228, 6, 6])
    rng = np.random.default_rng(6)
    pts = [(rng.random(1), rng.random(1)) for _ in range(50)]
    psi = prov.inner_sums(pts)[:, 2]
    diff = eval_kst(other, pts) - eval_kst(base, pts)
    expected = (eval_neuron(other.params(2), other.sigma, psi)
                - eval_neuron(base.params(2), base.sigma, psi))
    assert diff == pytest.approx(expected, abs=1e-12)


def test_network_requires_exact_term_count():
    prov = cube_inner_provider(2, 2)
    with pytest.raises(ValueError):
        KstNetwork([KstTerm(Fraction(1), Fraction(-1), 1)] * 4, prov, SIGMA)


def test_eval_single_point_returns_float():
    prov = cube_inner_provider(1, 2)
    net = synthesize(prov, [6, 6, 6])
    v = eval_kst(net, (np.array([0.5]),))
    assert isinstance(v, float)
    psi = prov.inner_sums([(np.array([0.5]),)])[0]
    assert v == pytest.approx(float(psi.sum()))
