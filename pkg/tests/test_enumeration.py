import json
import random
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from uat_topo.cli import GOLDEN_ENTRIES, golden_files
from uat_topo.enumeration import (RationalPoly, elias_delta, nat_to_poly, nat_to_rational, pair,
                                  poly_to_nat, rational_to_nat, unpair)

GOLDEN_DIR = Path(__file__).resolve().parents[1] / "docs" / "golden"

nat = st.integers(min_value=0, max_value=10**30)
rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q.numerator) < 10**9)


def test_pair_examples():
    assert pair(0, 0) == 0
    assert pair(1, 0) == 1
    assert pair(3, 4) == (3 + 4) * (3 + 4 + 1) // 2 + 4 == 32


def test_unpair_examples():
    assert unpair(0) == (0, 0)
    assert unpair(32) == (3, 4)
    assert pair(*unpair(32)) == 32
    assert unpair(1) == (1, 0)


def test_pair_rejects_negatives():
    with pytest.raises(ValueError):
        pair(-1, 0)
    with pytest.raises(ValueError):
        unpair(-3)


@given(nat, nat)
def test_unpair_inverts_pair(a, b):
    assert unpair(pair(a, b)) == (a, b)


@given(nat, nat)
def test_pair_strictly_monotone(a, b):
    assert pair(a + 1, b) > pair(a, b)
    assert pair(a, b + 1) > pair(a, b)


def test_pair_unpair_first_ten_thousand():
    assert all(pair(*unpair(n)) == n for n in range(10_001))


def test_triangular_root_oracle():
    # walk the Cantor diagonals directly
    n = 0
    for s in range(60):
        for b in range(s + 1):
            assert unpair(n) == (s - b, b)
            n += 1


def test_rational_examples():
    assert nat_to_rational(0) == 0
    assert rational_to_nat(F(0)) == 0
    half = rational_to_nat(F(1, 2))
    assert half == 1 + 2 * pair(0, 1) == 5
    assert nat_to_rational(half) == F(1, 2)
    code = rational_to_nat(F(-3, 5))
    assert code == 1 + 2 * pair(2, 4) + 1 == 52
    assert nat_to_rational(code) == F(-3, 5)


def test_noncanonical_code_reduces():
    code = 1 + 2 * pair(2 - 1, 4 - 1)  # numerator 2, denominator 4
    assert nat_to_rational(code) == F(1, 2)
    assert rational_to_nat(F(1, 2)) != code


@given(rationals)
def test_rational_round_trip(q):
    assert nat_to_rational(rational_to_nat(q)) == q


@given(st.integers(min_value=0, max_value=10**40))
def test_nat_to_rational_total(n):
    q = nat_to_rational(n)
    assert q.denominator >= 1


def test_elias_delta_table():
    # standard table of the delta code
    assert [elias_delta(v) for v in (1, 2, 3, 4, 9, 17)] == [
        "1", "0100", "0101", "01100", "00100001", "001010001"]


def test_poly_examples():
    assert nat_to_poly(0).is_zero()
    assert poly_to_nat(RationalPoly()) == 0
    p = RationalPoly((F(3), F(1, 2)))
    assert nat_to_poly(poly_to_nat(p)) == p
    one = RationalPoly((F(1),))
    assert poly_to_nat(one) == 2
    assert nat_to_poly(2) == one
    sq = RationalPoly((0, 0, 1))
    assert nat_to_poly(poly_to_nat(sq)) == sq


def test_documented_golden_values():
    assert nat_to_poly(1) == RationalPoly((-1,))
    assert nat_to_poly(5) == RationalPoly((0, -1))
    assert nat_to_poly(6) == RationalPoly((0, 1))
    assert nat_to_poly(3) == RationalPoly((-2,))
    assert nat_to_poly(4) == RationalPoly((F(1, 2),))
    assert nat_to_poly(7) == RationalPoly((-3,))
    assert nat_to_poly(9) == nat_to_poly(1)
    assert nat_to_poly(13) == RationalPoly((0, 0, -1))
    assert nat_to_poly(14) == RationalPoly((0, 0, 1))
    assert poly_to_nat(RationalPoly((3, F(1, 2)))) == 9228


def test_canonical_form_strips_trailing_zeros():
    assert RationalPoly((1, 0, 0)).coeffs == (F(1),)
    assert RationalPoly((0, 0)).is_zero()
    assert RationalPoly((0,)).degree == -1


def test_exact_evaluation():
    p = RationalPoly((F(1, 3), F(-2), F(5, 7)))
    t = F(3, 11)
    assert p(t) == F(1, 3) - 2 * t + F(5, 7) * t * t


@given(st.lists(rationals, min_size=0, max_size=8))
def test_poly_round_trip(coeffs):
    p = RationalPoly(tuple(coeffs))
    assert nat_to_poly(poly_to_nat(p)) == p


@given(st.integers(min_value=0, max_value=2**256))
def test_decoding_total_and_canonical(n):
    p = nat_to_poly(n)
    assert not p.coeffs or p.coeffs[-1] != 0
    assert nat_to_poly(poly_to_nat(p)) == p


@pytest.mark.parametrize("n", [2**256, 2**256 - 1, 2**4096, 2**4095 + 1])
def test_decoding_fast_on_sparse_indices(n):
    # truncated trailing codes must not expand into huge padded values
    p = nat_to_poly(n)
    assert poly_to_nat(p).bit_length() <= 2 * n.bit_length() + 64


def test_random_round_trips_seeded():
    rng = random.Random(20240101)
    for _ in range(1000):
        deg = rng.randint(0, 4)
        cs = [F(rng.randint(-50, 50), rng.randint(1, 50)) for _ in range(deg + 1)]
        p = RationalPoly(tuple(cs))
        assert nat_to_poly(poly_to_nat(p)) == p


def test_index_growth_bound():
    p = RationalPoly(tuple(F((-1) ** k * (10**6 - k), 10**6 - 7 * k) for k in range(9)))
    assert p.degree == 8
    assert poly_to_nat(p).bit_length() <= 10**5


@given(st.lists(rationals, min_size=1, max_size=6), st.floats(0, 1))
def test_float_evaluation_matches_exact(coeffs, t):
    p = RationalPoly(tuple(coeffs))
    exact = float(p(F(t)))
    scale = 1 + sum(abs(float(c)) for c in p.coeffs)
    assert abs(p.evaluate(t) - exact) <= 1e-12 * scale


@given(st.lists(rationals, min_size=1, max_size=7))
def test_chebyshev_conversion_round_trip(coeffs):
    from uat_topo.enumeration import _monomial_to_shifted_chebyshev

    p = RationalPoly(tuple(coeffs))
    if p.is_zero():
        return
    num, den = _monomial_to_shifted_chebyshev(p.coeffs)
    assert RationalPoly.from_shifted_chebyshev([F(a, den) for a in num]) == p


def test_json_round_trip():
    p = RationalPoly((F(-3, 5), 0, F(7)))
    assert RationalPoly.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_golden_file_is_current():
    files = golden_files()
    on_disk = (GOLDEN_DIR / "enumeration.json").read_text(encoding="utf-8")
    assert on_disk == files["enumeration.json"]
    entries = json.loads(on_disk)["entries"]
    assert len(entries) == GOLDEN_ENTRIES == 64
    assert entries[0] == {"index": 0, "coefficients": []}
    for e in entries:
        assert RationalPoly.from_json(e["coefficients"]) == nat_to_poly(e["index"])
