"""Walk the first indices of the polynomial enumeration and back again."""

from fractions import Fraction

from uat_topo.enumeration import RationalPoly, elias_delta, nat_to_poly, poly_to_nat

# Every natural number names a polynomial with rational coefficients.
for n in range(16):
    print(f"{n:>3}  ->  {nat_to_poly(n)}")

# The map is onto but not one-to-one: 9 decodes to the same -1 as index 1,
# because its bits end in a truncated code.
print("\nnat_to_poly(1) == nat_to_poly(9):", nat_to_poly(1) == nat_to_poly(9))

# Going the other way always gives the canonical (smallest) index.
p = RationalPoly((Fraction(3), Fraction(1, 2)))  # 3 + t/2
m = poly_to_nat(p)
print(f"\n{p} has index {m}; decoding gives {nat_to_poly(m)}")

# Indices grow with the size of the coefficients, not just the degree.
for q in [RationalPoly((Fraction(1, k),)) for k in (1, 10, 100, 1000)]:
    print(f"{str(q):>10}: {poly_to_nat(q).bit_length():>3} bits")

# The building block: Elias delta codes of small numbers.
print("\ndelta codes:", {v: elias_delta(v) for v in range(1, 6)})
