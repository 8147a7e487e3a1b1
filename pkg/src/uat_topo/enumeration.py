"""Deterministic enumeration of polynomials with rational coefficients.

The code layout is pinned in ``docs/enumeration.md``.  In short:

* a nonzero rational ``±p/q`` (reduced, ``q >= 1``) has canonical code
  ``1 + 2*pair(|p| - 1, q - 1) + sign`` and ``0`` is code ``0``;
* a nonzero polynomial ``c_0 + c_1 t + ... + c_d t^d`` is written as the
  bit string ``delta(code(c_0) + 1) ... delta(code(c_{d-1}) + 1) delta(code(c_d))``
  where ``delta`` is the Elias delta code; the index is that bit string read
  as a binary number behind a leading ``1`` marker, minus one;
* index ``0`` is the zero polynomial.

Decoding is total: every natural number decodes to a canonical polynomial
(a trailing code cut off by the end of the bits is read as the number ``1``
followed by the leftover bits).
Encoding is a left inverse of decoding, not a bijection.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C

__all__ = [
    "RationalPoly",
    "pair",
    "unpair",
    "nat_to_rational",
    "rational_to_nat",
    "nat_to_poly",
    "poly_to_nat",
    "elias_delta",
]


def pair(a: int, b: int) -> int:
    """Cantor pairing of two naturals."""
    if a < 0 or b < 0:
        raise ValueError("pair() takes naturals")
    s = a + b
    return s * (s + 1) // 2 + b


def unpair(n: int) -> tuple[int, int]:
    """Inverse of :func:`pair`."""
    if n < 0:
        raise ValueError("unpair() takes a natural")
    s = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - s * (s + 1) // 2
    return s - b, b


def nat_to_rational(n: int) -> Fraction:
    """Decode a natural into a rational; total and onto Q."""
    if n < 0:
        raise ValueError("codes are naturals")
    if n == 0:
        return Fraction(0)
    k = n - 1
    sign, j = k & 1, k >> 1
    a, b = unpair(j)
    # Fraction reduces non-canonical pairs such as 2/4.
    value = Fraction(a + 1, b + 1)
    return -value if sign else value


def rational_to_nat(q) -> int:
    """Canonical code of a rational, a left inverse of :func:`nat_to_rational`."""
    q = Fraction(q)
    if q == 0:
        return 0
    sign = 1 if q < 0 else 0
    return 1 + 2 * pair(abs(q.numerator) - 1, q.denominator - 1) + sign


# -- Elias delta over bit strings ------------------------------------------


def elias_delta(v: int) -> str:
    """Elias delta code of ``v >= 1`` as a '0'/'1' string."""
    if v < 1:
        raise ValueError("Elias delta encodes positive integers")
    length = v.bit_length()
    lbits = length.bit_length()
    return "0" * (lbits - 1) + bin(length)[2:] + bin(v)[3:]


def _parse_delta(bits: str, pos: int) -> tuple[int, int]:
    """Read one delta code starting at ``pos``.

    A code cut off by the end of the string is read as ``'1'`` followed by
    the remaining bits.  This keeps decoding total and linear in the input
    size; zero-padding instead could demand exponentially long codes.
    """
    n = len(bits)
    start = pos
    zeros = 0
    while pos < n and bits[pos] == "0":
        zeros += 1
        pos += 1
    if pos + zeros + 1 <= n:
        length = int(bits[pos:pos + zeros + 1], 2)
        body_start = pos + zeros + 1
        if body_start + length - 1 <= n:
            return int("1" + bits[body_start:body_start + length - 1], 2), body_start + length - 1
    return int("1" + bits[start:], 2), n


# -- polynomials --------------------------------------------------------------


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficient {c!r} is not an exact rational")


@dataclass(frozen=True)
class RationalPoly:
    """Polynomial with exact rational coefficients, constant term first.

    Trailing zero coefficients are stripped on construction, so the zero
    polynomial has an empty coefficient tuple.
    """

    coeffs: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        cs = [_as_fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, t):
        """Exact Horner evaluation at an int or Fraction."""
        t = _as_fraction(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        a = a + (Fraction(0),) * (n - len(a))
        b = b + (Fraction(0),) * (n - len(b))
        return RationalPoly(tuple(x + y for x, y in zip(a, b)))

    def __repr__(self):
        if not self.coeffs:
            return "RationalPoly(0)"
        return "RationalPoly(" + ", ".join(str(c) for c in self.coeffs) + ")"

    # Float evaluation goes through an exact change to the shifted Chebyshev
    # basis on [0, 1].  The monomial form of a high-degree fit has enormous,
    # alternating coefficients and cannot be summed in floating point.
    @functools.cached_property
    def chebyshev_float(self) -> np.ndarray:
        if not self.coeffs:
            return np.zeros(1)
        num, den = _monomial_to_shifted_chebyshev(self.coeffs)
        return np.array([_ratio_to_float(a, den) for a in num])

    def evaluate(self, t) -> np.ndarray | float:
        """Floating-point evaluation at real ``t`` (scalar or array)."""
        t_arr = np.asarray(t, dtype=float)
        out = C.chebval(2.0 * t_arr - 1.0, self.chebyshev_float)
        return float(out) if np.ndim(out) == 0 else out

    def max_abs_on_unit(self, points: int = 101) -> float:
        return float(np.max(np.abs(self.evaluate(np.linspace(0.0, 1.0, points)))))

    @classmethod
    def from_shifted_chebyshev(cls, coeffs: Sequence) -> "RationalPoly":
        """Exact conversion from a shifted-Chebyshev series on [0, 1]."""
        fr = [_as_fraction(c) if not isinstance(c, float) else Fraction(c) for c in coeffs]
        return cls(_shifted_chebyshev_to_monomial(fr))

    def to_json(self) -> list[str]:
        return [f"{c.numerator}/{c.denominator}" for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Iterable[str]) -> "RationalPoly":
        return cls(tuple(Fraction(s) for s in data))


def _ratio_to_float(num: int, den: int) -> float:
    try:
        return num / den  # correctly rounded for Python ints
    except OverflowError:
        return math.copysign(math.inf, num)


def _lcm_denominators(fracs: Sequence[Fraction]) -> int:
    d = 1
    for f in fracs:
        d = d * f.denominator // math.gcd(d, f.denominator)
    return d


def _monomial_to_shifted_chebyshev(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    """Integer numerators ``A`` and common denominator ``D`` with
    ``p(t) = sum_j A[j]/D * T_j(2t - 1)``.

    Horner's scheme in the Chebyshev basis with ``t = (1 + x)/2``; every
    step is kept integral by carrying a power-of-four denominator.
    """
    den = _lcm_denominators(coeffs)
    ints = [c.numerator * (den // c.denominator) for c in coeffs]
    d = len(ints) - 1
    acc = [ints[d]]
    for k in range(d - 1, -1, -1):
        n = len(acc)
        new = [2 * a for a in acc] + [0]
        # 2 x T_j = T_{j+1} + T_{j-1} (j >= 1), 2 x T_0 = 2 T_1
        new[1] += 2 * acc[0]
        for j in range(1, n):
            aj = acc[j]
            new[j + 1] += aj
            new[j - 1] += aj
        scale = 4 ** (d - k)
        new[0] += ints[k] * scale
        acc = new
    return acc, den * 4 ** d


def _shifted_chebyshev_to_monomial(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Clenshaw recurrence carried out on integer monomial polynomials."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if not coeffs:
        return []
    den = _lcm_denominators(coeffs)
    a = [c.numerator * (den // c.denominator) for c in coeffs]

    def times_y(p: list[int]) -> list[int]:
        # multiply by y = 2t - 1
        out = [0] * (len(p) + 1)
        for i, v in enumerate(p):
            out[i + 1] += 2 * v
            out[i] -= v
        return out

    def add(p: list[int], q: list[int], sq: int = 1) -> list[int]:
        n = max(len(p), len(q))
        return [(p[i] if i < len(p) else 0) + sq * (q[i] if i < len(q) else 0) for i in range(n)]

    b1: list[int] = []
    b2: list[int] = []
    for j in range(len(a) - 1, 0, -1):
        b0 = add(add([a[j]], [2 * v for v in times_y(b1)]), b2, -1)
        b1, b2 = b0, b1
    res = add(add([a[0]], times_y(b1)), b2, -1)
    return [Fraction(v, den) for v in res]


# -- the enumeration ---------------------------------------------------------


def poly_to_nat(p: RationalPoly) -> int:
    """Canonical index of ``p``; ``nat_to_poly(poly_to_nat(p)) == p``."""
    if p.is_zero():
        return 0
    *lower, lead = p.coeffs
    chunks = [elias_delta(rational_to_nat(c) + 1) for c in lower]
    chunks.append(elias_delta(rational_to_nat(lead)))
    return int("1" + "".join(chunks), 2) - 1


@functools.lru_cache(maxsize=4096)
def nat_to_poly(n: int) -> RationalPoly:
    """Decode index ``n`` into a canonical polynomial (total, deterministic)."""
    if n < 0:
        raise ValueError("indices are naturals")
    if n == 0:
        return RationalPoly()
    bits = bin(n + 1)[3:]
    values = []
    pos = 0
    while True:
        v, pos = _parse_delta(bits, pos)
        values.append(v)
        if pos >= len(bits):
            break
    coeffs = [nat_to_rational(v - 1) for v in values[:-1]]
    coeffs.append(nat_to_rational(values[-1]))  # v >= 1, hence nonzero
    return RationalPoly(tuple(coeffs))
