"""Lossless JSON helpers: exact rationals as "p/q", huge integers as decimal."""

from __future__ import annotations

import json
import sys
from fractions import Fraction
from typing import Any

try:  # conversion of million-bit integers to decimal is quadratic in CPython
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

__all__ = ["int_to_str", "fraction_to_str", "fraction_from_str", "to_jsonable", "dumps"]


def int_to_str(n: int) -> str:
    if gmpy2 is not None:
        return gmpy2.mpz(n).digits(10)
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    return str(n)


def fraction_to_str(q) -> str:
    q = Fraction(q)
    return f"{int_to_str(q.numerator)}/{int_to_str(q.denominator)}"


def fraction_from_str(s: str) -> Fraction:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    if gmpy2 is not None and len(s) > 4000:
        num, _, den = s.partition("/")
        return Fraction(int(gmpy2.mpz(num)), int(gmpy2.mpz(den or "1")))
    return Fraction(s)


def to_jsonable(obj: Any) -> Any:
    """Recursively convert exact numbers, numpy scalars and dataclass-likes."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        # ints beyond double precision would lose digits in most JSON readers
        return obj if abs(obj) < 2 ** 53 else int_to_str(obj)
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):
        return to_jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_jsonable(obj.tolist())
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if hasattr(obj, "value"):  # enums
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, allow_nan=True) + "\n"
