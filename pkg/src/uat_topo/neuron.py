"""Single-neuron approximation with the superactivation.

Given ``u`` continuous on ``[a, b]`` and a tolerance, find exact parameters
with ``|u(x) - sigma(w x - theta)| < eps`` on a dense grid.  The recipe:
rescale to ``[0, 1]``, interpolate at Chebyshev points with increasing degree,
round coefficients to continued-fraction convergents, look the resulting
rational polynomial up in the enumeration, and read off ``w`` and ``theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from .enumeration import RationalPoly, nat_to_poly, poly_to_nat
from .superactivation import Mode, Superactivation, flatten_h_inv

__all__ = [
    "TargetFn1D",
    "NeuronParams",
    "ErrorCertificate",
    "ChebyshevFit",
    "DegreeExhausted",
    "CertificationFailed",
    "chebyshev_fit",
    "convergents",
    "rationalize_poly",
    "neuron_lookup",
    "eval_neuron",
    "builtin_targets",
]

DEFAULT_MAX_DEGREE = 64
DEFAULT_GRID = 10_000


class DegreeExhausted(RuntimeError):
    """No interpolant up to the degree cap met the tolerance."""


class CertificationFailed(RuntimeError):
    """Dense-grid error did not come in under epsilon."""


def _vectorize(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def g(x):
        x = np.asarray(x, dtype=float)
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(float(v))) for v in x.ravel()]).reshape(x.shape)
    return g


@dataclass(frozen=True)
class TargetFn1D:
    """Continuous target on a closed interval with rational endpoints."""

    func: Callable
    a: Fraction
    b: Fraction
    label: str = "target"

    def __post_init__(self):
        a, b = Fraction(self.a), Fraction(self.b)
        if not a < b:
            raise ValueError("need a < b")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __call__(self, x):
        return _vectorize(self.func)(x)


@dataclass(frozen=True)
class NeuronParams:
    m: int
    w: Fraction
    theta: Fraction
    mode: Mode
    a: Fraction
    b: Fraction
    alpha: Fraction = Fraction(1)


@dataclass
class ErrorCertificate:
    grid_size: int
    max_abs_error: float
    epsilon: float
    passed: bool = field(init=False)
    fit_error: float | None = None
    rationalization_shift: float | None = None
    budget_ok: bool | None = None
    budget: dict | None = None

    def __post_init__(self):
        self.passed = bool(self.max_abs_error < self.epsilon)

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class ChebyshevFit:
    poly: Chebyshev
    degree: int
    grid_error: float


def chebyshev_fit(target: TargetFn1D, eps: float,
                  max_degree: int = DEFAULT_MAX_DEGREE) -> ChebyshevFit:
    """Lowest-degree Chebyshev interpolant with grid error below ``eps/2``.

    The grid for degree ``n`` has ``10 (n + 1)`` equispaced points.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a, b = float(target.a), float(target.b)
    f = _vectorize(target.func)
    for n in range(max_degree + 1):
        p = Chebyshev.interpolate(f, n, domain=[a, b])
        grid = np.linspace(a, b, 10 * (n + 1))
        err = float(np.max(np.abs(p(grid) - f(grid))))
        if err < eps / 2:
            return ChebyshevFit(p, n, err)
    raise DegreeExhausted(f"{target.label}: no degree <= {max_degree} reaches {eps / 2:g}")


def convergents(x) -> Iterator[Fraction]:
    """Continued-fraction convergents of an exact rational (or float)."""
    x = Fraction(x)
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    while True:
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        yield Fraction(h1, k1)
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def _round_to_convergent(c, tol: Fraction) -> Fraction:
    c = Fraction(c)
    for q in convergents(c):
        if abs(q - c) <= tol:
            return q
    return c  # unreachable: the last convergent is c itself


def _exact_monomial(p) -> tuple[list, bool]:
    """Exact monomial coefficients (on [0, 1]) and whether the input was exact."""
    if isinstance(p, RationalPoly):
        return list(p.coeffs), True
    if isinstance(p, Chebyshev):
        if not (np.allclose(p.domain, [0, 1]) and np.allclose(p.window, [-1, 1])):
            p = p.convert(domain=[0, 1])
        exact = RationalPoly.from_shifted_chebyshev([Fraction(float(c)) for c in p.coef])
        return list(exact.coeffs), False
    if isinstance(p, Polynomial):
        if not np.allclose(p.domain, p.window):
            p = p.convert(domain=p.window)
        p = p.coef
    coeffs = list(p)
    exact = all(isinstance(c, (int, Fraction)) for c in coeffs)
    return [Fraction(c) if exact else Fraction(float(c)) for c in coeffs], exact


def rationalize_poly(p, budget: float) -> RationalPoly:
    """Replace float coefficients by continued-fraction convergents.

    Each monomial coefficient moves by at most ``budget / (deg + 1)``, so the
    sup-norm change on ``[0, 1]`` is at most ``budget``.  Exact rational input
    passes through untouched.  Chebyshev input is first converted to monomial
    form exactly, since floats cannot hold those coefficients.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    coeffs, exact = _exact_monomial(p)
    if exact:
        return RationalPoly(tuple(coeffs))
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        return RationalPoly()
    tol = Fraction(budget) / len(coeffs)
    return RationalPoly(tuple(_round_to_convergent(c, tol) for c in coeffs))


def _shift(p, q: RationalPoly) -> float:
    src, _ = _exact_monomial(p)
    n = max(len(src), len(q.coeffs))
    src += [Fraction(0)] * (n - len(src))
    dst = list(q.coeffs) + [Fraction(0)] * (n - len(q.coeffs))
    return float(sum(abs(x - y) for x, y in zip(src, dst)))


def neuron_params(m: int, a, b, sigma: Superactivation) -> NeuronParams:
    a, b = Fraction(a), Fraction(b)
    alpha = sigma.alpha
    w = alpha / (b - a)
    theta = alpha * a / (b - a) - (2 * m - 1) * alpha
    return NeuronParams(m, w, theta, sigma.mode, a, b, alpha)


def eval_neuron(params: NeuronParams, sigma: Superactivation, x, domain=None):
    """``sigma(w x - theta)`` via segment coordinates; never forms ``w x - theta``."""
    a, b = domain if domain is not None else (params.a, params.b)
    a, b = Fraction(a), Fraction(b)
    if isinstance(x, (int, Fraction)):
        if not a <= x <= b:
            raise ValueError("x outside the neuron's domain")
        return sigma.segment(params.m, (Fraction(x) - a) / (b - a))
    xs = np.asarray(x, dtype=float)
    af, bf = float(a), float(b)
    if np.any(xs < af) or np.any(xs > bf):
        raise ValueError("x outside the neuron's domain")
    tau = np.clip((xs - af) / (bf - af), 0.0, 1.0)
    out = sigma.segment(params.m, tau)
    return float(out) if np.ndim(out) == 0 else out


def neuron_lookup(target: TargetFn1D, eps: float, sigma: Superactivation,
                  max_degree: int = DEFAULT_MAX_DEGREE,
                  grid_size: int = DEFAULT_GRID) -> tuple[NeuronParams, ErrorCertificate]:
    if eps <= 0:
        raise ValueError("eps must be positive")
    a, b = float(target.a), float(target.b)
    u = _vectorize(target.func)
    if sigma.mode is Mode.SMOOTH:
        def h(t):
            return u(a + (b - a) * flatten_h_inv(np.clip(t, 0.0, 1.0)))
    else:
        def h(t):
            return u(a + (b - a) * np.asarray(t, dtype=float))
    fit = chebyshev_fit(TargetFn1D(h, 0, 1, target.label), eps, max_degree)
    p = rationalize_poly(fit.poly, eps / 2)
    if p.is_zero():
        # index 0 has no segment (its slab lies in the constant tail), so use a
        # small nonzero constant instead
        p = RationalPoly((Fraction(1, math.ceil(4 / eps)),))
    m = poly_to_nat(p)
    params = neuron_params(m, target.a, target.b, sigma)

    xs = np.linspace(a, b, grid_size)
    err = float(np.max(np.abs(u(xs) - eval_neuron(params, sigma, xs))))
    shift = _shift(fit.poly, p)
    cert = ErrorCertificate(grid_size, err, eps, fit_error=fit.grid_error,
                            rationalization_shift=shift,
                            budget_ok=err <= fit.grid_error + eps / 2)
    if not cert.passed:
        raise CertificationFailed(f"{target.label}: grid error {err:g} >= {eps:g}")
    return params, cert


def builtin_targets() -> dict[str, Callable]:
    return {
        "sin": np.sin,
        "exp": np.exp,
        "abs": lambda t: np.abs(np.asarray(t) - 0.5),
        "runge": lambda t: 1.0 / (1.0 + 25.0 * np.asarray(t) ** 2),
        "cos": np.cos,
        "zero": lambda t: np.zeros_like(np.asarray(t, dtype=float)),
    }
