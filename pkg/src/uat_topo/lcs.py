"""Networks whose basic family is a set of continuous linear functionals.

Two normed settings are provided.  In ``R^d`` the functionals are dot
products with unit directions.  For functions tabulated on a uniform grid of
``[0, 1]`` they are trapezoid-rule inner products against fixed kernels.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .tfnn import BasicFamily, CompactSample, ShallowNetwork, SpanGrid, fit_span

__all__ = [
    "FunctionalFamilySpec",
    "EuclideanLinear",
    "QuadratureFunctionals",
    "ProbeResult",
    "directions",
    "quadrature_kernels",
    "trapezoid_weights",
    "make_functionals",
    "approximate_lcs",
    "exp_family_probe",
    "sine_curve_sample",
    "cube_grid_sample",
    "EXP_CLAMP",
]

EXP_CLAMP = 30.0


@dataclass(frozen=True)
class EuclideanLinear:
    d: int


@dataclass(frozen=True)
class QuadratureFunctionals:
    grid: int
    kernels: tuple[Callable, ...] | None = None  # default: 1, t, t^2, cos, sin ladder


@dataclass(frozen=True)
class FunctionalFamilySpec:
    kind: EuclideanLinear | QuadratureFunctionals
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if isinstance(self.kind, EuclideanLinear) and self.kind.d < 1:
            raise ValueError("dimension must be at least 1")
        if isinstance(self.kind, QuadratureFunctionals) and self.kind.grid < 2:
            raise ValueError("quadrature grid needs at least 2 points")


def directions(d: int, count: int) -> np.ndarray:
    """Coordinate axes first, then normalized Halton points of ``[-1, 1]^d``."""
    out = [np.eye(d)[i] for i in range(min(d, count))]
    if count > d:
        halton = qmc.Halton(d, scramble=False)
        halton.fast_forward(1)  # skip the origin
        while len(out) < count:
            v = 2.0 * halton.random(1)[0] - 1.0
            norm = np.linalg.norm(v)
            if norm < 1e-12:
                continue
            v = v / norm
            # skip repeats of a direction or its negative
            if all(abs(float(v @ u)) < 1 - 1e-9 for u in out):
                out.append(v)
    return np.array(out)


def quadrature_kernels(count: int) -> list[tuple[str, Callable]]:
    """Kernels ``1, t, t^2, cos(pi t), sin(pi t), cos(2 pi t), ...``."""
    ks: list[tuple[str, Callable]] = [
        ("1", lambda t: np.ones_like(t)),
        ("t", lambda t: t),
        ("t^2", lambda t: t * t),
    ]
    k = 1
    while len(ks) < count:
        ks.append((f"cos{k}", lambda t, k=k: np.cos(np.pi * k * t)))
        ks.append((f"sin{k}", lambda t, k=k: np.sin(np.pi * k * t)))
        k += 1
    return ks[:count]


def trapezoid_weights(grid: int) -> np.ndarray:
    if grid < 2:
        raise ValueError("quadrature grid needs at least 2 points")
    w = np.full(grid, 1.0 / (grid - 1))
    w[0] = w[-1] = 0.5 / (grid - 1)
    return w


def _dot(direction: np.ndarray) -> Callable:
    def f(x):
        x = np.asarray(x, dtype=float)
        if x.shape != direction.shape:
            raise ValueError(f"point of shape {x.shape}, expected {direction.shape}")
        return float(direction @ x)
    return f


def make_functionals(spec: FunctionalFamilySpec) -> BasicFamily:
    """The first ``spec.count`` functionals of the fixed family, named ``f0, f1, ...``."""
    kind = spec.kind
    if isinstance(kind, EuclideanLinear):
        dirs = directions(kind.d, spec.count)
        return BasicFamily({f"f{i}": _dot(v) for i, v in enumerate(dirs)})
    if isinstance(kind, QuadratureFunctionals):
        ts = np.linspace(0.0, 1.0, kind.grid)
        weights = trapezoid_weights(kind.grid)
        if kind.kernels is not None:
            if len(kind.kernels) < spec.count:
                raise ValueError("fewer kernels than requested functionals")
            kernels = list(kind.kernels)[:spec.count]
        else:
            kernels = [k for _, k in quadrature_kernels(spec.count)]
        tables = [weights * np.asarray(k(ts), dtype=float) for k in kernels]
        return BasicFamily({f"f{i}": _dot(row) for i, row in enumerate(tables)})
    raise TypeError(f"unknown functional family {kind!r}")


def approximate_lcs(sample: CompactSample, spec: FunctionalFamilySpec, sigma,
                    eps: float | None = None, grid: SpanGrid | None = None,
                    nodes: int = 128, method: str = "lstsq") -> tuple[ShallowNetwork, float]:
    """Fit ``sum c_i sigma(w f_i(x) - theta_i)`` over the functional family.

    Without an explicit grid, ``nodes`` hidden units are split evenly over the
    functionals and the signed unit weights.  ``eps`` is recorded by callers;
    the residual is returned as is.
    """
    family = make_functionals(spec)
    if grid is None:
        per = max(1, nodes // (2 * spec.count))
        grid = SpanGrid((1.0, -1.0), per)
    return fit_span(sample, family, sigma, grid, method=method)


@dataclass(frozen=True)
class ProbeResult:
    residual: float
    clamped: bool
    columns: int


def exp_family_probe(sample: CompactSample, spec: FunctionalFamilySpec,
                     degree_cap: int) -> ProbeResult:
    """Least squares over ``exp(sum_j n_j f_j(x))`` with ``n_j >= 0``, ``sum n_j <= cap``.

    Exponents are clamped to ``[-30, 30]``; the result says whether that
    happened.  This is an empirical probe, not a density proof.
    """
    if degree_cap < 0:
        raise ValueError("degree cap must be nonnegative")
    family = make_functionals(spec)
    F = np.column_stack([family.values(n, sample) for n in family.names()])
    k = F.shape[1]
    exps = [e for total in range(degree_cap + 1)
            for e in _compositions(total, k)]
    R = F @ np.array(exps, dtype=float).T
    clamped = bool(np.any(np.abs(R) > EXP_CLAMP))
    A = np.exp(np.clip(R, -EXP_CLAMP, EXP_CLAMP))
    y = sample.target_values
    c, *_ = np.linalg.lstsq(A, y, rcond=None)
    return ProbeResult(float(np.max(np.abs(y - A @ c))), clamped, A.shape[1])


def _compositions(total: int, k: int):
    """Nonnegative integer vectors of length ``k`` summing to ``total``, lexicographic."""
    for bars in itertools.combinations(range(total + k - 1), k - 1):
        prev, parts = -1, []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(total + k - 2 - prev)
        yield tuple(reversed(parts))


def sine_curve_sample(curves: int = 61, grid: int = 101, c_max: float = 3.0,
                      target: Callable[[float], float] | None = None) -> CompactSample:
    """Curves ``t -> sin(c t)``, ``c`` uniform in ``[0, c_max]``, tabulated on ``grid`` points.

    The default target is ``(integral_0^1 sin(c t) dt)^2`` in closed form.
    """
    ts = np.linspace(0.0, 1.0, grid)
    cs = np.linspace(0.0, c_max, curves)
    pts = [np.sin(c * ts) for c in cs]
    if target is None:
        def target(c):
            return ((1.0 - math.cos(c)) / c) ** 2 if c else 0.0
    return CompactSample(pts, np.array([target(c) for c in cs]),
                         f"sin(ct), c in [0,{c_max}], {curves} curves, grid {grid}")


def cube_grid_sample(d: int, g: Callable[[np.ndarray], float], per_axis: int | None = None
                     ) -> CompactSample:
    """Tensor grid sample of ``[0, 1]^d`` with roughly 400 points."""
    if per_axis is None:
        per_axis = max(2, int(round(400 ** (1.0 / d))))
    ticks = np.linspace(0.0, 1.0, per_axis)
    pts = [np.array(p) for p in itertools.product(ticks, repeat=d)]
    return CompactSample(pts, np.array([g(p) for p in pts]),
                         f"[0,1]^{d}, {per_axis} points per axis")
