"""Shallow networks over a basic family of features.

A network computes ``sum_i c_i * sigma(w_i * f_i(x) - theta_i)`` where each
``f_i`` is a named real feature of an abstract input point.  Inputs are only
ever touched through the features, so points can be anything: vectors,
tabulated functions, graph nodes, strings.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .neuron import ErrorCertificate, TargetFn1D, neuron_lookup, DEFAULT_MAX_DEGREE, DEFAULT_GRID
from .serialization import fraction_from_str, fraction_to_str
from .superactivation import Mode, Superactivation

__all__ = [
    "CompactSample",
    "BasicFamily",
    "DecompositionTerm",
    "Decomposition",
    "NetworkTerm",
    "ShallowNetwork",
    "Activation",
    "SpanGrid",
    "MissingFeature",
    "DecompositionTooLoose",
    "ACTIVATIONS",
    "get_activation",
    "feature_hull",
    "verify_decomposition",
    "assemble_network",
    "assemble_theorem21",
    "fit_span",
    "eval_network",
    "sup_error",
    "thread_cap",
    "unit_square_sample",
    "product_ridge_demo",
]


def thread_cap() -> int:
    """Worker cap from ``UAT_TOPO_THREADS`` (default: number of cores)."""
    raw = os.environ.get("UAT_TOPO_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


class MissingFeature(KeyError):
    pass


class DecompositionTooLoose(ValueError):
    pass


@dataclass
class CompactSample:
    """Finite sample of a compact set together with target values."""

    points: Sequence[Any]
    target_values: np.ndarray
    metadata: str = ""

    def __post_init__(self):
        self.target_values = np.asarray(self.target_values, dtype=float)
        if len(self.points) == 0:
            raise ValueError("sample must be nonempty")
        if len(self.points) != len(self.target_values):
            raise ValueError("one target value per point")

    def __len__(self):
        return len(self.points)


@dataclass
class BasicFamily:
    """Named real-valued features of the input points."""

    features: Mapping[str, Callable[[Any], float]]

    def values(self, name: str, sample: CompactSample) -> np.ndarray:
        try:
            f = self.features[name]
        except KeyError:
            raise MissingFeature(name) from None
        return np.array([float(f(p)) for p in sample.points])

    @classmethod
    def from_table(cls, ids: Sequence, columns: Mapping[str, Sequence[float]]) -> "BasicFamily":
        """Features given as tabulated values keyed by point id."""
        feats = {}
        for name, col in columns.items():
            table = dict(zip(ids, map(float, col)))
            feats[name] = table.__getitem__
        return cls(feats)

    def names(self) -> list[str]:
        return list(self.features)


@dataclass(frozen=True)
class DecompositionTerm:
    outer: Callable
    feature: str


@dataclass
class Decomposition:
    """Claimed ``g ~ sum_i outer_i(feature_i(x))`` with a stated slack."""

    terms: list[DecompositionTerm]
    slack: float = 0.0

    def __post_init__(self):
        if self.slack < 0:
            raise ValueError("slack must be nonnegative")


@dataclass(frozen=True)
class Activation:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))


def _ramp(t):
    return np.maximum(t, 0.0)


ACTIVATIONS: dict[str, Activation] = {
    "ramp": Activation("ramp", _ramp),
    "tanh": Activation("tanh", np.tanh),
}


def get_activation(name: str, mode: str | Mode = Mode.BLEND, alpha=1):
    if name == "super":
        return Superactivation(Fraction(alpha), Mode(mode))
    try:
        return ACTIVATIONS[name]
    except KeyError:
        raise ValueError(f"unknown activation {name!r}") from None


def _sigma_id(sigma) -> str:
    if isinstance(sigma, Superactivation):
        return f"super:{sigma.mode.value}:{fraction_to_str(sigma.alpha)}"
    return sigma.name


def _sigma_from_id(sid: str):
    if sid.startswith("super:"):
        _, mode, alpha = sid.split(":")
        return Superactivation(fraction_from_str(alpha), Mode(mode))
    return get_activation(sid)


@dataclass(frozen=True)
class NetworkTerm:
    c: float
    w: float | Fraction
    feature: str
    theta: float | Fraction


@dataclass
class ShallowNetwork:
    terms: list[NetworkTerm]
    sigma: Any = field(default_factory=lambda: ACTIVATIONS["ramp"])

    @property
    def sigma_id(self) -> str:
        return _sigma_id(self.sigma)

    def __add__(self, other: "ShallowNetwork") -> "ShallowNetwork":
        if self.sigma_id != other.sigma_id:
            raise ValueError("cannot concatenate networks with different activations")
        return ShallowNetwork(self.terms + other.terms, self.sigma)

    def term_values(self, term: NetworkTerm, v: np.ndarray) -> np.ndarray:
        if isinstance(self.sigma, Superactivation):
            return self.sigma.eval_affine(Fraction(term.w), Fraction(term.theta), v)
        return self.sigma(float(term.w) * v - float(term.theta))

    def evaluate_features(self, feature_values: Mapping[str, np.ndarray]) -> np.ndarray:
        n = len(next(iter(feature_values.values()))) if feature_values else 0
        out = np.zeros(n)
        for term in self.terms:
            if term.c == 0:
                continue
            try:
                v = feature_values[term.feature]
            except KeyError:
                raise MissingFeature(term.feature) from None
            out += term.c * self.term_values(term, v)
        return out

    def to_json(self) -> dict:
        sid = self.sigma_id

        def num(x):
            return fraction_to_str(x) if isinstance(x, Fraction) else float(x)

        return {
            "sigma": sid,
            "terms": [
                {"c": float(t.c), "w": num(t.w), "theta": num(t.theta),
                 "feature": t.feature, "sigma": sid}
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ShallowNetwork":
        def num(x):
            return fraction_from_str(x) if isinstance(x, str) else float(x)

        terms = [NetworkTerm(float(t["c"]), num(t["w"]), t["feature"], num(t["theta"]))
                 for t in data["terms"]]
        return cls(terms, _sigma_from_id(data["sigma"]))


def _tabulate(sample: CompactSample, family: BasicFamily, names) -> dict[str, np.ndarray]:
    return {name: family.values(name, sample) for name in dict.fromkeys(names)}


def feature_hull(sample: CompactSample, family: BasicFamily, names: Sequence[str],
                 margin: float = 1e-9) -> tuple[float, float]:
    """Smallest interval holding every listed feature over the sample, padded."""
    if not names:
        raise ValueError("need at least one feature")
    vals = np.concatenate([family.values(n, sample) for n in names])
    return float(vals.min() - margin), float(vals.max() + margin)


def verify_decomposition(sample: CompactSample, family: BasicFamily,
                         dec: Decomposition) -> float:
    """Max over the sample of ``|g - sum_i u_i(v_i(x))|``."""
    approx = np.zeros(len(sample))
    for term in dec.terms:
        v = family.values(term.feature, sample)
        approx += np.asarray(term.outer(v), dtype=float)
    return float(np.max(np.abs(sample.target_values - approx)))


def eval_network(net: ShallowNetwork, sample: CompactSample, family: BasicFamily) -> np.ndarray:
    feats = _tabulate(sample, family, [t.feature for t in net.terms])
    if not feats:
        return np.zeros(len(sample))
    return net.evaluate_features(feats)


def sup_error(net: ShallowNetwork, sample: CompactSample, family: BasicFamily) -> float:
    return float(np.max(np.abs(sample.target_values - eval_network(net, sample, family))))


def assemble_network(sample: CompactSample, family: BasicFamily, dec: Decomposition,
                       eps: float, sigma: Superactivation,
                       max_degree: int = DEFAULT_MAX_DEGREE,
                       grid_size: int = DEFAULT_GRID,
                       margin: float = 1e-9) -> tuple[ShallowNetwork, ErrorCertificate]:
    """One superactivation neuron per outer function, each within ``eps/(2n)``.

    The decomposition must already hold to ``eps/2`` on the sample; the
    triangle inequality then bounds the assembled error by ``eps``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if not dec.terms:
        raise ValueError("decomposition has no terms")
    slack = verify_decomposition(sample, family, dec)
    if slack > eps / 2:
        raise DecompositionTooLoose(f"measured slack {slack:g} exceeds eps/2 = {eps / 2:g}")
    n = len(dec.terms)
    lo, hi = feature_hull(sample, family, [t.feature for t in dec.terms], margin)
    a, b = Fraction(lo), Fraction(hi)
    term_eps = eps / (2 * n)

    def lookup(term: DecompositionTerm):
        target = TargetFn1D(term.outer, a, b, term.feature)
        return neuron_lookup(target, term_eps, sigma, max_degree=max_degree, grid_size=grid_size)

    with ThreadPoolExecutor(max_workers=min(n, thread_cap())) as pool:
        results = list(pool.map(lookup, dec.terms))

    terms = [NetworkTerm(1.0, params.w, term.feature, params.theta)
             for term, (params, _) in zip(dec.terms, results)]
    net = ShallowNetwork(terms, sigma)
    err = sup_error(net, sample, family)
    cert = ErrorCertificate(len(sample), err, eps)
    cert.budget = {
        "decomposition": eps / 2,
        "terms": [term_eps] * n,
        "measured_slack": slack,
        "term_errors": [c.max_abs_error for _, c in results],
        "hull": [fraction_to_str(a), fraction_to_str(b)],
        "segments": [str(p.m) for p, _ in results],
    }
    return net, cert


assemble_theorem21 = assemble_network  # name used by the published interface


@dataclass(frozen=True)
class SpanGrid:
    """Deterministic ``(w, theta)`` grid for :func:`fit_span`.

    ``shifts`` is either a count of uniform shifts spanning the range of
    ``w * f(x)`` over the sample, or an explicit tuple of shifts.  With the
    superactivation a count means segments ``1..shifts`` instead, since
    uniform shifts near the origin only reach its constant left tail.
    """

    weights: tuple[float, ...] = (1.0,)
    shifts: int | tuple[float, ...] = 16

    @classmethod
    def log_spaced(cls, n_weights: int, w_min: float = 0.25, w_max: float = 4.0,
                   shifts: int | tuple[float, ...] = 16, signed: bool = True) -> "SpanGrid":
        ws = np.geomspace(w_min, w_max, n_weights) if n_weights > 1 else np.array([w_min])
        if signed:
            ws = np.concatenate([ws, -ws])
        return cls(tuple(float(w) for w in ws), shifts)

    def thetas(self, wv: np.ndarray, sigma=None) -> np.ndarray:
        if isinstance(self.shifts, int) and isinstance(sigma, Superactivation):
            # shift j puts the smallest argument at the start of segment j, so
            # the columns replay the first enumerated polynomials
            alpha = float(sigma.alpha)
            j = np.arange(1, self.shifts + 1)
            return float(wv.min()) - (2 * j - 1) * alpha
        if isinstance(self.shifts, int):
            lo, hi = float(wv.min()), float(wv.max())
            if self.shifts == 1:
                return np.array([0.5 * (lo + hi)])
            return np.linspace(lo, hi, self.shifts)
        return np.asarray(self.shifts, dtype=float)


def fit_span(sample: CompactSample, family: BasicFamily, sigma, grid: SpanGrid,
             features: Sequence[str] | None = None,
             targets: np.ndarray | None = None,
             method: str = "lstsq") -> tuple[ShallowNetwork, float]:
    """Fit ``c`` over a fixed ``(feature, w, theta)`` dictionary.

    Returns the network and its max absolute residual on the sample.  The
    default ``"lstsq"`` solves least squares (minimum-norm when rank
    deficient).  ``"minimax"`` solves the Chebyshev problem as a linear
    program, which makes the max residual monotone under nested grids;
    least squares only guarantees that for the 2-norm.
    """
    if method not in ("lstsq", "minimax"):
        raise ValueError(f"unknown method {method!r}")
    names = list(features) if features is not None else family.names()
    if not names or not grid.weights:
        raise ValueError("need features and weights")
    y = sample.target_values if targets is None else np.asarray(targets, dtype=float)
    feats = _tabulate(sample, family, names)
    cols, terms = [], []
    probe = ShallowNetwork([], sigma)
    for name in names:
        v = feats[name]
        for w in grid.weights:
            for th in grid.thetas(w * v, sigma):
                term = NetworkTerm(0.0, float(w), name, float(th))
                cols.append(probe.term_values(term, v))
                terms.append(term)
    A = np.column_stack(cols)
    c = _minimax(A, y) if method == "minimax" else np.linalg.lstsq(A, y, rcond=None)[0]
    net = ShallowNetwork([NetworkTerm(float(ci), t.w, t.feature, t.theta)
                          for ci, t in zip(c, terms)], sigma)
    residual = float(np.max(np.abs(y - A @ c)))
    return net, residual


def unit_square_sample(g: Callable[[float, float], float], n: int = 21,
                       metadata: str = "") -> CompactSample:
    """Uniform ``n x n`` grid sample of ``[0, 1]^2`` with targets ``g(x, y)``."""
    ticks = np.linspace(0.0, 1.0, n)
    pts = [(float(x), float(y)) for x in ticks for y in ticks]
    return CompactSample(pts, np.array([g(x, y) for x, y in pts]),
                         metadata or f"unit square, {n}x{n} grid")


def product_ridge_demo(n: int = 21) -> tuple[CompactSample, BasicFamily, Decomposition]:
    """``xy = ((x + y)^2 - (x - y)^2) / 4`` over ridge features of the square."""
    sample = unit_square_sample(lambda x, y: x * y, n)
    family = BasicFamily({
        "x+y": lambda p: p[0] + p[1],
        "x-y": lambda p: p[0] - p[1],
    })
    dec = Decomposition([
        DecompositionTerm(lambda s: np.asarray(s) ** 2 / 4, "x+y"),
        DecompositionTerm(lambda s: -np.asarray(s) ** 2 / 4, "x-y"),
    ])
    return sample, family, dec


def _minimax(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``argmin_c max |y - A c|`` via HiGHS.

    The LP optimum is only accurate to the solver tolerance (about 1e-8), so
    the least-squares solution is kept instead whenever its max residual is
    smaller, as happens when ``y`` is (nearly) in the column span.
    """
    n, k = A.shape
    ones = np.ones((n, 1))
    # variables (c, t); rows: A c - t <= y and -A c - t <= -y
    A_ub = np.block([[A, -ones], [-A, -ones]])
    b_ub = np.concatenate([y, -y])
    cost = np.zeros(k + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * k + [(0, None)]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"minimax solve failed: {res.message}")
    c_lp = res.x[:k]
    c_ls = np.linalg.lstsq(A, y, rcond=None)[0]
    err_lp = np.max(np.abs(y - A @ c_lp))
    err_ls = np.max(np.abs(y - A @ c_ls))
    return c_ls if err_ls < err_lp else c_lp
