"""Kolmogorov-style networks ``sum_q sigma(w_q Psi_q(x) - theta_q)``.

The input is a point of a product of cubes ``X_1 x ... x X_n`` with
``X_p = [0, 1]^{d_p}`` and ``M = d_1 + ... + d_n``.  There are ``2M + 1``
terms, each a single superactivation neuron applied to the inner sum
``Psi_q(x) = sum_p psi_pq(x_p)``.  Inner maps come from a provider; the
built-in one is a finite-resolution staircase construction on shifted grids.
Outer functions are recovered by backfitting and then replaced by neurons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .neuron import (DEFAULT_GRID, ErrorCertificate, NeuronParams, TargetFn1D,
                     neuron_lookup, neuron_params)
from .superactivation import Superactivation

__all__ = [
    "InnerProvider",
    "KstTerm",
    "KstNetwork",
    "BackfitResult",
    "staircase",
    "cube_inner_provider",
    "big_psi",
    "backfit",
    "fit_kst",
    "eval_kst",
    "synthesize",
    "product_cube_sample",
    "LocalLinear",
    "PolySmoother",
]


@dataclass(frozen=True)
class InnerProvider:
    """Inner maps ``psi(p, q, x_p) -> [0, 1]`` for a product of ``len(dims)`` factors.

    ``p`` and ``q`` are 0-based: ``0 <= p < n`` and ``0 <= q < 2M + 1``.
    """

    dims: tuple[int, ...]
    psi: Callable[[int, int, np.ndarray], np.ndarray]
    cell_width: float = 0.0  # resolution of the construction, 0 if unknown
    label: str = "custom"

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def M(self) -> int:
        return sum(self.dims)

    @property
    def terms(self) -> int:
        return 2 * self.M + 1

    def check_q(self, q: int):
        if not 0 <= q < self.terms:
            raise IndexError(f"q = {q} outside 0..{self.terms - 1}")

    def inner_sums(self, points: Sequence) -> np.ndarray:
        """``Psi[i, q]`` for every sample point and term."""
        factors = [np.array([np.asarray(x[p], dtype=float).reshape(self.dims[p]) for x in points])
                   for p in range(self.n)]
        out = np.zeros((len(points), self.terms))
        for q in range(self.terms):
            for p in range(self.n):
                out[:, q] += self.psi(p, q, factors[p])
        return out


def staircase(t, cells: int, shift: float, gap: float) -> np.ndarray:
    """Monotone staircase on ``[0, 1]`` with values in ``[0, 1]``.

    Plateaus sit on the cells ``[j h - shift, (j + 1) h - shift]`` (``h = 1/cells``)
    at the cell midpoint, clipped to ``[0, 1]``; neighbouring plateaus are
    joined by linear ramps of width ``gap * h`` centred on the cell boundary.
    Hence ``|staircase(t) - t| <= h / 2`` for ``t`` in ``[0, 1]``.
    """
    h = 1.0 / cells
    j = np.arange(cells + 2)
    bounds = j * h - shift
    mids = np.clip(bounds[:-1] + h / 2, 0.0, 1.0)
    half = gap * h / 2
    xs = np.empty(2 * (len(bounds) - 2))
    ys = np.empty_like(xs)
    xs[0::2] = bounds[1:-1] - half
    xs[1::2] = bounds[1:-1] + half
    ys[0::2] = mids[:-1]
    ys[1::2] = mids[1:]
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    return np.interp(t, xs, ys)


def cube_inner_provider(dims: int | Sequence[int], resolution: int,
                        weights: Sequence[float] | None = None) -> InnerProvider:
    """Staircase inner maps on ``2^resolution`` cells, one grid shift per term.

    Term ``q`` shifts the grid by ``q h / (2M + 1)``.  Within a factor,
    ``psi_pq(x) = sum_k lambda_k phi_q(x_k) / sum_k lambda_k``.  The default
    weights are equal, which keeps ``psi`` within ``h/2`` of the coordinate mean.
    """
    dims = (dims,) if isinstance(dims, int) else tuple(int(d) for d in dims)
    if not dims or min(dims) < 1:
        raise ValueError("every factor needs dimension >= 1")
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    M = sum(dims)
    Q = 2 * M + 1
    cells = 2 ** resolution
    h = 1.0 / cells
    gap = 1.0 / Q
    lams = []
    for d in dims:
        lam = np.ones(d) if weights is None else np.asarray(weights[:d], dtype=float)
        lams.append(lam / lam.sum())

    def psi(p: int, q: int, xp: np.ndarray) -> np.ndarray:
        xp = np.asarray(xp, dtype=float)
        phi = staircase(xp, cells, q * h / Q, gap)
        return phi @ lams[p] if phi.ndim > 1 else float(phi @ lams[p])

    return InnerProvider(dims, psi, h, f"cube{list(dims)}@r{resolution}")


def big_psi(provider: InnerProvider, q: int, x: Sequence) -> float:
    """``Psi_q(x) = sum_p psi_pq(x_p)``, a value in ``[0, n]``."""
    provider.check_q(q)
    return float(sum(provider.psi(p, q, np.asarray(x[p], dtype=float).reshape(provider.dims[p]))
                     for p in range(provider.n)))


# -- 1-D smoothers ----------------------------------------------------------


@dataclass
class LocalLinear:
    """Gaussian-kernel local linear regression; reproduces linear data exactly."""

    bandwidth: float
    xs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ys: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def fit(self, xs, ys) -> "LocalLinear":
        return LocalLinear(self.bandwidth, np.asarray(xs, float).copy(), np.asarray(ys, float).copy())

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t)
        for lo in range(0, len(t), 2048):
            out[lo:lo + 2048] = self._eval(t[lo:lo + 2048])
        return out

    def operator(self, xs) -> np.ndarray:
        """Matrix ``L`` with ``self.fit(xs, ys)(xs) == L @ ys`` for every ``ys``."""
        xs = np.asarray(xs, dtype=float)
        d = xs[None, :] - xs[:, None]
        w, s0, s1, s2, det, ok = self._moments(d)
        safe = np.where(ok, det, 1.0)
        lin = w * (s2[:, None] - s1[:, None] * d) / safe[:, None]
        return np.where(ok[:, None], lin, w / s0[:, None])

    def _moments(self, d: np.ndarray):
        z = (d / self.bandwidth) ** 2
        w = np.exp(-0.5 * (z - z.min(axis=1, keepdims=True)))
        s0 = w.sum(1)
        s1 = (w * d).sum(1)
        s2 = (w * d * d).sum(1)
        det = s0 * s2 - s1 * s1
        ok = det > 1e-12 * s0 * np.maximum(s2, 1e-300)
        return w, s0, s1, s2, det, ok

    def _eval(self, t: np.ndarray) -> np.ndarray:
        d = self.xs[None, :] - t[:, None]
        w, s0, s1, s2, det, ok = self._moments(d)
        t0 = (w * self.ys).sum(1)
        t1 = (w * d * self.ys).sum(1)
        safe = np.where(ok, det, 1.0)
        return np.where(ok, (s2 * t0 - s1 * t1) / safe, t0 / s0)


@dataclass
class PolySmoother:
    """Least-squares polynomial of fixed degree on ``[lo, hi]``."""

    degree: int
    lo: float = 0.0
    hi: float = 1.0
    poly: np.polynomial.Chebyshev | None = None

    def fit(self, xs, ys) -> "PolySmoother":
        p = np.polynomial.Chebyshev.fit(xs, ys, self.degree, domain=[self.lo, self.hi])
        return PolySmoother(self.degree, self.lo, self.hi, p)

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.zeros_like(t) if self.poly is None else self.poly(t)

    def operator(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        u = (2 * xs - (self.lo + self.hi)) / (self.hi - self.lo)
        V = np.polynomial.chebyshev.chebvander(u, self.degree)
        return V @ np.linalg.pinv(V)



@dataclass
class BackfitResult:
    outers: list[Callable]
    residual: float
    history: list[float]


def backfit(psi: np.ndarray, g: np.ndarray, smoother, sweeps: int,
            tol: float = 0.0) -> BackfitResult:
    """Cyclic refits of ``h_q`` against ``Psi_q`` on the partial residuals.

    Smoothers are linear in the data, so each one is tabulated once as a
    matrix on the sample.  Stops early once the max residual is ``<= tol``.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    Q = psi.shape[1]
    ops = [smoother.operator(psi[:, q]) for q in range(Q)]
    start = float(np.mean(g)) / Q
    fitted = np.full(psi.shape, start)
    partials = np.full(psi.shape, start)
    resid = g - fitted.sum(axis=1)
    history = []
    for _ in range(sweeps):
        for q in range(Q):
            partials[:, q] = resid + fitted[:, q]
            fitted[:, q] = ops[q] @ partials[:, q]
            resid = partials[:, q] - fitted[:, q]
        history.append(float(np.max(np.abs(resid))))
        if history[-1] <= tol:
            break
    outers = [smoother.fit(psi[:, q], partials[:, q]) for q in range(Q)]
    return BackfitResult(outers, history[-1], history)


# -- networks ---------------------------------------------------------------


@dataclass(frozen=True)
class KstTerm:
    w: Fraction
    theta: Fraction
    m: int


@dataclass
class KstNetwork:
    terms: list[KstTerm]
    provider: InnerProvider
    sigma: Superactivation

    def __post_init__(self):
        if len(self.terms) != self.provider.terms:
            raise ValueError(f"need exactly {self.provider.terms} terms, got {len(self.terms)}")

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return Fraction(0), Fraction(self.provider.n)

    def params(self, q: int) -> NeuronParams:
        a, b = self.domain
        t = self.terms[q]
        return NeuronParams(t.m, t.w, t.theta, self.sigma.mode, a, b, self.sigma.alpha)

    def evaluate_psi(self, psi: np.ndarray) -> np.ndarray:
        """Network output given the inner sums ``Psi[i, q]``."""
        psi = np.atleast_2d(psi)
        a, b = self.domain
        out = np.zeros(psi.shape[0])
        for q, term in enumerate(self.terms):
            # segment coordinate of w_q Psi - theta_q, with w_q and theta_q exact
            base = term.w * a - term.theta
            k, r = divmod(base / self.sigma.alpha + 1, 2)  # base = (2k - 1) alpha + r alpha
            tau = float(r) + float(term.w / self.sigma.alpha) * psi[:, q]
            if r != 0 or tau.max(initial=0.0) > 1.0 + 1e-12:
                out += self.sigma.eval_affine(term.w, term.theta, psi[:, q])
            else:
                out += self.sigma.segment(int(k), np.clip(tau, 0.0, 1.0))
        return out


def eval_kst(net: KstNetwork, x) -> float | np.ndarray:
    """Network value at one product-space point, or at a sequence of them."""
    single = isinstance(x, tuple)
    pts = [x] if single else list(x)
    vals = net.evaluate_psi(net.provider.inner_sums(pts))
    return float(vals[0]) if single else vals


def synthesize(provider: InnerProvider, ms: Sequence[int], sigma: Superactivation | None = None
               ) -> KstNetwork:
    """Network with ``w_q = 1`` and ``theta_q`` chosen so term ``q`` reads ``p_{m_q}(Psi_q / n)``."""
    n = provider.n
    sigma = (sigma or Superactivation()).with_alpha(Fraction(n))
    terms = []
    for m in ms:
        p = neuron_params(m, 0, n, sigma)
        terms.append(KstTerm(p.w, p.theta, m))
    return KstNetwork(terms, provider, sigma)


def fit_kst(sample, provider: InnerProvider, sigma: Superactivation, eps: float,
            sweeps: int = 20, smoother=None, max_degree: int = 256,
            grid_size: int = DEFAULT_GRID, tol: float = 0.0) -> tuple[KstNetwork, ErrorCertificate]:
    """Backfit the outer functions, then replace each by one neuron.

    The neurons live on ``[0, n]`` with ``alpha = n``, so every ``w_q`` is
    exactly 1.  The certificate may report ``passed = False``: the inner maps
    are only approximate, so the representation error need not fall below
    ``eps`` at a given resolution.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    n = provider.n
    if smoother is None:
        width = provider.cell_width or 1.0 / 16
        smoother = LocalLinear(3 * width)
    psi = provider.inner_sums(sample.points)
    g = sample.target_values
    fit = backfit(psi, g, smoother, sweeps, tol)

    sig = sigma.with_alpha(Fraction(n))
    budget = eps / provider.terms
    terms, term_errors = [], []
    for q, h in enumerate(fit.outers):
        target = TargetFn1D(h, 0, n, f"h_{q}")
        params, cert = neuron_lookup(target, budget, sig, max_degree=max_degree, grid_size=grid_size)
        terms.append(KstTerm(params.w, params.theta, params.m))
        term_errors.append(cert.max_abs_error)
    net = KstNetwork(terms, provider, sig)
    err = float(np.max(np.abs(g - net.evaluate_psi(psi))))
    cert = ErrorCertificate(len(sample), err, eps)
    cert.budget = {
        "term_budget": budget,
        "term_errors": term_errors,
        "backfit_residual": fit.residual,
        "backfit_history": fit.history,
    }
    return net, cert


def product_cube_sample(dims: Sequence[int], g: Callable[[tuple], float],
                        per_axis: int | None = None, metadata: str = ""):
    """Tensor grid sample of ``prod_p [0, 1]^{d_p}`` as tuples of factor points."""
    import itertools

    from .tfnn import CompactSample

    dims = tuple(dims)
    M = sum(dims)
    if per_axis is None:
        per_axis = max(2, int(math.floor(900 ** (1.0 / M))))
    ticks = np.linspace(0.0, 1.0, per_axis)
    pts = []
    for flat in itertools.product(ticks, repeat=M):
        parts, i = [], 0
        for d in dims:
            parts.append(np.array(flat[i:i + d]))
            i += d
        pts.append(tuple(parts))
    return CompactSample(pts, np.array([g(x) for x in pts]),
                         metadata or f"product of cubes {list(dims)}, {per_axis} points per axis")
