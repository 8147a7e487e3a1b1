"""The superactivation function: polynomial segments glued by smooth plateaus.

On ``[(2m-1)a, 2m a]`` the function replays the m-th enumerated polynomial,
``sigma(a*t + (2m-1)*a) = p_m(t)`` for ``t`` in ``[0, 1]``.  The gaps
``(2m a, (2m+1) a)`` are filled with a blend driven by
``omega = beta(x) / (beta(x) + beta(1 - x))`` where ``beta(x) = exp(-1/x)``.
Left of ``a`` the function is the constant ``p_1(0)``.

Three gluing modes are available:

``literal``
    segments carry ``p_m`` and gaps blend the two endpoint *values*.
    Continuous, but generally not differentiable at the junctions.
``smooth``
    segments carry ``p_m(h(t))`` with ``h`` a flattening homeomorphism of
    ``[0, 1]`` whose derivatives all vanish at both ends; gaps as ``literal``.
``blend`` (default)
    segments carry ``p_m`` exactly and gaps blend the two neighbouring
    polynomials continued past their segments,
    ``(1 - omega) p_m(1 + x) + omega p_{m+1}(x - 1)``.  Because ``omega`` is
    flat at both ends of the gap, all derivatives match at every junction.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
from numpy.polynomial import legendre

from .enumeration import RationalPoly, nat_to_poly

__all__ = [
    "Mode",
    "SegmentCoord",
    "Superactivation",
    "beta",
    "omega",
    "omega_local",
    "flatten_h",
    "flatten_h_inv",
    "eval_sigma_segment",
    "eval_sigma_global",
    "sigma_self_check",
]

BETA_CUTOFF = 1e-300


class Mode(str, enum.Enum):
    LITERAL = "literal"
    SMOOTH = "smooth"
    BLEND = "blend"


def _is_exact(x) -> bool:
    return isinstance(x, (int, Rational)) and not isinstance(x, bool)


def beta(t):
    """Smooth transition ``exp(-1/t)`` for ``t > 0`` and ``0`` otherwise."""
    arr = np.asarray(t, dtype=float)
    out = np.zeros_like(arr)
    pos = arr > BETA_CUTOFF
    out[pos] = np.exp(-1.0 / arr[pos])
    return float(out) if out.ndim == 0 else out


def omega_local(x):
    """Blend weight on a gap in local coordinates ``x = (t - 2m a)/a``."""
    b0 = beta(x)
    b1 = beta(1.0 - np.asarray(x, dtype=float))
    return b0 / (b0 + b1)


def omega(t, m: int, alpha) -> float:
    """Blend weight of the m-th gap at global position ``t``."""
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if _is_exact(t):
        x = float((Fraction(t) - 2 * m * alpha) / alpha)
    else:
        x = (t - 2 * m * float(alpha)) / float(alpha)
    return omega_local(x)


# -- the flattening reparameterisation h -------------------------------------

_GL_NODES, _GL_WEIGHTS = legendre.leggauss(24)
_PANELS = 64
_EDGES = np.linspace(0.0, 0.5, _PANELS + 1)


def _bump(s):
    """``beta(s) * beta(1 - s)`` on (0, 1)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > BETA_CUTOFF) & (s < 1.0 - BETA_CUTOFF)
    si = s[inside]
    out[inside] = np.exp(-1.0 / si - 1.0 / (1.0 - si))
    return out


def _gl(lo, hi):
    """Gauss-Legendre integral of the bump over ``[lo, hi]`` (arrays)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[..., None] + half[..., None] * _GL_NODES
    return half * (_bump(nodes) @ _GL_WEIGHTS)


_CUM = np.concatenate([[0.0], np.cumsum(_gl(_EDGES[:-1], _EDGES[1:]))])
_HALF_MASS = _CUM[-1]


def _lower_integral(t):
    """Integral of the bump over ``[0, t]`` for ``t`` in ``[0, 1/2]``."""
    k = np.clip(np.searchsorted(_EDGES, t, side="right") - 1, 0, _PANELS - 1)
    return _CUM[k] + _gl(_EDGES[k], t)


def _check_unit(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def flatten_h(t):
    """Normalised integral of ``beta(s) beta(1 - s)`` from 0 to ``t``."""
    arr = _check_unit(t, "t")
    low = arr <= 0.5
    out = np.empty_like(arr)
    out[low] = _lower_integral(arr[low]) / (2.0 * _HALF_MASS)
    out[~low] = 1.0 - _lower_integral(1.0 - arr[~low]) / (2.0 * _HALF_MASS)
    return float(out) if out.ndim == 0 else out


def flatten_h_inv(s, tol: float = 1e-14):
    """Inverse of :func:`flatten_h` by bracketing bisection."""
    arr = _check_unit(s, "s")
    lo = np.zeros_like(arr)
    hi = np.ones_like(arr)
    iters = int(math.ceil(math.log2(1.0 / tol))) + 1
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = flatten_h(mid) < arr
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(arr == 0.0, 0.0, np.where(arr == 1.0, 1.0, out))
    return float(out) if out.ndim == 0 else out


# -- the activation -----------------------------------------------------------


@dataclass(frozen=True)
class SegmentCoord:
    """Point ``alpha * tau + (2m - 1) * alpha`` kept as the pair ``(m, tau)``."""

    m: int
    tau: object

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("segment index starts at 1")


@dataclass(frozen=True)
class Superactivation:
    """Immutable descriptor of the glued activation."""

    alpha: Fraction = Fraction(1)
    mode: Mode = Mode.BLEND

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mode", Mode(self.mode))

    @staticmethod
    def poly(m: int) -> RationalPoly:
        return nat_to_poly(m)

    @property
    def tail_value(self) -> Fraction:
        return nat_to_poly(1)(0)

    # segments and gaps in local coordinates

    def segment(self, m: int, tau):
        """``sigma(alpha*tau + (2m-1)*alpha)``; exact for rational ``tau`` unless smooth."""
        if m < 1:
            raise ValueError("segment index starts at 1")
        p = nat_to_poly(m)
        if self.mode is Mode.SMOOTH:
            return p.evaluate(flatten_h(float(tau) if _is_exact(tau) else tau))
        if _is_exact(tau):
            return p(tau)
        return p.evaluate(tau)

    def plateau(self, m: int, x):
        """Value on the m-th gap at local coordinate ``x`` in ``[0, 1]``."""
        w = omega_local(float(x) if _is_exact(x) else x)
        if np.ndim(w) == 0:
            return self._plateau_scalar(m, x, float(w))
        xs = np.asarray(x, dtype=float)
        out = np.empty_like(xs)
        left = w < 1.0
        right = w > 0.0
        lv = np.zeros_like(xs)
        rv = np.zeros_like(xs)
        if left.any():
            lv[left] = self._gap_left(m, xs[left])
        if right.any():
            rv[right] = self._gap_right(m, xs[right])
        out[:] = np.where(w == 0.0, lv, np.where(w == 1.0, rv, (1.0 - w) * lv + w * rv))
        return out

    def _plateau_scalar(self, m, x, w):
        if w == 0.0:
            return _to_float(self._gap_left(m, x))
        if w == 1.0:
            return _to_float(self._gap_right(m, x))
        return (1.0 - w) * _to_float(self._gap_left(m, x)) + w * _to_float(self._gap_right(m, x))

    def _gap_left(self, m, x):
        p = nat_to_poly(m)
        if self.mode is not Mode.BLEND:
            return p.evaluate(np.ones_like(x)) if np.ndim(x) else p(1)
        if _is_exact(x):
            return p(1 + Fraction(x))
        return p.evaluate(1.0 + np.asarray(x, dtype=float))

    def _gap_right(self, m, x):
        p = nat_to_poly(m + 1)
        if self.mode is not Mode.BLEND:
            return p.evaluate(np.zeros_like(x)) if np.ndim(x) else p(0)
        if _is_exact(x):
            return p(Fraction(x) - 1)
        return p.evaluate(np.asarray(x, dtype=float) - 1.0)

    # global evaluation

    def locate(self, t):
        """Classify exact ``t`` as ('tail', None, None), ('segment', m, tau) or ('gap', m, x)."""
        u = Fraction(t) / self.alpha
        if u <= 1:
            return "tail", None, None
        k = math.floor(u)
        frac = u - k
        if k % 2 == 1:
            return "segment", (k + 1) // 2, frac
        if frac == 0:
            return "segment", k // 2, Fraction(1)
        return "gap", k // 2, frac

    def at(self, t):
        """Exact-argument evaluation; Fraction results where the mode allows."""
        kind, m, loc = self.locate(t)
        if kind == "tail":
            return self.tail_value
        if kind == "segment":
            return self.segment(m, loc)
        return self.plateau(m, loc)

    def eval_affine(self, w, theta, values) -> np.ndarray:
        """``sigma(w * v - theta)`` for a float array ``v`` with exact ``w, theta``.

        ``theta`` may have thousands of digits, so the integer part of
        ``theta / alpha`` is split off exactly and only a bounded remainder
        enters floating point.
        """
        v = np.asarray(values, dtype=float)
        scale = Fraction(w) / self.alpha
        shift = Fraction(theta) / self.alpha
        base = math.floor(shift)
        y = float(scale) * v - float(shift - base)
        s = np.floor(y)
        frac = y - s
        out = np.empty_like(v)
        for s_val in np.unique(s):
            sel = s == s_val
            k = int(s_val) - base
            fr = frac[sel]
            if k < 1:
                out[sel] = float(self.tail_value)
                continue
            if k % 2 == 1:
                out[sel] = self.segment((k + 1) // 2, fr)
            else:
                out[sel] = self.plateau(k // 2, fr)
        return out

    def __call__(self, t):
        if _is_exact(t):
            return self.at(t)
        out = self.eval_affine(1, 0, t)
        return float(out) if np.ndim(out) == 0 else out

    def with_alpha(self, alpha) -> "Superactivation":
        return Superactivation(Fraction(alpha), self.mode)


def _to_float(v) -> float:
    if isinstance(v, Fraction):
        try:
            return float(v)
        except OverflowError:
            return math.copysign(math.inf, v)
    return float(v)


def eval_sigma_segment(sigma: Superactivation, c: SegmentCoord):
    return sigma.segment(c.m, c.tau)


def eval_sigma_global(sigma: Superactivation, t):
    return sigma.at(t)


def sigma_self_check(sigma: Superactivation, m_max: int, grid: int,
                     fd_step: Fraction = Fraction(1, 10_000),
                     side_offset: Fraction = Fraction(1, 10**12)) -> dict:
    """Check segment fidelity and junction behaviour for ``m <= m_max``.

    Segment deviation compares global evaluation at rational grid points
    against the segment polynomial (``p_m(tau)``, or ``p_m(h(tau))`` when
    smooth).  Junctions are probed from both sides at ``side_offset`` and by
    central and one-sided differences at ``fd_step`` (both in units of alpha).
    """
    if m_max < 1 or grid < 2:
        raise ValueError("need m_max >= 1 and grid >= 2")
    a = sigma.alpha
    taus = [Fraction(k, grid - 1) for k in range(grid)]
    segments = []
    poly_max = {}
    for m in range(1, m_max + 2):
        p = nat_to_poly(m)
        poly_max[m] = p.max_abs_on_unit(grid)
        if m > m_max:
            break
        dev = 0.0
        for tau in taus:
            got = sigma.at(a * (2 * m - 1) + a * tau)
            if sigma.mode is Mode.SMOOTH:
                want = p.evaluate(flatten_h(float(tau)))
                dev = max(dev, abs(float(got) - want))
            else:
                dev = max(dev, float(abs(Fraction(got) - p(tau))))
        segments.append({"m": m, "deviation": dev, "poly_max": poly_max[m]})

    junctions = []
    eta = side_offset * a
    h = fd_step * a
    for m in range(1, m_max + 1):
        for kind, t in (("end", 2 * m * a), ("start", (2 * m + 1) * a)):
            f0 = _to_float(sigma.at(t))
            fl = _to_float(sigma.at(t - h))
            fr = _to_float(sigma.at(t + h))
            hf = float(h)
            d1 = (fr - fl) / (2 * hf)
            d2 = (fr - 2 * f0 + fl) / (hf * hf)
            jump = abs((fr - f0) / hf - (f0 - fl) / hf)
            gap = abs(_to_float(sigma.at(t + eta)) - _to_float(sigma.at(t - eta)))
            scale = 1.0 + max(poly_max[m], poly_max[m + 1])
            junctions.append({
                "m": m, "kind": kind, "t": f"{t.numerator}/{t.denominator}",
                "value_gap": gap, "d1": d1, "d2": d2, "d1_jump": jump,
                "flatness_ratio": max(abs(d1), abs(d2)) / scale,
            })
    return {
        "alpha": f"{a.numerator}/{a.denominator}",
        "mode": sigma.mode.value,
        "m_max": m_max,
        "grid": grid,
        "max_deviation": max(s["deviation"] for s in segments),
        "max_value_gap": max(j["value_gap"] for j in junctions),
        "max_flatness_ratio": max(j["flatness_ratio"] for j in junctions),
        "segments": segments,
        "junctions": junctions,
    }
