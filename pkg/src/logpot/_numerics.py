"""Small numerical helpers shared across modules."""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial.legendre import leggauss
from scipy.fft import dct
from scipy.optimize import minimize_scalar

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int, a: float = -1.0, b: float = 1.0):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    t, w = _GL_CACHE[n]
    half = 0.5 * (b - a)
    return a + half * (t + 1.0), half * w


def chebyshev_lobatto(n: int, a: float, b: float) -> np.ndarray:
    """``n`` Chebyshev extreme points on [a, b], endpoints included, ascending."""
    if n == 1:
        return np.array([0.5 * (a + b)])
    k = np.arange(n)
    x = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * k / (n - 1))
    x[0], x[-1] = a, b
    return np.clip(x, a, b)


def set_grid(E, per_interval: int) -> np.ndarray:
    return np.concatenate([chebyshev_lobatto(per_interval, a, b) for a, b in E.intervals])


def sup_norm_on_set(fn, E, per_interval: int = 512, polish: int = 8) -> tuple[float, float]:
    """Maximum of ``|fn|`` over ``E`` (grid search plus local polishing).

    Returns ``(value, argmax)``.
    """
    grid = set_grid(E, per_interval)
    vals = np.abs(fn(grid))
    best_i = int(np.argmax(vals))
    best, arg = float(vals[best_i]), float(grid[best_i])
    for i in np.argsort(vals)[::-1][:polish]:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        if not hi > lo:
            continue
        # stay inside one component
        comp = min(E.intervals, key=lambda ab: max(ab[0] - grid[i], grid[i] - ab[1], 0.0))
        lo, hi = max(lo, comp[0]), min(hi, comp[1])
        res = minimize_scalar(lambda x: -abs(fn(np.array([x]))[0]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-14 * max(1.0, abs(hi))})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, arg


def cheb_coefficients(values: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients from samples at the extreme points ``cos(pi k / n)``."""
    n = values.size - 1
    c = dct(values, type=1) / n
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def adaptive_chebfit(fn, a: float, b: float, tol: float = 1e-14, max_deg: int = 1 << 16):
    """Chebyshev series of a smooth ``fn`` on [a, b] with adaptive degree."""
    deg = 32
    while True:
        x = 0.5 * (a + b) + 0.5 * (b - a) * np.cos(np.pi * np.arange(deg + 1) / deg)
        coef = cheb_coefficients(np.asarray(fn(x), dtype=float))
        scale = np.abs(coef).max()
        if scale == 0.0 or np.abs(coef[-8:]).max() <= tol * scale or deg >= max_deg:
            last = np.nonzero(np.abs(coef) > 0.1 * tol * scale)[0]
            keep = last[-1] + 1 if last.size else 1
            return C.Chebyshev(coef[:keep], domain=[a, b])
        deg *= 2


def ks_discrete_vs_cdf(points, weights, cdf) -> float:
    """Kolmogorov-Smirnov distance between a discrete probability measure and a CDF."""
    points = np.asarray(points, dtype=float)
    order = np.argsort(points, kind="stable")
    x = points[order]
    w = np.asarray(weights, dtype=float)[order]
    w = w / w.sum()
    after = np.cumsum(w)
    before = after - w
    # ties: use the extreme cumulative values at each distinct location
    F = np.asarray(cdf(x), dtype=float)
    return float(max(np.max(np.abs(after - F)), np.max(np.abs(before - F))))


def arcsine_cdf(x, a: float = -2.0, b: float = 2.0):
    """CDF of the equilibrium (arcsine) law of [a, b]."""
    u = np.clip((2.0 * np.asarray(x, dtype=float) - a - b) / (b - a), -1.0, 1.0)
    return 1.0 - np.arccos(u) / np.pi


def logsumexp(v) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return -math.inf
    m = v.max()
    if not np.isfinite(m):
        return float(m)
    return float(m + math.log(np.exp(v - m).sum()))
