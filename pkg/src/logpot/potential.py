"""Measures, logarithmic potentials, energies and equilibrium measures on interval unions.

Conventions: the potential of a measure ``mu`` is
``Phi_mu(z) = int log(1/|z - x|) dmu(x)``, the capacity is ``C(E) = exp(-I(rho_E))``
with ``I`` the Coulomb energy, and the Green's function of ``E`` with pole at
infinity is ``G_E(z) = log(1/C(E)) - Phi_{rho_E}(z)``.

On a finite union of intervals ``[a_1, b_1] u ... u [a_{l+1}, b_{l+1}]`` the
equilibrium density is

    rho(x) = (1/pi) |prod_j (x - x_j)| / sqrt(|prod_k (x - a_k)(x - b_k)|)

with exactly one ``x_j`` in every gap, fixed by the vanishing of the integral of
``prod_j (x - x_j) / sqrt(|...|)`` over each gap.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import roots_jacobi

from ._numerics import adaptive_chebfit, gauss_legendre, set_grid, sup_norm_on_set
from .errors import BadDensity, NotNested, SolveFailed, ValidationError
from .setgeom import IntervalUnion, normalize

log = logging.getLogger(__name__)

NODE_TOL = 1e-14
MAX_GAPS = 512

FLAGS = {
    # flag: (alpha, beta) of the Jacobi weight (1 - t)^alpha (1 + t)^beta on [-1, 1]
    "none": (0.0, 0.0),
    "inverse-sqrt-left": (0.0, -0.5),
    "inverse-sqrt-right": (-0.5, 0.0),
    "both": (-0.5, -0.5),
    "sqrt-both": (0.5, 0.5),
}


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ACComponent:
    interval: tuple[float, float]
    density: Callable[[np.ndarray], np.ndarray]
    flag: str = "none"

    def __post_init__(self):
        if self.flag not in FLAGS:
            raise ValidationError(f"unknown singularity flag {self.flag!r}")
        a, b = self.interval
        if not b > a:
            raise ValidationError(f"bad component interval {self.interval}")


@dataclass(frozen=True)
class MeasureSpec:
    """A positive measure: point masses plus absolutely continuous pieces."""

    point_masses: tuple[tuple[float, float], ...] = ()
    ac_components: tuple[ACComponent, ...] = ()

    def __post_init__(self):
        for x, w in self.point_masses:
            if not (w > 0 and math.isfinite(w) and math.isfinite(x)):
                raise ValidationError(f"bad point mass ({x}, {w})")
        if not self.point_masses and not self.ac_components:
            raise ValidationError("measure has no mass")


@dataclass(frozen=True)
class DiscretizedMeasure:
    """Weighted nodes ``sum_k w_k delta_{x_k}`` with strictly increasing nodes.

    ``cell_widths`` records, for nodes that come from an absolutely continuous
    piece, the width of the quadrature cell the node stands for (0 for true
    atoms); it is only used by :func:`coulomb_energy`.
    """

    nodes: np.ndarray
    weights: np.ndarray
    cell_widths: np.ndarray | None = None

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)
        if x.ndim != 1 or x.shape != w.shape or x.size == 0:
            raise ValidationError("nodes and weights must be equal-length, non-empty 1-d arrays")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("nodes must be strictly increasing")
        if not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise ValidationError("weights must be positive and finite")
        if self.cell_widths is not None:
            object.__setattr__(self, "cell_widths", np.asarray(self.cell_widths, dtype=float))

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def normalized(self) -> "DiscretizedMeasure":
        return DiscretizedMeasure(self.nodes, self.weights / self.total_mass, self.cell_widths)

    @classmethod
    def from_points(cls, nodes, weights=None) -> "DiscretizedMeasure":
        """Build from possibly unsorted / repeated nodes, merging duplicates."""
        nodes = np.asarray(nodes, dtype=float)
        if weights is None:
            weights = np.full(nodes.shape, 1.0 / nodes.size)
        weights = np.asarray(weights, dtype=float)
        uniq, inv = np.unique(nodes, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, weights)
        return cls(uniq, merged)


def _component_rule(comp: ACComponent, n: int):
    a, b = comp.interval
    alpha, beta = FLAGS[comp.flag]
    if comp.flag == "both":
        k = np.arange(1, n + 1)
        t = np.cos((2 * k - 1) * np.pi / (2 * n))[::-1]
        w = np.full(n, np.pi / n)
    elif comp.flag == "sqrt-both":
        k = np.arange(1, n + 1)
        th = k * np.pi / (n + 1)
        t = np.cos(th)[::-1]
        w = (np.pi / (n + 1) * np.sin(th) ** 2)[::-1]
    else:
        t, w = roots_jacobi(n, alpha, beta)
    x = 0.5 * (a + b) + 0.5 * (b - a) * t
    dens = np.asarray(comp.density(x), dtype=float)
    if dens.shape != x.shape or not np.all(np.isfinite(dens)) or np.any(dens < 0):
        raise BadDensity(f"density on {comp.interval} returned negative or non-finite values")
    jac = (1.0 - t) ** alpha * (1.0 + t) ** beta
    weights = 0.5 * (b - a) * w * dens / jac
    mids = 0.5 * (x[1:] + x[:-1])
    edges = np.concatenate([[a], mids, [b]])
    return x, weights, np.diff(edges)


def discretize(spec: MeasureSpec, nodes_per_component: int = 64) -> DiscretizedMeasure:
    """Replace each a.c. piece by a Gauss-Jacobi rule matched to its endpoint flag."""
    if nodes_per_component < 2:
        raise ValidationError("nodes_per_component must be at least 2")
    xs, ws, hs = [], [], []
    for x, w in spec.point_masses:
        xs.append(np.array([x]))
        ws.append(np.array([w]))
        hs.append(np.zeros(1))
    for comp in spec.ac_components:
        x, w, h = _component_rule(comp, nodes_per_component)
        keep = w > 0
        xs.append(x[keep])
        ws.append(w[keep])
        hs.append(h[keep])
    x = np.concatenate(xs)
    w = np.concatenate(ws)
    h = np.concatenate(hs)
    order = np.argsort(x, kind="stable")
    x, w, h = x[order], w[order], h[order]
    # coincident nodes from different pieces are merged
    uniq, start = np.unique(x, return_index=True)
    if uniq.size != x.size:
        idx = np.searchsorted(uniq, x)
        w2 = np.zeros(uniq.size)
        h2 = np.zeros(uniq.size)
        np.add.at(w2, idx, w)
        np.maximum.at(h2, idx, h)
        x, w, h = uniq, w2, h2
    return DiscretizedMeasure(x, w, h)


def arcsine_spec(a: float = -2.0, b: float = 2.0) -> MeasureSpec:
    """Equilibrium measure of a single interval as a :class:`MeasureSpec`."""
    return MeasureSpec(ac_components=(ACComponent(
        (a, b), lambda x: 1.0 / (np.pi * np.sqrt(np.clip((x - a) * (b - x), 0, None))), "both"),))


def semicircle_spec(a: float = -2.0, b: float = 2.0) -> MeasureSpec:
    r = 0.5 * (b - a)
    return MeasureSpec(ac_components=(ACComponent(
        (a, b), lambda x: 2.0 / (np.pi * r * r) * np.sqrt(np.clip((x - a) * (b - x), 0, None)),
        "sqrt-both"),))


def uniform_spec(E: IntervalUnion) -> MeasureSpec:
    """Normalized Lebesgue measure on ``E``."""
    total = sum(b - a for a, b in E.intervals)
    return MeasureSpec(ac_components=tuple(
        ACComponent((a, b), lambda x, c=1.0 / total: np.full_like(x, c), "none")
        for a, b in E.intervals))


# ---------------------------------------------------------------------------
# potentials and energies of discrete measures
# ---------------------------------------------------------------------------
def log_potential(mu: DiscretizedMeasure, z):
    """``sum_k w_k log(1/|z - x_k|)``; ``+inf`` exactly at (within 1e-14 of) a node."""
    z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z_arr.shape, dtype=float)
    for i, zi in enumerate(z_arr.ravel()):
        d = np.abs(zi - mu.nodes)
        if d.min() <= NODE_TOL:
            out.flat[i] = math.inf
        else:
            out.flat[i] = -float(np.dot(mu.weights, np.log(d)))
    return out if np.ndim(z) else float(out[0])


def _f2(u):
    """Second antiderivative of log|u| vanishing at 0."""
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 0.5 * u * u * np.log(au) - 0.75 * u * u
    return np.where(au > 0, val, 0.0)


def _f1(u):
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = u * np.log(au) - u
    return np.where(au > 0, val, 0.0)


def _cell_pair_mean_log(xk, hk, xl, hl):
    """Mean of log|x - y| for x uniform on cell k and y uniform on cell l.

    A zero width means an atom at the node.
    """
    Lk, Rk = xk - 0.5 * hk, xk + 0.5 * hk
    Ll, Rl = xl - 0.5 * hl, xl + 0.5 * hl
    both = (hk > 0) & (hl > 0)
    only_k = (hk > 0) & (hl == 0)
    only_l = (hk == 0) & (hl > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.log(np.abs(xk - xl))
        cc = -(_f2(Rk - Rl) - _f2(Rk - Ll) - _f2(Lk - Rl) + _f2(Lk - Ll)) / (hk * hl)
        ck = (_f1(Rk - xl) - _f1(Lk - xl)) / hk
        cl = (_f1(xk - Ll) - _f1(xk - Rl)) / hl
    out = np.where(both, cc, out)
    out = np.where(only_k, ck, out)
    return np.where(only_l, cl, out)


def coulomb_energy(mu: DiscretizedMeasure) -> float:
    """Coulomb energy ``int int log(1/|x - y|) dmu dmu``.

    A node with a positive cell width stands for a uniform mass on its cell.
    Near pairs use the exact cell-to-cell mean of the log kernel (including the
    self-energy ``3/2 - log h`` of a cell); far pairs use node-to-node
    distances.  Pure atoms carry no self-interaction; coincident nodes give
    ``inf``.
    """
    x, w = mu.nodes, mu.weights
    if x.size > 1 and np.min(np.diff(x)) <= NODE_TOL:
        return math.inf
    h = mu.cell_widths if mu.cell_widths is not None else np.zeros_like(x)
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, 1.0)
    K = np.log(d)
    near = d < 8.0 * (h[:, None] + h[None, :])
    np.fill_diagonal(near, False)
    ii, jj = np.nonzero(near)
    K[ii, jj] = _cell_pair_mean_log(x[ii], h[ii], x[jj], h[jj])
    diag = np.zeros_like(x)
    cell = h > 0
    diag[cell] = np.log(h[cell]) - 1.5
    np.fill_diagonal(K, diag)
    return -float(w @ K @ w)


# ---------------------------------------------------------------------------
# equilibrium measure of an interval union
# ---------------------------------------------------------------------------
def _gc_nodes(M: int) -> np.ndarray:
    k = np.arange(1, M + 1)
    return np.cos((2 * k - 1) * np.pi / (2 * M))


@dataclass(frozen=True)
class EquilibriumData:
    """Solved equilibrium problem for an :class:`IntervalUnion`.

    ``residual`` is the largest relative gap integral
    ``|int_gap F| / int_gap |F|`` left after the solve.
    """

    set: IntervalUnion
    gap_zeros: np.ndarray
    capacity: float
    residual: float
    capacity_spread: float = 0.0
    _series: list = field(default_factory=list, repr=False, compare=False)

    # -- pointwise quantities ----------------------------------------------
    def _log_g(self, i: int, x):
        """log of the smooth factor on interval ``i`` (everything but its own endpoints)."""
        x = np.asarray(x, dtype=float)
        ends = self.set.endpoints
        others = np.delete(ends, [2 * i, 2 * i + 1])
        val = np.zeros(x.shape)
        if self.gap_zeros.size:
            val += np.log(np.abs(x[..., None] - self.gap_zeros)).sum(axis=-1)
        if others.size:
            val -= 0.5 * np.log(np.abs(x[..., None] - others)).sum(axis=-1)
        return val

    def _g_of_t(self, i: int, t):
        a, b = self.set.intervals[i]
        x = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(t)
        return np.exp(self._log_g(i, x))

    def density(self, x):
        """Equilibrium density; 0 off ``E`` and ``+inf`` at endpoints."""
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(x_arr.shape)
        for i, (a, b) in enumerate(self.set.intervals):
            inside = (x_arr > a) & (x_arr < b)
            if inside.any():
                xi = x_arr[inside]
                out[inside] = np.exp(self._log_g(i, xi)) / (np.pi * np.sqrt((xi - a) * (b - xi)))
            out[(x_arr == a) | (x_arr == b)] = math.inf
        return out if np.ndim(x) else float(out[0])

    @property
    def series(self):
        """Per-interval Chebyshev series of the smooth factor in the angle variable."""
        if not self._series:
            for i in range(self.set.n_intervals):
                self._series.append(adaptive_chebfit(lambda t, i=i: self._g_of_t(i, t), 0.0, np.pi))
        return self._series

    @cached_property
    def interval_masses(self) -> np.ndarray:
        out = []
        for ser in self.series:
            anti = ser.integ(lbnd=0.0)
            out.append(anti(np.pi) / np.pi)
        return np.array(out)

    @property
    def total_mass(self) -> float:
        return float(self.interval_masses.sum())

    def cdf(self, x):
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros(x_arr.shape)
        cum = 0.0
        for i, ((a, b), ser) in enumerate(zip(self.set.intervals, self.series)):
            out[x_arr >= b] = cum + self.interval_masses[i]
            inside = (x_arr > a) & (x_arr < b)
            if inside.any():
                u = np.clip((0.5 * (a + b) - x_arr[inside]) / (0.5 * (b - a)), -1.0, 1.0)
                t = np.arccos(u)
                out[inside] = cum + ser.integ(lbnd=0.0)(t) / np.pi
            cum += self.interval_masses[i]
        return out if np.ndim(x) else float(out[0])

    def quadrature(self, n_per_interval: int = 32) -> DiscretizedMeasure:
        """Gauss rule for integrals against the equilibrium measure."""
        xs, ws = [], []
        for i, (a, b) in enumerate(self.set.intervals):
            t, w = gauss_legendre(n_per_interval, 0.0, np.pi)
            xs.append(0.5 * (a + b) - 0.5 * (b - a) * np.cos(t))
            ws.append(w * self._g_of_t(i, t) / np.pi)
        return DiscretizedMeasure(np.concatenate(xs), np.concatenate(ws))

    # -- potential ---------------------------------------------------------
    def _interval_potential(self, i: int, z: complex) -> float:
        a, b = self.set.intervals[i]
        m, h = 0.5 * (a + b), 0.5 * (b - a)

        def integrand(t):
            x = m - h * np.cos(t)
            return -self._g_of_t(i, t) * np.log(np.abs(z - x)) / np.pi

        dist = abs(z.imag) if a <= z.real <= b else min(abs(z - a), abs(z - b))
        if dist > 0.5 * h:
            prev = None
            for n in (64, 128, 256, 512):
                t, w = gauss_legendre(n, 0.0, np.pi)
                val = float(np.dot(w, integrand(t)))
                if prev is not None and abs(val - prev) <= 1e-14 * (1.0 + abs(val)):
                    return val
                prev = val
        u = min(max((m - z.real) / h, -1.0), 1.0)
        t0 = math.acos(u)
        if z.imag == 0.0 and 0.0 < t0 < math.pi:
            return self._split_log_integral(i, t0)
        pts = [t0] if 0.0 < t0 < math.pi else None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(lambda t: float(integrand(np.array([t]))[0]), 0.0, math.pi,
                                    points=pts, limit=400, epsabs=1e-15, epsrel=1e-13)
        return val

    def _split_log_integral(self, i: int, t0: float) -> float:
        """Potential of interval ``i`` at an interior point, log singularity factored out."""
        a, b = self.set.intervals[i]
        m, h = 0.5 * (a + b), 0.5 * (b - a)
        x0 = m - h * math.cos(t0)

        def g(t):
            return float(self._g_of_t(i, np.array([t]))[0]) / math.pi

        def regular(t):
            dt = t - t0
            if dt == 0.0:
                ratio = h * math.sin(t0)
            else:
                ratio = abs(m - h * math.cos(t) - x0) / abs(dt)
            return -g(t) * math.log(ratio)

        opts = dict(limit=400, epsabs=1e-15, epsrel=1e-13)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val = integrate.quad(regular, 0.0, math.pi, points=[t0], **opts)[0]
            val -= integrate.quad(g, 0.0, t0, weight="alg-logb", wvar=(0.0, 0.0), **opts)[0]
            val -= integrate.quad(g, t0, math.pi, weight="alg-loga", wvar=(0.0, 0.0), **opts)[0]
        return val

    def potential(self, z):
        """Logarithmic potential of the equilibrium measure at ``z`` (scalar or array)."""
        z_arr = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.array([sum(self._interval_potential(i, complex(zz))
                            for i in range(self.set.n_intervals)) for zz in z_arr.ravel()])
        out = out.reshape(z_arr.shape)
        return out if np.ndim(z) else float(out[0])

    def green(self, z):
        return -np.log(self.capacity) - self.potential(z)


def _gap_geometry(E: IntervalUnion, M: int):
    gaps = np.array(E.gaps)
    gm = 0.5 * (gaps[:, 0] + gaps[:, 1])
    gh = 0.5 * (gaps[:, 1] - gaps[:, 0])
    X = gm[:, None] + gh[:, None] * _gc_nodes(M)[None, :]
    ends = E.endpoints
    logden = np.empty_like(X)
    for j in range(len(gaps)):
        others = np.delete(ends, [2 * j + 1, 2 * j + 2])
        logden[j] = 0.5 * np.log(np.abs(X[j][:, None] - others)).sum(axis=1)
    return X, logden


def _gap_moments(X, logden, xz, want_jac: bool):
    """Per-gap weighted means of x, relative residuals and (optionally) the Jacobian."""
    ell = xz.size
    means = np.empty(ell)
    resid = np.empty(ell)
    C = np.zeros((ell, ell)) if want_jac else None
    for j in range(ell):
        diff = X[j][:, None] - xz[None, :]
        lg = np.log(np.abs(np.delete(diff, j, axis=1))).sum(axis=1) - logden[j]
        p = np.exp(lg - lg.max())
        p /= p.sum()
        means[j] = p @ X[j]
        own = X[j] - xz[j]
        resid[j] = abs(p @ own) / (p @ np.abs(own))
        if want_jac:
            S = -1.0 / diff
            ES = p @ S
            EXS = (p * X[j]) @ S
            C[j] = EXS - means[j] * ES
            C[j, j] = 0.0
    return means, resid, C


def _solve_gap_zeros(E: IntervalUnion, tol: float = 1e-12, max_iter: int = 200):
    gaps = np.array(E.gaps)
    lo, hi = gaps[:, 0], gaps[:, 1]
    xz = 0.5 * (lo + hi)
    M = 64
    X, logden = _gap_geometry(E, M)
    # weighted-mean fixed point; keeps every zero inside its gap
    for _ in range(max_iter):
        means, _, _ = _gap_moments(X, logden, xz, False)
        step = np.max(np.abs(means - xz) / (hi - lo))
        xz = means
        if step < 1e-6:
            break
    resid = np.inf
    while True:
        for it in range(50):
            means, resid_vec, C = _gap_moments(X, logden, xz, True)
            r = xz - means
            resid = float(resid_vec.max())
            if resid < tol and np.max(np.abs(r) / (hi - lo)) < 1e-15:
                break
            try:
                delta = np.linalg.solve(np.eye(xz.size) - C, -r)
            except np.linalg.LinAlgError:
                delta = -r
            lam = 1.0
            while lam > 1e-4:
                trial = xz + lam * delta
                if np.all(trial > lo) and np.all(trial < hi):
                    break
                lam *= 0.5
            xz = np.clip(xz + lam * delta, lo + 1e-15 * (hi - lo), hi - 1e-15 * (hi - lo))
        # quadrature check at doubled resolution
        X2, logden2 = _gap_geometry(E, 2 * M)
        _, resid2, _ = _gap_moments(X2, logden2, xz, False)
        if resid2.max() < max(10 * tol, 1e-11) or M >= 1 << 14:
            resid = max(resid, float(resid2.max()))
            break
        M *= 2
        X, logden = X2, logden2
    return xz, resid


def equilibrium(E: IntervalUnion, tol: float = 1e-12) -> EquilibriumData:
    """Equilibrium measure, gap zeros and capacity of a finite interval union."""
    if E.n_gaps > MAX_GAPS:
        raise ValidationError(f"at most {MAX_GAPS} gaps supported, got {E.n_gaps}")
    if E.n_gaps:
        xz, resid = _solve_gap_zeros(E, tol)
        if not resid <= 1e-9:
            raise SolveFailed("gap-zero solve did not converge", resid)
    else:
        xz, resid = np.zeros(0), 0.0
    data = EquilibriumData(E, xz, 1.0, resid)
    # Frostman: the potential equals log(1/C) on the interior of E
    lengths = np.diff(np.array(E.intervals), axis=1).ravel()
    i = int(np.argmax(lengths))
    a, b = E.intervals[i]
    probes = [0.5 * (a + b), a + 0.25 * (b - a), a + 0.7 * (b - a)]
    vals = [data._interval_potential(i, complex(probes[0]))]
    vals[0] += sum(data._interval_potential(k, complex(probes[0]))
                   for k in range(E.n_intervals) if k != i)
    for x0 in probes[1:]:
        vals.append(float(data.potential(x0)))
    spread = max(vals) - min(vals)
    if spread > 1e-6:
        log.warning("Frostman spread %.3e exceeds 1e-6 for %s", spread, E.intervals)
    cap = 0.25 * (b - a) if E.n_gaps == 0 else math.exp(-vals[0])
    return EquilibriumData(E, xz, cap, resid, spread, data._series)


def capacity(E: IntervalUnion) -> float:
    return equilibrium(E).capacity


def green(E: IntervalUnion, z):
    """Green's function of the complement of ``E`` with pole at infinity."""
    return equilibrium(E).green(z)


# ---------------------------------------------------------------------------
# Bernstein-Walsh and limits of nested sets
# ---------------------------------------------------------------------------
@dataclass
class BernsteinWalshReport:
    norm_on_set: float
    degree: int
    holds: np.ndarray
    ratios: np.ndarray

    @property
    def all_hold(self) -> bool:
        return bool(np.all(self.holds))

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))


def bernstein_walsh_check(coeffs: Sequence[complex], E: IntervalUnion, sample_points,
                          eq: EquilibriumData | None = None) -> BernsteinWalshReport:
    """Check ``|p(z)| <= ||p||_E exp(n G_E(z))`` at the sample points.

    ``coeffs`` are in increasing-degree order.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    n = c.size - 1
    if n < 1:
        raise ValidationError("polynomial degree must be at least 1")
    p = np.polynomial.Polynomial(c)
    eq = eq or equilibrium(E)
    norm, _ = sup_norm_on_set(lambda x: p(x), E, per_interval=max(512, 32 * n))
    z = np.atleast_1d(np.asarray(sample_points, dtype=complex))
    G = np.maximum(np.asarray(eq.green(z), dtype=float), 0.0)
    bound = norm * np.exp(n * G)
    vals = np.abs(p(z))
    ratios = vals / bound
    return BernsteinWalshReport(norm, n, vals <= bound * (1 + 1e-8), ratios)


def ks_between(eq1: EquilibriumData, eq2: EquilibriumData, per_interval: int = 400) -> float:
    """Sup distance between the CDFs of two equilibrium measures."""
    grid = np.unique(np.concatenate([set_grid(eq1.set, per_interval), set_grid(eq2.set, per_interval)]))
    return float(np.max(np.abs(eq1.cdf(grid) - eq2.cdf(grid))))


def equilibrium_limit(E_sequence: Sequence[IntervalUnion]):
    """Capacities and successive weak (KS) distances along a nested sequence."""
    E_sequence = list(E_sequence)
    for k in range(len(E_sequence) - 1):
        if not E_sequence[k + 1].is_subset_of(E_sequence[k]):
            raise NotNested(f"set {k + 1} is not contained in set {k}")
    eqs = [equilibrium(E) for E in E_sequence]
    caps = [e.capacity for e in eqs]
    dists = [ks_between(eqs[k], eqs[k + 1]) for k in range(len(eqs) - 1)]
    return caps, dists


def interval_union(pairs) -> IntervalUnion:
    return normalize(pairs)
