"""Chebyshev polynomials, Fekete sets and the capacity bounds between them.

Chebyshev polynomials on a union of real intervals are computed by a discrete
Remez exchange on a per-interval Chebyshev grid; real sets keep the Haar
property, so the classical ``n + 1`` point alternation still characterizes the
optimum.  Restricted Chebyshev polynomials (all zeros in ``E``) are found by
pinning zeros that fall in gaps to gap endpoints and re-solving a weighted
minimax problem for the remaining factor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import brentq

from ._numerics import chebyshev_lobatto, ks_discrete_vs_cdf, sup_norm_on_set
from .errors import ExchangeStall, SolveFailed, ValidationError
from .potential import EquilibriumData, equilibrium
from .setgeom import IntervalUnion

GRID_FACTOR = 64


# ---------------------------------------------------------------------------
# barycentric minimax machinery
# ---------------------------------------------------------------------------
class _Bary:
    """Monic polynomial of degree ``len(nodes) - 1`` through given values."""

    def __init__(self, nodes, values):
        self.nodes = np.asarray(nodes, dtype=float)
        self.values = np.asarray(values, dtype=float)
        d = self.nodes[:, None] - self.nodes[None, :]
        np.fill_diagonal(d, 1.0)
        self.lam_sign = np.prod(np.sign(d), axis=1)
        self.lam_log = -np.log(np.abs(d)).sum(axis=1)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        shift = self.lam_log.max()
        lam = self.lam_sign * np.exp(self.lam_log - shift)
        diff = x[..., None] - self.nodes
        exact = diff == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            r = lam / diff
            out = (r * self.values).sum(axis=-1) / r.sum(axis=-1)
        hit = exact.any(axis=-1)
        if np.any(hit):
            out = np.where(hit, (exact * self.values).sum(axis=-1), out)
        return out


def _levelled_reference(ref, weight):
    """Solve ``w(x_i) q(x_i) = (-1)^i h`` for monic ``q``; return ``(h, q values)``."""
    d = ref[:, None] - ref[None, :]
    np.fill_diagonal(d, 1.0)
    sign = np.prod(np.sign(d), axis=1)
    logl = -np.log(np.abs(d)).sum(axis=1)
    shift = logl.max()
    alt = (-1.0) ** np.arange(ref.size)
    s = np.sum(alt * sign * np.exp(logl - shift) / weight)
    h = math.exp(-shift) / s
    return h, alt * h / weight


def _new_reference(e: np.ndarray, size: int) -> np.ndarray:
    """Indices of an alternating set of local extrema of ``e`` of length ``size``."""
    s = np.sign(e)
    s[s == 0] = 1
    breaks = np.nonzero(np.diff(s))[0] + 1
    runs = np.split(np.arange(e.size), breaks)
    idx = [r[np.argmax(np.abs(e[r]))] for r in runs]
    while len(idx) > size:
        vals = np.abs(e[idx])
        k = int(np.argmin(vals))
        if k == 0 or k == len(idx) - 1 or len(idx) - size == 1:
            if len(idx) - size == 1 and 0 < k < len(idx) - 1:
                k = 0 if vals[0] < vals[-1] else len(idx) - 1
            del idx[k]
        else:
            nb = k - 1 if vals[k - 1] < vals[k + 1] else k + 1
            for j in sorted((k, nb), reverse=True):
                del idx[j]
    return np.array(idx)


def _remez(grid, weight, m, init_ref, tol=1e-10, max_iter=200):
    """Minimize ``max |weight * q|`` over monic ``q`` of degree ``m`` on ``grid``."""
    ref = np.array(init_ref)
    best = None
    seen = set()
    for _ in range(max_iter):
        h, vals = _levelled_reference(grid[ref], weight[ref])
        q = _Bary(grid[ref], vals)
        e = weight * q(grid)
        emax = float(np.max(np.abs(e)))
        if best is None or emax < best[0]:
            best = (emax, q, ref.copy())
        if emax <= abs(h) * (1 + tol):
            return q, ref, abs(h), emax
        key = tuple(ref)
        if key in seen:
            raise ExchangeStall("Remez exchange revisited a reference", best=best)
        seen.add(key)
        ref = _new_reference(e, m + 1)
        if ref.size < m + 1:
            raise ExchangeStall("not enough alternation points", best=best)
    raise ExchangeStall("Remez exchange did not converge", best=best)


def _grid(E: IntervalUnion, n: int) -> np.ndarray:
    per = GRID_FACTOR * n + 1
    return np.concatenate([chebyshev_lobatto(per, a, b) for a, b in E.intervals])


def _initial_reference(grid, eq: EquilibriumData, size: int) -> np.ndarray:
    F = eq.cdf(grid)
    targets = (np.arange(size) + 0.5) / size
    idx = np.searchsorted(F, targets)
    idx = np.clip(idx, 0, grid.size - 1)
    idx = np.unique(idx)
    # fill up if quantiles collided
    k = 0
    while idx.size < size:
        if k not in idx:
            idx = np.sort(np.append(idx, k))
        k += 1
    return idx


# ---------------------------------------------------------------------------
# Chebyshev polynomials
# ---------------------------------------------------------------------------
@dataclass
class ChebyshevResult:
    degree: int
    coefficients: np.ndarray          # increasing degree, leading entry 1
    sup_norm: float
    equioscillation_points: np.ndarray
    restricted: bool
    roots: np.ndarray = field(default_factory=lambda: np.zeros(0))
    evaluate: object = field(default=None, repr=False)

    def __call__(self, x):
        return self.evaluate(x)


def _power_coefficients(fn, hull, n):
    a, b = hull
    u = np.cos(np.pi * (np.arange(n + 1) + 0.5) / (n + 1))
    x = 0.5 * (a + b) + 0.5 * (b - a) * u
    cheb = C.chebfit(u, fn(x), n)
    # compose with u = (2x - a - b) / (b - a)
    coef = C.cheb2poly(cheb)
    p = np.polynomial.Polynomial(coef, domain=[a, b], window=[-1, 1]).convert()
    c = p.coef
    if c.size < n + 1:
        c = np.concatenate([c, np.zeros(n + 1 - c.size)])
    c[n] = 1.0
    return c[: n + 1]


def _real_roots(fn, hull, n, per_unit=None):
    a, b = hull
    x = chebyshev_lobatto(max(200 * n, 2000), a, b)
    v = fn(x)
    roots = list(x[v == 0])
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    for i in idx:
        try:
            r = brentq(lambda t: float(fn(np.array([t]))[0]), x[i], x[i + 1],
                       xtol=1e-15 * max(1.0, abs(x[i])), maxiter=500)
        except RuntimeError:
            r = 0.5 * (x[i] + x[i + 1])
        roots.append(r)
    return np.sort(np.array(roots))


def _finish(E, n, evaluate, ref_points, restricted, extra_roots=(), free=None):
    norm, _ = sup_norm_on_set(evaluate, E, per_interval=max(512, 16 * n))
    hull = E.hull
    m = n - len(extra_roots)
    free_roots = _real_roots(free or evaluate, hull, m) if m > 0 else np.zeros(0)
    roots = np.sort(np.concatenate([free_roots, np.asarray(extra_roots, dtype=float)]))
    coefs = _power_coefficients(evaluate, hull, n)
    return ChebyshevResult(n, coefs, norm, np.asarray(ref_points), restricted, roots, evaluate)


def _unrestricted(E, n, eq):
    grid = _grid(E, n)
    ref0 = _initial_reference(grid, eq, n + 1)
    q, ref, h, emax = _remez(grid, np.ones(grid.size), n, ref0)
    return q, grid[ref]


def _pinned_solve(E, n, eq, pins):
    """Best ``prod(x - pins) * q(x)`` with ``q`` monic of degree ``n - len(pins)``."""
    pins = np.asarray(sorted(pins), dtype=float)
    m = n - pins.size
    grid = _grid(E, n)
    grid = grid[~np.isin(grid, pins)]
    w = np.prod(np.abs(grid[:, None] - pins[None, :]), axis=1) if pins.size else np.ones(grid.size)
    if m == 0:
        fn = lambda x: np.prod(np.asarray(x)[..., None] - pins, axis=-1)
        return fn, np.zeros(0), None
    ref0 = _initial_reference(grid, eq, m + 1)
    q, ref, _, _ = _remez(grid, w, m, ref0)

    def fn(x, q=q):
        x = np.asarray(x, dtype=float)
        return np.prod(x[..., None] - pins, axis=-1) * q(x)
    return fn, grid[ref], q


def _gap_roots(E, fn):
    """Indices of gaps of ``E`` whose open interior contains a sign change of ``fn``."""
    out = []
    for j, (lo, hi) in enumerate(E.gaps):
        xs = np.linspace(lo, hi, 1025)[1:-1]
        v = np.sign(fn(xs))
        if np.any(v == 0) or np.any(v[1:] != v[:-1]):
            out.append(j)
    return out


def chebyshev(E: IntervalUnion, n: int, restricted: bool = False,
              eq: EquilibriumData | None = None) -> ChebyshevResult:
    """Monic polynomial of degree ``n`` with least sup-norm on ``E``.

    With ``restricted=True`` the zeros are constrained to lie in ``E``.
    """
    if not 1 <= n <= 60:
        raise ValidationError("degree must be in [1, 60]")
    eq = eq or equilibrium(E)
    fn, ref = _unrestricted(E, n, eq)
    if not restricted:
        return _finish(E, n, fn, ref, False)
    bad = _gap_roots(E, fn)
    if not bad:
        return _finish(E, n, fn, ref, True)
    best = None
    pins_done = set()
    frontier = [()]
    rounds = 0
    while frontier and rounds < 6:
        rounds += 1
        new_frontier = []
        for pins in frontier:
            cur_fn = fn if not pins else _pinned_solve(E, n, eq, [E.gaps[g][c] for g, c in pins])[0]
            gaps = _gap_roots(E, cur_fn)
            if pins and not gaps:
                norm, _ = sup_norm_on_set(cur_fn, E, per_interval=max(512, 16 * n))
                if best is None or norm < best[0]:
                    best = (norm, pins)
                continue
            todo = gaps[:6]
            for choice in itertools.product((0, 1), repeat=len(todo)):
                cand = tuple(sorted(pins + tuple(zip(todo, choice))))
                if cand not in pins_done and len(cand) <= n:
                    pins_done.add(cand)
                    new_frontier.append(cand)
        frontier = new_frontier
    if best is None:
        raise SolveFailed("restricted Chebyshev search found no admissible polynomial")
    pins = best[1]
    points = [E.gaps[g][c] for g, c in pins]
    fn_r, ref, q = _pinned_solve(E, n, eq, points)
    return _finish(E, n, fn_r, np.sort(np.concatenate([ref, points])), True,
                   extra_roots=points, free=q)


# ---------------------------------------------------------------------------
# Fekete sets
# ---------------------------------------------------------------------------
@dataclass
class FeketeSet:
    points: np.ndarray
    zeta: float
    grad_norm: float
    occupation: tuple[int, ...] = ()


def log_vandermonde(points) -> float:
    """``sum_{i<j} log|x_i - x_j|``."""
    x = np.asarray(points, dtype=float)
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, 1.0)
    return 0.5 * float(np.log(d).sum())


def fekete_constant(points) -> float:
    """``(prod_{i != j} |x_i - x_j|)^{1/(n(n-1))}`` for the given points."""
    n = len(points)
    return math.exp(2.0 * log_vandermonde(points) / (n * (n - 1)))


def _solve_occupation(E: IntervalUnion, counts, tol=1e-9, max_iter=200):
    lo_list, hi_list, x0 = [], [], []
    for (a, b), c in zip(E.intervals, counts):
        if c == 0:
            continue
        pts = chebyshev_lobatto(c, a, b)
        x0.append(pts)
        lo_list.append(np.full(c, a))
        hi_list.append(np.full(c, b))
    x = np.concatenate(x0)
    lo = np.concatenate(lo_list)
    hi = np.concatenate(hi_list)
    n = x.size
    if n == 1:
        return x, 0.0
    for _ in range(max_iter):
        d = x[:, None] - x[None, :]
        np.fill_diagonal(d, np.inf)
        inv = 1.0 / d
        g = inv.sum(axis=1)
        scale = np.abs(inv).sum(axis=1)
        pinned = ((x <= lo) & (g < 0)) | ((x >= hi) & (g > 0))
        free = ~pinned
        rel = np.abs(g[free]) / scale[free] if free.any() else np.zeros(0)
        if rel.size == 0 or rel.max() <= tol:
            break
        H = inv ** 2
        np.fill_diagonal(H, 0.0)
        H[np.diag_indices(n)] = -H.sum(axis=1)
        Hf = H[np.ix_(free, free)]
        step = np.zeros(n)
        try:
            step[free] = np.linalg.solve(-Hf + 1e-14 * np.eye(Hf.shape[0]) * np.abs(np.diag(Hf)).max(), g[free])
        except np.linalg.LinAlgError:
            step[free] = g[free] / np.abs(np.diag(Hf))
        f0 = log_vandermonde(x)
        t = 1.0
        while t > 1e-12:
            trial = np.clip(x + t * step, lo, hi)
            if np.all(np.diff(trial) > 0) and log_vandermonde(trial) >= f0 - 1e-15 * abs(f0):
                break
            t *= 0.5
        x = trial
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, np.inf)
    inv = 1.0 / d
    g = inv.sum(axis=1)
    scale = np.abs(inv).sum(axis=1)
    pinned = ((x <= lo) & (g <= 0)) | ((x >= hi) & (g >= 0))
    res = float(np.max(np.abs(g[~pinned]) / scale[~pinned])) if (~pinned).any() else 0.0
    return x, res


def _initial_counts(E, n, eq, mode):
    mass = eq.interval_masses * n
    if mode == "round":
        base = np.floor(mass).astype(int)
        rem = n - base.sum()
        order = np.argsort(-(mass - base), kind="stable")
        base[order[:rem]] += 1
    elif mode == "floor":
        base = np.maximum(np.floor(mass).astype(int), 0)
        base[int(np.argmax(mass))] += n - base.sum()
    else:
        base = np.ceil(mass).astype(int)
        while base.sum() > n:
            base[int(np.argmax(base - mass))] -= 1
    return tuple(int(v) for v in base)


MOVE_CANDIDATES = 8


def _ranked_moves(E: IntervalUnion, counts, x) -> list[tuple[int, int]]:
    """Occupation moves ``(from, to)`` ordered by their first-order gain.

    The estimate removes the point of component ``from`` with the smallest
    log-distance sum and inserts the best grid point of component ``to``
    with all other points frozen; relaxing the positions afterwards can only
    increase the gain.
    """
    comp = np.repeat(np.arange(len(counts)), counts)
    d = np.abs(x[:, None] - x[None, :])
    np.fill_diagonal(d, 1.0)
    contrib = np.log(d).sum(axis=1)
    grids = [chebyshev_lobatto(65, a, b) for a, b in E.intervals]
    with np.errstate(divide="ignore"):
        U = [np.log(np.abs(g[:, None] - x[None, :])).sum(axis=1) for g in grids]
    est = []
    for i in range(len(counts)):
        if counts[i] == 0:
            continue
        members = np.nonzero(comp == i)[0]
        p = members[np.argmin(contrib[members])]
        for j in range(len(counts)):
            if j == i:
                continue
            with np.errstate(divide="ignore"):
                gain = np.max(U[j] - np.log(np.abs(grids[j] - x[p]))) - contrib[p]
            est.append((-gain, i, j))
    est.sort()
    return [(i, j) for _, i, j in est]


def fekete(E: IntervalUnion, n: int, eq: EquilibriumData | None = None,
           start: tuple[int, ...] | None = None) -> FeketeSet:
    """``n`` points of ``E`` maximizing the product of mutual distances.

    For each occupation vector (points per component) the log-distance sum is
    concave in the positions, so projected Newton finds its maximizer.  The
    occupation itself is improved by a deterministic local search over
    single-point moves ranked by a frozen-position gain estimate, started from the rounded equilibrium masses (and from
    ``start`` when given).
    """
    if not 2 <= n <= 200:
        raise ValidationError("n must be in [2, 200]")
    eq = eq or equilibrium(E)
    k = E.n_intervals
    cache: dict[tuple, tuple] = {}

    def evaluate(counts):
        if counts not in cache:
            x, res = _solve_occupation(E, counts)
            cache[counts] = (log_vandermonde(x), x, res)
        return cache[counts]

    starts = [] if start is None else [tuple(start)]
    for mode in ("round", "floor", "ceil"):
        c = _initial_counts(E, n, eq, mode)
        if c not in starts:
            starts.append(c)
    if start is not None:
        starts = starts[:2]

    best = None
    for counts in starts:
        val = evaluate(counts)[0]
        improved = True
        while improved:
            improved = False
            for i, j in _ranked_moves(E, counts, evaluate(counts)[1])[:MOVE_CANDIDATES]:
                cand = list(counts)
                cand[i] -= 1
                cand[j] += 1
                cand = tuple(cand)
                v = evaluate(cand)[0]
                if v > val + 1e-13 * abs(val):
                    counts, val, improved = cand, v, True
                    break
        tol = 1e-13 * abs(val)
        if best is None or val > best[0] + tol or (
                abs(val - best[0]) <= tol and
                tuple(evaluate(counts)[1]) < tuple(evaluate(best[1])[1])):
            best = (val, counts)
    counts = best[1]
    _, x, res = evaluate(counts)
    if res > 1e-9:
        raise SolveFailed("Fekete electrostatic residual too large", res)
    return FeketeSet(x, fekete_constant(x), res, counts)


def transfinite_diameter(E: IntervalUnion, n_max: int, n_min: int = 2) -> list[float]:
    """Fekete constants ``zeta_n`` for ``n = n_min .. n_max``.

    Each occupation search is warm-started from the previous optimum with one
    point added to the component of largest equilibrium-mass deficit.
    """
    if n_max > 200:
        raise ValidationError("n_max must be at most 200")
    eq = equilibrium(E)
    out = []
    prev = None
    for n in range(n_min, n_max + 1):
        start = None
        if prev is not None:
            deficit = eq.interval_masses * n - np.array(prev)
            c = list(prev)
            c[int(np.argmax(deficit))] += 1
            start = tuple(c)
        f = fekete(E, n, eq, start)
        prev = f.occupation
        out.append(f.zeta)
    return out


def extrapolate_transfinite(ns, zetas, tail: int = 20) -> float:
    """Limit estimate from the tail of ``zeta_n``.

    Least-squares fit of ``log zeta_n = c + d log(n)/n + e/n``.
    """
    ns = np.asarray(ns, dtype=float)[-tail:]
    z = np.log(np.asarray(zetas, dtype=float)[-tail:])
    A = np.column_stack([np.ones_like(ns), np.log(ns) / ns, 1.0 / ns])
    coef, *_ = np.linalg.lstsq(A, z, rcond=None)
    return float(math.exp(coef[0]))


def fekete_polynomial_norms(E: IntervalUnion, points) -> tuple[np.ndarray, np.ndarray]:
    """Sup norms of ``P_k = prod_{j != k}(x - z_j)`` on ``E`` and the products ``prod |z_k - z_j|``."""
    z = np.asarray(points, dtype=float)
    norms, prods = [], []
    for k in range(z.size):
        others = np.delete(z, k)
        fn = lambda x, o=others: np.prod(np.asarray(x)[..., None] - o, axis=-1)
        norms.append(sup_norm_on_set(fn, E, per_interval=max(512, 16 * z.size))[0])
        prods.append(float(np.prod(np.abs(z[k] - others))))
    return np.array(norms), np.array(prods)


# ---------------------------------------------------------------------------
# bound chain and Fekete counting measures
# ---------------------------------------------------------------------------
@dataclass
class BoundsChain:
    degree: int
    capacity: float
    cheb_root: float
    restricted_root: float
    zeta_next: float
    slack: float = 1e-6

    @property
    def values(self) -> list[float]:
        return [self.capacity, self.cheb_root, self.restricted_root, self.zeta_next]

    @property
    def holds(self) -> bool:
        v = self.values
        return all(v[i] <= v[i + 1] * (1 + self.slack) for i in range(3))

    def as_dict(self) -> dict:
        return {"degree": self.degree, "capacity": self.capacity,
                "chebyshev_norm_root": self.cheb_root,
                "restricted_norm_root": self.restricted_root,
                "zeta_next": self.zeta_next, "holds": self.holds, "slack": self.slack}


def bounds_chain(E: IntervalUnion, n: int, eq: EquilibriumData | None = None) -> BoundsChain:
    eq = eq or equilibrium(E)
    t = chebyshev(E, n, False, eq)
    tr = chebyshev(E, n, True, eq)
    z = fekete(E, n + 1, eq)
    return BoundsChain(n, eq.capacity, t.sup_norm ** (1 / n), tr.sup_norm ** (1 / n), z.zeta)


def fekete_counting_convergence(E: IntervalUnion, n_list) -> list[float]:
    """KS distance between the uniform measure on an ``n``-point Fekete set and ``rho_E``."""
    eq = equilibrium(E)
    out = []
    for n in n_list:
        pts = fekete(E, n, eq).points
        out.append(ks_discrete_vs_cdf(pts, np.ones(pts.size), eq.cdf))
    return out
