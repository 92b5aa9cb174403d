"""Orthogonal polynomials on the real line.

Jacobi parameters are extracted from discrete measures by Lanczos with full
reorthogonalization.  Zeros of ``P_n`` are eigenvalues of the ``n x n``
truncated Jacobi matrix; they are computed by Sturm-sequence bisection for
moderate ``n`` and by LAPACK for large ``n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from ._numerics import ks_discrete_vs_cdf, logsumexp
from .errors import (
    InconsistentSetClaim,
    NotApplicable,
    RankDeficient,
    ValidationError,
)
from .potential import (
    ACComponent,
    DiscretizedMeasure,
    MeasureSpec,
    discretize,
    equilibrium,
)
from .setgeom import IntervalUnion

BISECTION_MAX_N = 1024
LANCZOS_BREAKDOWN = 1e-13


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class JacobiParams:
    """Recursion coefficients ``a_1, a_2, ...`` (positive) and ``b_1, b_2, ...``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 1 or b.ndim != 1:
            raise ValidationError("Jacobi parameters must be one-dimensional")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValidationError("Jacobi parameters must be finite")
        if np.any(a <= 0):
            raise ValidationError("off-diagonal Jacobi parameters must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def length(self) -> int:
        return int(min(self.a.size, self.b.size))

    @property
    def sup_a(self) -> float:
        return float(self.a.max()) if self.a.size else 0.0

    @property
    def sup_b(self) -> float:
        return float(np.abs(self.b).max()) if self.b.size else 0.0

    def gamma(self, n: int) -> float:
        """``(a_1 ... a_n)^{1/n}``."""
        return float(np.exp(np.mean(np.log(self.a[:n]))))

    def to_json(self) -> str:
        return json.dumps({"a": self.a.tolist(), "b": self.b.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "JacobiParams":
        data = json.loads(text)
        if not isinstance(data, dict) or set(data) != {"a", "b"}:
            raise ValidationError('expected {"a": [...], "b": [...]}')
        return cls(np.array(data["a"], dtype=float), np.array(data["b"], dtype=float))


@dataclass(frozen=True)
class ZeroCountingMeasure:
    points: np.ndarray

    @property
    def n(self) -> int:
        return int(self.points.size)

    def cdf(self, x):
        return np.searchsorted(self.points, np.asarray(x, dtype=float), side="right") / self.n


@dataclass
class RegularityReport:
    n_list: list[int]
    gamma_n: list[float]
    capacity: float
    ks_distance: list[float]
    verdict: str
    margin: float
    extrapolated: float
    fit_ns: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"n": self.n_list, "gamma_n": self.gamma_n, "capacity": self.capacity,
                "ks_distance": self.ks_distance, "verdict": self.verdict,
                "margin": self.margin, "extrapolated_limit": self.extrapolated}


@dataclass(frozen=True)
class AtomicMeasure:
    """Point masses with weights stored as logarithms (weights may underflow)."""

    nodes: np.ndarray
    log_weights: np.ndarray

    @classmethod
    def from_discretized(cls, mu: DiscretizedMeasure) -> "AtomicMeasure":
        return cls(np.asarray(mu.nodes, dtype=float), np.log(np.asarray(mu.weights, dtype=float)))

    def merged(self) -> "AtomicMeasure":
        order = np.argsort(self.nodes, kind="stable")
        x, lw = self.nodes[order], self.log_weights[order]
        ux, start = np.unique(x, return_index=True)
        bounds = list(start) + [x.size]
        lws = [logsumexp(lw[bounds[i]:bounds[i + 1]]) for i in range(ux.size)]
        return AtomicMeasure(ux, np.array(lws))


# ---------------------------------------------------------------------------
# measure -> Jacobi parameters
# ---------------------------------------------------------------------------
def jacobi_from_measure(mu: DiscretizedMeasure, n: int) -> JacobiParams:
    """First ``n`` Jacobi parameters ``a_1..a_n``, ``b_1..b_n`` of ``mu`` (normalized)."""
    x = np.asarray(mu.nodes, dtype=float)
    w = np.asarray(mu.weights, dtype=float)
    if n < 1:
        raise ValidationError("n must be positive")
    if n >= x.size:
        raise RankDeficient(f"need more than {n} nodes, measure has {x.size}")
    Q = np.zeros((x.size, n + 1))
    Q[:, 0] = np.sqrt(w / w.sum())
    a = np.zeros(n)
    b = np.zeros(n)
    prev_a = 0.0
    for k in range(n):
        v = x * Q[:, k]
        b[k] = Q[:, k] @ v
        v -= b[k] * Q[:, k]
        if k > 0:
            v -= prev_a * Q[:, k - 1]
        for _ in range(2):
            v -= Q[:, : k + 1] @ (Q[:, : k + 1].T @ v)
        a[k] = np.linalg.norm(v)
        if a[k] < LANCZOS_BREAKDOWN:
            raise RankDeficient(f"Lanczos breakdown at step {k + 1}")
        Q[:, k + 1] = v / a[k]
        prev_a = a[k]
    return JacobiParams(a, b)


def orthonormal_eval(J: JacobiParams, n: int, z):
    """``p_n(z)`` by the three-term recursion (``p_{-1} = 0``, ``p_0 = 1``)."""
    if n > J.length:
        raise ValidationError("n exceeds the number of Jacobi parameters")
    z = np.asarray(z)
    dtype = complex if np.iscomplexobj(z) else float
    p_prev = np.zeros(z.shape, dtype=dtype)
    p = np.ones(z.shape, dtype=dtype)
    for k in range(n):
        a_prev = J.a[k - 1] if k > 0 else 0.0
        p, p_prev = ((z - J.b[k]) * p - a_prev * p_prev) / J.a[k], p
    return p if p.ndim else p[()]


def orthonormal_table(J: JacobiParams, n: int, x) -> np.ndarray:
    """Rows ``p_0(x), ..., p_n(x)``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((n + 1, x.size))
    out[0] = 1.0
    for k in range(n):
        a_prev = J.a[k - 1] if k > 0 else 0.0
        prev = out[k - 1] if k > 0 else 0.0
        out[k + 1] = ((x - J.b[k]) * out[k] - a_prev * prev) / J.a[k]
    return out


def monic_eval(J: JacobiParams, n: int, z):
    """Monic ``P_n(z)``: ``P_{k+1} = (z - b_{k+1}) P_k - a_k^2 P_{k-1}``."""
    z = np.asarray(z)
    dtype = complex if np.iscomplexobj(z) else float
    p_prev = np.zeros(z.shape, dtype=dtype)
    p = np.ones(z.shape, dtype=dtype)
    for k in range(n):
        a2 = J.a[k - 1] ** 2 if k > 0 else 0.0
        p, p_prev = (z - J.b[k]) * p - a2 * p_prev, p
    return p


# ---------------------------------------------------------------------------
# tridiagonal eigenvalues
# ---------------------------------------------------------------------------
@numba.njit(cache=True)
def _sturm_count(d, e2, x):
    """Number of eigenvalues strictly below ``x``."""
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    for i in range(1, d.size):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_all(d, e2, lo, hi):
    n = d.size
    out = np.empty(n)
    for k in range(n):
        a, b = lo, hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _sturm_count(d, e2, mid) > k:
                b = mid
            else:
                a = mid
        out[k] = 0.5 * (a + b)
    return out


def tridiagonal_eigenvalues(d, e, method: str = "auto") -> np.ndarray:
    """Sorted eigenvalues of the symmetric tridiagonal matrix with diagonal ``d``."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    if d.size == 0:
        return d.copy()
    if method == "auto":
        method = "bisection" if d.size <= BISECTION_MAX_N else "lapack"
    if method == "lapack":
        return np.sort(eigvalsh_tridiagonal(d, e, lapack_driver="stev"))
    if method != "bisection":
        raise ValidationError(f"unknown eigenvalue method {method!r}")
    off = np.zeros(d.size)
    if e.size:
        off[:-1] += np.abs(e)
        off[1:] += np.abs(e)
    lo = float((d - off).min())
    hi = float((d + off).max())
    pad = 1e-12 * max(1.0, abs(lo), abs(hi))
    return _bisect_all(d, e * e, lo - pad, hi + pad)


def zero_counting(J: JacobiParams, n: int, method: str = "auto") -> ZeroCountingMeasure:
    """Zeros of ``P_n`` (eigenvalues of the ``n x n`` truncation), each of mass ``1/n``."""
    if not 1 <= n <= J.length:
        raise ValidationError("n must be between 1 and the number of parameters")
    return ZeroCountingMeasure(tridiagonal_eigenvalues(J.b[:n], J.a[: n - 1], method))


# ---------------------------------------------------------------------------
# regularity
# ---------------------------------------------------------------------------
def _fit_limit(ns: np.ndarray, gammas: np.ndarray) -> float:
    """Extrapolate ``Gamma_n`` by a least-squares fit ``c + d / sqrt(n) + e / n``."""
    if ns.size < 2 or np.ptp(ns) == 0:
        return float(gammas[-1])
    cols = [np.ones_like(ns, dtype=float), 1.0 / np.sqrt(ns)]
    if ns.size >= 8:
        cols.append(1.0 / ns)
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), gammas, rcond=None)
    return float(coef[0])


def regularity_diagnostic(J: JacobiParams, E: IntervalUnion, n_list,
                          regular_tol: float = 0.01, irregular_tol: float = 0.05,
                          ceiling_tol: float = 1e-3) -> RegularityReport:
    """Finite-``n`` regularity verdict for ``J`` relative to the set ``E``.

    ``Gamma_n`` is sampled over the last decade of ``n`` and extrapolated by
    ``c + d / sqrt(n) + e / n``.  The verdict is ``regular`` if ``c`` is within
    ``regular_tol`` of ``C(E)`` (relative), ``not_regular`` if it lies more than
    ``irregular_tol`` below, and ``inconclusive`` otherwise.
    """
    n_list = sorted(int(n) for n in n_list)
    if not n_list or n_list[-1] > J.length:
        raise ValidationError("n_list must be nonempty and within the parameter length")
    eq = equilibrium(E)
    cap = eq.capacity
    cum = np.cumsum(np.log(J.a[: n_list[-1]]))
    gam = lambda n: float(np.exp(cum[n - 1] / n))
    gammas = [gam(n) for n in n_list]
    ks = [ks_discrete_vs_cdf(zc.points, np.ones(n), eq.cdf)
          for n, zc in ((n, zero_counting(J, n)) for n in n_list)]
    n_max = n_list[-1]
    lo = max(1, n_max // 10)
    fit_ns = np.unique(np.geomspace(lo, n_max, 64).astype(int))
    fit_g = np.array([gam(n) for n in fit_ns])
    limit = _fit_limit(fit_ns.astype(float), fit_g)
    if np.all(fit_g > cap * (1 + ceiling_tol)) and limit > cap * (1 + ceiling_tol):
        raise InconsistentSetClaim(
            f"Gamma_n exceeds C(E) = {cap:.6g} persistently (last {fit_g[-1]:.6g}, "
            f"extrapolated {limit:.6g}); E is not the essential support")
    margin = limit / cap - 1.0
    if abs(margin) <= regular_tol:
        verdict = "regular"
    elif margin < -irregular_tol:
        verdict = "not_regular"
    else:
        verdict = "inconclusive"
    return RegularityReport(n_list, gammas, cap, ks, verdict, margin, limit, fit_ns.tolist())


def lower_bound_check(J: JacobiParams, z: complex, n: int, hull: tuple[float, float]) -> dict:
    """Check ``|p_n(z)|^2 >= (d/D)^2 (1 + (d/D)^2)^(n-1)`` for ``z`` outside ``hull``."""
    lo, hi = hull
    c, D = 0.5 * (lo + hi), 0.5 * (hi - lo)
    z = complex(z)
    xr = min(max(z.real, lo), hi)
    d = abs(z - xr)
    if d <= 0 or D <= 0:
        raise NotApplicable("z must lie outside the convex hull")
    r2 = (d / D) ** 2
    bound = r2 * (1 + r2) ** (n - 1)
    value = abs(orthonormal_eval(J, n, np.array(z))) ** 2
    return {"value": float(value), "bound": float(bound), "holds": bool(value >= bound),
            "ratio": float(value / bound), "nonzero": bool(value > 0)}


# ---------------------------------------------------------------------------
# Stahl-Totik scan
# ---------------------------------------------------------------------------
def _as_atomic(mu) -> AtomicMeasure:
    if isinstance(mu, AtomicMeasure):
        return mu.merged()
    return AtomicMeasure.from_discretized(mu).merged()


def window_log_mass(mu, x, radius: float) -> np.ndarray:
    """``log mu([x - radius, x + radius])`` for each ``x``."""
    at = _as_atomic(mu)
    x = np.asarray(x, dtype=float)
    lo = np.searchsorted(at.nodes, x - radius, side="left")
    hi = np.searchsorted(at.nodes, x + radius, side="right")
    return np.array([logsumexp(at.log_weights[i:j]) for i, j in zip(lo, hi)])


def stahl_totik_scan(mu, E: IntervalUnion, m: int, eta: float) -> float:
    """Lebesgue measure of ``{x in E : mu([x - 1/m, x + 1/m]) <= exp(-m eta)}``.

    ``mu`` is a :class:`DiscretizedMeasure` or an :class:`AtomicMeasure`.  The
    set is resolved on cells of width at most ``1/(10 m)``.
    """
    if m < 1 or not eta > 0:
        raise ValidationError("need m >= 1 and eta > 0")
    total = 0.0
    for a, b in E.intervals:
        cells = max(1, math.ceil((b - a) * 10 * m))
        edges = np.linspace(a, b, cells + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        bad = window_log_mass(mu, mids, 1.0 / m) <= -m * eta
        total += float(np.sum(np.diff(edges)[bad]))
    return total


def dyadic_atom_measure(y: float, max_level: int = 12) -> AtomicMeasure:
    """``sum_k y^k delta_{x_k}`` with ``x_k = (k - 2^n) / 2^n`` for ``2^n <= k < 2^(n+1)``."""
    if not 0 < y < 1:
        raise ValidationError("y must be in (0, 1)")
    k = np.arange(1, 2 ** (max_level + 1))
    level = np.floor(np.log2(k)).astype(int)
    x = (k - 2.0 ** level) / 2.0 ** level
    return AtomicMeasure(x, k * math.log(y))


# ---------------------------------------------------------------------------
# example constructors
# ---------------------------------------------------------------------------
def free_jacobi(n_max: int) -> JacobiParams:
    return JacobiParams(np.ones(n_max), np.zeros(n_max))


def sparse_perturbation_jacobi(n_max: int) -> JacobiParams:
    """``a_n = 1/2`` when ``n`` is a perfect square, ``1`` otherwise; ``b = 0``."""
    n = np.arange(1, n_max + 1)
    r = np.round(np.sqrt(n)).astype(int)
    a = np.where(r * r == n, 0.5, 1.0)
    return JacobiParams(a, np.zeros(n_max))


def random_sign_jacobi(n_max: int, seed: int = 0) -> JacobiParams:
    """``a_n = 1/2`` and independent ``b_n = +-1`` with equal probability."""
    rng = np.random.default_rng(seed)
    return JacobiParams(np.full(n_max, 0.5), rng.choice([-1.0, 1.0], size=n_max))


def block_potential_jacobi(n_max: int) -> JacobiParams:
    """``a = 1`` and ``b_j = 1`` for ``k^2 <= j <= k^2 + k``, else ``0``."""
    j = np.arange(1, n_max + 1)
    k = np.floor(np.sqrt(j)).astype(int)
    b = ((j >= k * k) & (j <= k * k + k)).astype(float)
    return JacobiParams(np.ones(n_max), b)


# ---------------------------------------------------------------------------
# pure point measures
# ---------------------------------------------------------------------------
def pure_point_bound(x_list, a_list, n: int) -> float:
    """``d^n (sum_{j > n} a_j)^{1/2}`` with ``d`` the diameter of ``{x_j}``."""
    x = np.asarray(x_list, dtype=float)
    a = np.asarray(a_list, dtype=float)
    if np.any(a <= 0):
        raise ValidationError("weights must be positive")
    d = float(x.max() - x.min())
    tail = float(np.sum(a[n:]))
    return d ** n * math.sqrt(tail) if n > 0 else math.sqrt(tail)


def pure_point_log_bound(x_list, log_a, n: int) -> float:
    """Logarithm of :func:`pure_point_bound` for weights given as logarithms."""
    x = np.asarray(x_list, dtype=float)
    d = float(x.max() - x.min())
    tail = logsumexp(np.asarray(log_a, dtype=float)[n:])
    return (n * math.log(d) if n > 0 else 0.0) + 0.5 * tail


def monic_norms_highprec(x_list, log_a, n_max: int, dps: int | None = None) -> np.ndarray:
    """``log ||P_n||_{L^2(mu)}`` for ``n = 0..n_max`` of ``mu = sum a_j delta_{x_j}``.

    Stieltjes procedure in multiprecision arithmetic, so measures whose weights
    span thousands of orders of magnitude are handled exactly enough.
    """
    import mpmath

    x = np.asarray(x_list, dtype=float)
    la = np.asarray(log_a, dtype=float)
    if n_max >= np.unique(x).size:
        raise RankDeficient("n_max must be below the number of distinct atoms")
    if dps is None:
        dps = int(60 + (la.max() - la.min()) / math.log(10) * 1.2)
    with mpmath.workdps(dps):
        xs = [mpmath.mpf(float(v)) for v in x]
        ws = [mpmath.exp(mpmath.mpf(float(v))) for v in la]
        p_prev = [mpmath.mpf(0)] * len(xs)
        p = [mpmath.mpf(1)] * len(xs)
        norm2 = mpmath.fsum(ws)
        out = [float(mpmath.log(norm2) / 2)]
        norm2_prev = None
        for k in range(n_max):
            bk = mpmath.fsum(w * xi * pi * pi for w, xi, pi in zip(ws, xs, p)) / norm2
            ak2 = norm2 / norm2_prev if norm2_prev is not None else mpmath.mpf(0)
            p_new = [(xi - bk) * pi - ak2 * pq for xi, pi, pq in zip(xs, p, p_prev)]
            p_prev, p = p, p_new
            norm2_prev, norm2 = norm2, mpmath.fsum(w * pi * pi for w, pi in zip(ws, p))
            out.append(float(mpmath.log(norm2) / 2))
    return np.array(out)


def van_der_corput(count: int, base: int = 2) -> np.ndarray:
    out = np.zeros(count)
    for i in range(count):
        k, f, v = i + 1, 1.0 / base, 0.0
        while k:
            v += f * (k % base)
            k //= base
            f /= base
        out[i] = v
    return out


# ---------------------------------------------------------------------------
# regularizing a measure
# ---------------------------------------------------------------------------
def _cell_mass(spec: MeasureSpec, lo: float, hi: float):
    """Restriction of ``spec`` to ``(lo, hi]`` and its mass."""
    atoms = [(x, w) for x, w in spec.point_masses if lo < x <= hi]
    comps = []
    mass = sum(w for _, w in atoms)
    for comp in spec.ac_components:
        a, b = comp.interval
        l, r = max(a, lo), min(b, hi)
        if not r > l:
            continue
        left_sing = comp.flag in ("inverse-sqrt-left", "both") and l == a
        right_sing = comp.flag in ("inverse-sqrt-right", "both") and r == b
        flag = {(False, False): "none", (True, False): "inverse-sqrt-left",
                (False, True): "inverse-sqrt-right", (True, True): "both"}[(left_sing, right_sing)]
        if comp.flag == "sqrt-both":
            flag = "none"
        sub = ACComponent((l, r), comp.density, flag)
        m = discretize(MeasureSpec([], [sub]), 32).total_mass
        if m > 0:
            comps.append(sub)
            mass += m
    return atoms, comps, mass


def regularize_atomic(mu: AtomicMeasure, E: IntervalUnion, n_terms: int) -> AtomicMeasure:
    """Log-weight version of :func:`regularize_measure` for purely atomic measures."""
    if not 1 <= n_terms <= 40:
        raise ValidationError("n_terms must be in [1, 40]")
    at = mu.merged()
    terms = []
    for n in range(1, n_terms + 1):
        cell = np.ceil(at.nodes * n).astype(np.int64)  # atom x lies in ((c-1)/n, c/n]
        out = np.empty_like(at.log_weights)
        for c in np.unique(cell):
            sel = cell == c
            out[sel] = at.log_weights[sel] - logsumexp(at.log_weights[sel])
        terms.append(out - 3.0 * math.log(n))
    lw = np.array([logsumexp(col) for col in np.array(terms).T])
    return AtomicMeasure(at.nodes, lw)


def regularize_measure(spec: MeasureSpec, E: IntervalUnion, n_terms: int) -> MeasureSpec:
    """``eta = sum_{n <= n_terms} n^{-3} mu_n`` with ``mu_n`` the cellwise normalization.

    ``mu_n`` rescales ``mu`` on each cell ``(j/n, (j+1)/n]`` of positive mass to
    unit mass; ``eta`` has the same null sets as ``mu`` and assigns mass at
    least ``n^{-3}`` to every such cell.
    """
    if not 1 <= n_terms <= 40:
        raise ValidationError("n_terms must be in [1, 40]")
    lo, hi = E.hull
    atoms_out: list[tuple[float, float]] = []
    comps_out: list[ACComponent] = []
    for n in range(1, n_terms + 1):
        for j in range(math.floor(lo * n) - 1, math.ceil(hi * n) + 1):
            atoms, comps, mass = _cell_mass(spec, j / n, (j + 1) / n)
            if mass <= 0:
                continue
            scale = n ** -3.0 / mass
            atoms_out.extend((x, w * scale) for x, w in atoms)
            for c in comps:
                comps_out.append(ACComponent(
                    c.interval, (lambda x, f=c.density, s=scale: s * np.asarray(f(x))), c.flag))
    return MeasureSpec(tuple(atoms_out), tuple(comps_out))
