"""Orthogonal polynomials on the unit circle.

Szego recursion ``Phi_{n+1}(z) = z Phi_n(z) - conj(alpha_n) Phi_n^*(z)``,
``Phi_{n+1}^*(z) = Phi_n^*(z) - alpha_n z Phi_n(z)``, zeros by Aberth
iteration, and the Poisson balayage of measures in the disk onto the circle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadSupport, NotApplicable, SolveFailed, Unsupported, ValidationError


@dataclass(frozen=True)
class VerblunskyParams:
    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=complex)
        if a.ndim != 1:
            raise ValidationError("Verblunsky coefficients must be one-dimensional")
        if not np.all(np.isfinite(a)) or np.any(np.abs(a) >= 1):
            raise ValidationError("Verblunsky coefficients must satisfy |alpha| < 1")
        object.__setattr__(self, "alpha", a)

    @property
    def length(self) -> int:
        return int(self.alpha.size)

    @property
    def rho(self) -> np.ndarray:
        return np.sqrt(1.0 - np.abs(self.alpha) ** 2)

    def to_json(self) -> str:
        return json.dumps({"alpha": [[v.real, v.imag] for v in self.alpha]})

    @classmethod
    def from_json(cls, text: str) -> "VerblunskyParams":
        data = json.loads(text)
        if not isinstance(data, dict) or set(data) != {"alpha"}:
            raise ValidationError('expected {"alpha": [[re, im], ...]}')
        vals = []
        for item in data["alpha"]:
            if isinstance(item, (int, float)):
                vals.append(complex(item))
            elif len(item) == 2:
                vals.append(complex(item[0], item[1]))
            else:
                raise ValidationError(f"cannot read coefficient {item!r}")
        return cls(np.array(vals, dtype=complex))


def szego_eval(V: VerblunskyParams, n: int, z):
    """``(Phi_n(z), Phi_n^*(z))`` by the joint forward recursion."""
    if n > V.length:
        raise ValidationError("n exceeds the number of Verblunsky coefficients")
    z = np.asarray(z, dtype=complex)
    phi = np.ones(z.shape, dtype=complex)
    star = np.ones(z.shape, dtype=complex)
    for k in range(n):
        a = V.alpha[k]
        phi, star = z * phi - np.conj(a) * star, star - a * z * phi
    return phi, star


def _szego_with_derivative(alpha, z):
    phi = np.ones(z.shape, dtype=complex)
    star = np.ones(z.shape, dtype=complex)
    dphi = np.zeros(z.shape, dtype=complex)
    dstar = np.zeros(z.shape, dtype=complex)
    for a in alpha:
        ca = np.conj(a)
        new_dphi = phi + z * dphi - ca * dstar
        new_dstar = dstar - a * (phi + z * dphi)
        phi, star = z * phi - ca * star, star - a * z * phi
        dphi, dstar = new_dphi, new_dstar
    return phi, dphi


def monic_coefficients(V: VerblunskyParams, n: int) -> np.ndarray:
    """Coefficients of ``Phi_n`` in increasing degree (leading entry 1)."""
    c = np.ones(1, dtype=complex)
    for k in range(n):
        star = np.conj(c[::-1])
        c = np.concatenate([[0.0], c]) - np.conj(V.alpha[k]) * np.concatenate([star, [0.0]])
    c[-1] = 1.0
    return c


def verblunsky_norm_product(V: VerblunskyParams, n: int) -> float:
    """``(rho_0 ... rho_{n-1})^{1/n}``."""
    if not 1 <= n <= V.length:
        raise ValidationError("need 1 <= n <= number of coefficients")
    return float(np.exp(np.mean(np.log(V.rho[:n]))))


def opuc_zeros(V: VerblunskyParams, n: int, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """Zeros of ``Phi_n`` by Aberth iteration, with values from the recursion."""
    if not 0 <= n <= min(V.length, 128):
        raise ValidationError("need 0 <= n <= min(128, number of coefficients)")
    if n == 0:
        return np.zeros(0, dtype=complex)
    alpha = V.alpha[:n]
    if not np.any(alpha):
        return np.zeros(n, dtype=complex)
    r = max(float(np.exp(np.mean(np.log(V.rho[:n])))), 0.1) * 0.9
    z = r * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    for _ in range(max_iter):
        p, dp = _szego_with_derivative(alpha, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.max(np.abs(w)) <= tol * max(1.0, float(np.max(np.abs(z)))):
            break
    else:
        raise SolveFailed("Aberth iteration did not converge", float(np.max(np.abs(w))))
    outside = np.flatnonzero(np.abs(z) >= 1)
    for i in outside:
        z[i] = _confirm_inside(alpha, z[i])
    return z[np.lexsort((z.imag, z.real))]


def _confirm_inside(alpha, z0, dps: int = 60, steps: int = 30) -> complex:
    """Resolve a zero that rounded onto or past the unit circle.

    Zeros of ``Phi_n`` can sit closer to the circle than double precision
    resolves.  Newton steps at ``dps`` digits decide the side; a zero that is
    inside keeps its angle and moves to a double radius just below 1.
    """
    import mpmath as mp

    with mp.workdps(dps):
        al = [mp.mpc(a.real, a.imag) for a in alpha]
        z = mp.mpc(z0.real, z0.imag)
        for _ in range(steps):
            phi, star, dphi, dstar = mp.mpc(1), mp.mpc(1), mp.mpc(0), mp.mpc(0)
            for a in al:
                ca = mp.conj(a)
                dphi, dstar = phi + z * dphi - ca * dstar, dstar - a * (phi + z * dphi)
                phi, star = z * phi - ca * star, star - a * z * phi
            step = phi / dphi
            z -= step
            if abs(step) < mp.mpf(10) ** (-dps + 10):
                break
        r = abs(z)
        if r >= 1:
            raise SolveFailed("computed zero outside the open unit disk", float(r))
        ang = float(mp.arg(z))
        out = complex(z)
    if np.abs(out) >= 1:
        out = complex(np.exp(1j * ang))
    while np.abs(out) >= 1:
        out *= 1.0 - 1e-15
    return out


def arc_capacity(theta_start: float, theta_end: float) -> float:
    """Capacity of a proper arc of the unit circle (not implemented).

    Only the full circle, of capacity 1, is handled.
    """
    if abs(theta_end - theta_start) >= 2 * np.pi:
        return 1.0
    raise Unsupported("capacity of proper arcs of the unit circle is not implemented")


# ---------------------------------------------------------------------------
# balayage
# ---------------------------------------------------------------------------
def balayage(points, theta_grid: int, weights=None) -> tuple[np.ndarray, np.ndarray]:
    """Poisson sweep ``F(theta) = int (1-|z|^2)/|e^{i theta} - z|^2 dnu(z)``.

    ``nu`` is the probability measure with the given ``weights`` (uniform by
    default) on ``points``.  Returns ``(theta, F)`` on a uniform grid; ``F``
    is a density against ``dtheta / 2 pi``.
    """
    z = np.asarray(points, dtype=complex).ravel()
    if z.size == 0:
        raise ValidationError("balayage needs at least one point")
    if np.any(np.abs(z) >= 1):
        raise BadSupport("balayage points must lie strictly inside the unit disk")
    if theta_grid < 1:
        raise ValidationError("theta_grid must be positive")
    w = np.full(z.size, 1.0 / z.size) if weights is None else np.asarray(weights, float) / np.sum(weights)
    theta = 2 * np.pi * np.arange(theta_grid) / theta_grid
    e = np.exp(1j * theta)
    F = np.zeros(theta_grid)
    for zi, wi in zip(z, w):
        F += wi * (1 - abs(zi) ** 2) / np.abs(e - zi) ** 2
    return theta, F


def circle_moments(F: np.ndarray, k_max: int) -> np.ndarray:
    """``int e^{i k theta} F dtheta / 2 pi`` for ``k = 0..k_max`` by FFT.

    On a uniform grid of ``M`` points the Poisson kernel of a point ``z``
    contributes an aliasing error of order ``|z|^(M - k)``; see
    :func:`moment_grid` for a grid that keeps it below a tolerance.
    """
    return np.fft.ifft(np.asarray(F, dtype=float))[: k_max + 1]


MAX_MOMENT_GRID = 2 ** 24


def moment_grid(points, k_max: int, tol: float = 1e-10) -> int:
    """Smallest power-of-two grid whose aliasing error is below ``tol``."""
    r = float(np.max(np.abs(np.asarray(points, dtype=complex))))
    if r >= 1:
        raise BadSupport("points must lie strictly inside the unit disk")
    need = k_max + 1 if r == 0 else k_max + math.log(tol / 2) / math.log(r)
    M = 1 << max(6, math.ceil(math.log2(max(need, 2))))
    if M > MAX_MOMENT_GRID:
        raise Unsupported(f"points within {1 - r:.1e} of the circle need a grid above {MAX_MOMENT_GRID}")
    return M


def disk_moments(points, k_max: int, weights=None) -> np.ndarray:
    z = np.asarray(points, dtype=complex).ravel()
    w = np.full(z.size, 1.0 / z.size) if weights is None else np.asarray(weights, float) / np.sum(weights)
    return np.array([np.sum(w * z ** k) for k in range(k_max + 1)])


# ---------------------------------------------------------------------------
# Cesaro-Nevai class bound
# ---------------------------------------------------------------------------
@dataclass
class CNReport:
    sup_alpha: float
    L: float
    pointwise_holds: bool
    chain_holds: bool
    n_values: list[int]
    product_roots: list[float]
    cesaro_means: list[float]
    verdict: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def cn_class_check(V: VerblunskyParams, n_values=None) -> CNReport:
    """Check ``-log rho_j <= L(A) |alpha_j|^2`` and its Cesaro averages.

    ``L(A) = -log(1 - A) / (2 A)`` with ``A = sup |alpha_j|``.  The verdict
    compares ``(rho_0 ... rho_{n-1})^{1/n}`` at the largest ``n`` with the
    capacity 1 of the unit circle: ``regular`` within 1%, ``not_regular`` more
    than 5% below, else ``inconclusive``.
    """
    absa = np.abs(V.alpha)
    A = float(absa.max()) if absa.size else 0.0
    if A >= 1:
        raise NotApplicable("sup |alpha| must be below 1")
    L = 0.5 if A == 0 else -math.log1p(-A) / (2 * A)
    neglogrho = -0.5 * np.log1p(-absa ** 2)
    slack = 1e-15
    pointwise = bool(np.all(neglogrho <= L * absa ** 2 * (1 + 1e-12) + slack))
    if n_values is None:
        n_values = sorted({max(1, V.length // 10), max(1, V.length // 3), V.length})
    cum_l = np.cumsum(neglogrho)
    cum_a2 = np.cumsum(absa ** 2)
    cum_a = np.cumsum(absa)
    chain = True
    roots, ces = [], []
    for n in n_values:
        lhs, mid, rhs = cum_l[n - 1] / n, L * cum_a2[n - 1] / n, L * cum_a[n - 1] / n
        chain &= bool(lhs <= mid * (1 + 1e-12) + slack and mid <= rhs * (1 + 1e-12) + slack)
        roots.append(float(math.exp(-lhs)))
        ces.append(float(cum_a[n - 1] / n))
    last = roots[-1]
    verdict = "regular" if last >= 0.99 else ("not_regular" if last < 0.95 else "inconclusive")
    return CNReport(A, L, pointwise, chain, list(n_values), roots, ces, verdict)
