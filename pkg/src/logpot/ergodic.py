"""Ergodic families of Jacobi matrices and rotation-invariant OPUC.

Coefficient samplers, renormalized transfer-matrix products for the Lyapunov
exponent, the density of states of finite truncations, and checks of the
Thouless formula ``gamma(z) = -log A + int log|z - x| dnu(x)`` and of the
regularity identity ``Gamma = C(E) exp(-int gamma d rho_E)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy import integrate, stats

from .errors import BadLaw, NumericalFailure, ValidationError
from .oprl import JacobiParams, tridiagonal_eigenvalues
from .opuc import VerblunskyParams, opuc_zeros
from .potential import DiscretizedMeasure, equilibrium
from .setgeom import IntervalUnion, normalize

KINDS = ("free", "anderson", "almost_mathieu", "decaying_random", "rotation_opuc", "custom")
GOLDEN_FREQUENCY = math.pi * (math.sqrt(5.0) - 1.0)
RENORMALIZE_EVERY = 32
DEFAULT_EPS = 1e-4
MAX_SAMPLE_LENGTH = 10 ** 7

_DEFAULTS = {
    "free": {},
    "anderson": {"a": 1.0, "coupling": (-1.0, 1.0)},
    "almost_mathieu": {"lam": 4.0, "freq": GOLDEN_FREQUENCY, "theta": 0.0},
    "decaying_random": {"lam": 1.0, "gamma": 0.6},
    "rotation_opuc": {"radius": 0.5},
    "custom": {"sampler": None},
}


@dataclass(frozen=True)
class ErgodicFamily:
    """A stationary family ``a_n = A(T^n w)``, ``b_n = B(T^n w)``.

    ``kind`` selects a sampler; ``parameters`` override its defaults:

    * ``anderson``: ``a`` (constant) and ``coupling = (lo, hi)``, with ``b_n``
      independent and uniform on ``[lo, hi]``;
    * ``almost_mathieu``: ``b_n = lam cos(n freq + theta)``, ``a = 1``;
      sample ``s`` of ``n_samples`` uses phase ``theta + 2 pi s / n_samples``;
    * ``decaying_random``: ``b_n = lam n^(-gamma) u_n`` with ``u_n`` uniform on
      ``[-1, 1]``;
    * ``rotation_opuc``: Verblunsky coefficients uniform on the disk of the
      given ``radius``;
    * ``custom``: ``sampler(n, rng) -> (a, b)``.
    """

    kind: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown family kind {self.kind!r}")
        unknown = set(self.parameters) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ValidationError(f"unknown parameters for {self.kind}: {sorted(unknown)}")
        merged = {**_DEFAULTS[self.kind], **self.parameters}
        if self.kind == "anderson":
            lo, hi = merged["coupling"]
            if not lo <= hi or merged["a"] <= 0:
                raise ValidationError("anderson needs a > 0 and lo <= hi")
        if self.kind == "rotation_opuc" and not 0 <= merged["radius"] < 1:
            raise BadLaw("rotation_opuc radius must lie in [0, 1)")
        if self.kind == "custom" and not callable(merged["sampler"]):
            raise ValidationError("custom family needs a callable sampler")
        object.__setattr__(self, "parameters", merged)
        object.__setattr__(self, "seed", int(self.seed) & (2 ** 64 - 1))

    def rng(self, sample_index: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, int(sample_index)])

    @property
    def bounds(self) -> dict:
        """Recorded bounds ``(inf a, sup a, sup |b|)`` where the sampler fixes them."""
        p = self.parameters
        if self.kind == "free":
            return {"a": (1.0, 1.0), "b": 0.0}
        if self.kind == "anderson":
            return {"a": (p["a"], p["a"]), "b": max(abs(c) for c in p["coupling"])}
        if self.kind == "almost_mathieu":
            return {"a": (1.0, 1.0), "b": abs(p["lam"])}
        if self.kind == "decaying_random":
            return {"a": (1.0, 1.0), "b": abs(p["lam"])}
        return {}


def free_family() -> ErgodicFamily:
    return ErgodicFamily("free")


def sample(family: ErgodicFamily, n: int, sample_index: int = 0, n_samples: int = 1) -> JacobiParams:
    """The first ``n`` coefficients ``a_1..a_n``, ``b_1..b_n`` of one sample."""
    if not 1 <= n <= MAX_SAMPLE_LENGTH:
        raise ValidationError(f"n must be between 1 and {MAX_SAMPLE_LENGTH}")
    p = family.parameters
    k = np.arange(1, n + 1, dtype=float)
    ones = np.ones(n)
    if family.kind == "free":
        return JacobiParams(ones, np.zeros(n))
    if family.kind == "anderson":
        lo, hi = p["coupling"]
        b = np.zeros(n) if lo == hi == 0 else family.rng(sample_index).uniform(lo, hi, n)
        return JacobiParams(np.full(n, float(p["a"])), b)
    if family.kind == "almost_mathieu":
        theta = p["theta"] + 2 * math.pi * sample_index / max(n_samples, 1)
        return JacobiParams(ones, p["lam"] * np.cos(k * p["freq"] + theta))
    if family.kind == "decaying_random":
        u = family.rng(sample_index).uniform(-1.0, 1.0, n)
        return JacobiParams(ones, p["lam"] * k ** (-p["gamma"]) * u)
    if family.kind == "custom":
        a, b = p["sampler"](n, family.rng(sample_index))
        return JacobiParams(np.asarray(a, float)[:n], np.asarray(b, float)[:n])
    raise ValidationError("rotation_opuc families sample Verblunsky coefficients; use sample_verblunsky")


def sample_verblunsky(family: ErgodicFamily, n: int, sample_index: int = 0) -> VerblunskyParams:
    """Independent coefficients uniform on the disk of radius ``radius``."""
    if family.kind != "rotation_opuc":
        raise ValidationError("sample_verblunsky needs a rotation_opuc family")
    rng = family.rng(sample_index)
    r = family.parameters["radius"] * np.sqrt(rng.uniform(0, 1, n))
    return VerblunskyParams(r * np.exp(2j * np.pi * rng.uniform(0, 1, n)))


# ---------------------------------------------------------------------------
# transfer matrices
# ---------------------------------------------------------------------------
@njit(cache=True)
def _log_norm_product(z, a, b, every):
    """``log ||T_n ... T_1||`` for ``T_k = [[(z - b_k)/a_k, -a_{k-1}/a_k], [1, 0]]``, ``a_0 = 1``."""
    m00, m01, m10, m11 = 1.0 + 0j, 0j, 0j, 1.0 + 0j
    acc = 0.0
    prev = 1.0
    for k in range(a.size):
        t00 = (z - b[k]) / a[k]
        t01 = -prev / a[k]
        prev = a[k]
        n00 = t00 * m00 + t01 * m10
        n01 = t00 * m01 + t01 * m11
        m10, m11 = m00, m01
        m00, m01 = n00, n01
        if (k + 1) % every == 0:
            s = max(abs(m00), abs(m01), abs(m10), abs(m11))
            if not (s > 0.0 and s < 1e300):
                return np.nan
            acc += math.log(s)
            m00 /= s
            m01 /= s
            m10 /= s
            m11 /= s
    # spectral norm of the remaining 2 x 2 factor
    fro2 = abs(m00) ** 2 + abs(m01) ** 2 + abs(m10) ** 2 + abs(m11) ** 2
    det = abs(m00 * m11 - m01 * m10)
    disc = max(fro2 * fro2 - 4.0 * det * det, 0.0)
    s2 = 0.5 * (fro2 + math.sqrt(disc))
    if not (s2 > 0.0 and s2 < 1e300):
        return np.nan
    return acc + 0.5 * math.log(s2)


@njit(cache=True)
def _log_norm_many(zs, a, b, every):
    out = np.empty(zs.size)
    for i in range(zs.size):
        out[i] = _log_norm_product(zs[i], a, b, every)
    return out


@dataclass(frozen=True)
class TransferChain:
    z: complex
    n: int
    log_norm: float


def _shift(z, eps: float):
    z = np.asarray(z, dtype=complex)
    return np.where(z.imag == 0, z + 1j * eps, z)


def transfer_chain(J: JacobiParams, z: complex, n: int | None = None) -> TransferChain:
    n = J.length if n is None else n
    val = _log_norm_product(complex(z), J.a[:n], J.b[:n], RENORMALIZE_EVERY)
    if not np.isfinite(val):
        raise NumericalFailure("transfer-matrix product overflowed despite renormalization")
    return TransferChain(complex(z), n, float(val))


def lyapunov_many(family: ErgodicFamily, zs, n: int, n_samples: int, eps: float = DEFAULT_EPS):
    """Per-sample estimates ``(1/n) log ||T_n(z)||``, shape ``(n_samples, len(zs))``.

    Real ``z`` are moved to ``z + i eps``.
    """
    if n < 1 or n_samples < 1:
        raise ValidationError("need n >= 1 and n_samples >= 1")
    zs = _shift(np.atleast_1d(zs), eps).astype(complex)
    out = np.empty((n_samples, zs.size))
    for s in range(n_samples):
        J = sample(family, n, s, n_samples)
        out[s] = _log_norm_many(zs, J.a, J.b, RENORMALIZE_EVERY) / n
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("transfer-matrix product overflowed despite renormalization")
    return out


def _mean_stderr(vals) -> tuple[float, float]:
    vals = np.asarray(vals, dtype=float)
    se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return float(vals.mean()), se


def lyapunov(family: ErgodicFamily, z: complex, n: int, n_samples: int,
             eps: float = DEFAULT_EPS) -> tuple[float, float]:
    """``(gamma_hat, stderr)``: mean over samples of ``(1/n) log ||T_n(z)||``."""
    if n < 1000:
        raise ValidationError("lyapunov needs n >= 1000")
    return _mean_stderr(lyapunov_many(family, [z], n, n_samples, eps)[:, 0])


# ---------------------------------------------------------------------------
# density of states
# ---------------------------------------------------------------------------
def density_of_states(family: ErgodicFamily, n: int, n_samples: int) -> DiscretizedMeasure:
    """Pooled eigenvalues of ``n x n`` truncations, each of mass ``1/(n n_samples)``."""
    if n < 100 or n_samples < 1:
        raise ValidationError("density_of_states needs n >= 100 and n_samples >= 1")
    eig = []
    for s in range(n_samples):
        J = sample(family, n, s, n_samples)
        eig.append(tridiagonal_eigenvalues(J.b[:n], J.a[: n - 1]))
    x = np.sort(np.concatenate(eig))
    return DiscretizedMeasure(x, np.full(x.size, 1.0 / x.size))


def geometric_mean_a(family: ErgodicFamily, n: int, n_samples: int) -> float:
    logs = [np.mean(np.log(sample(family, n, s, n_samples).a)) for s in range(n_samples)]
    return float(np.exp(np.mean(logs)))


def dos_log_potential(dos: DiscretizedMeasure, z) -> np.ndarray:
    """``int log|z - x| dnu(x)`` for the empirical measure."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return np.array([np.sum(dos.weights * np.log(np.abs(zi - dos.nodes))) for zi in z])


def dos_support(dos: DiscretizedMeasure, gap: float) -> IntervalUnion:
    """Merge eigenvalues into intervals wherever consecutive gaps are below ``gap``."""
    x = np.sort(dos.nodes)
    breaks = np.flatnonzero(np.diff(x) >= gap)
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks, [x.size - 1]])
    pairs = [(x[s], x[e]) for s, e in zip(starts, ends)]
    pad = 0.5 * gap
    return normalize([(lo - pad, hi + pad) for lo, hi in pairs])


# ---------------------------------------------------------------------------
# Thouless formula and the regularity identity
# ---------------------------------------------------------------------------
@dataclass
class ThoulessReport:
    z: list[complex]
    gamma_hat: list[float]
    stderr: list[float]
    log_inv_A: float
    potential: list[float]
    residuals: list[float]

    @property
    def max_residual(self) -> float:
        return float(max(self.residuals))

    def as_dict(self) -> dict:
        return {"z": [[c.real, c.imag] for c in self.z], "gamma_hat": self.gamma_hat,
                "stderr": self.stderr, "log_inv_A": self.log_inv_A,
                "potential": self.potential, "residuals": self.residuals,
                "max_residual": self.max_residual}


def thouless_check(family: ErgodicFamily, z_list, n: int, n_samples: int = 1,
                   dos_n: int | None = None, eps: float = DEFAULT_EPS) -> ThoulessReport:
    """Compare ``gamma_hat(z)`` with ``-log A_hat + int log|z - x| dnu_hat``.

    ``A_hat`` is the geometric mean of the sampled ``a`` and ``nu_hat`` the
    empirical density of states at size ``dos_n`` (default ``n``).
    """
    zs = [complex(z) for z in z_list]
    g = lyapunov_many(family, zs, n, n_samples, eps)
    means, ses = zip(*(_mean_stderr(g[:, i]) for i in range(len(zs))))
    dos = density_of_states(family, dos_n or n, n_samples)
    A = geometric_mean_a(family, n, n_samples)
    log_inv_A = 0.0 if A == 1.0 else -math.log(A)
    pot = dos_log_potential(dos, _shift(np.array(zs), eps))
    res = [abs(m - log_inv_A - p) for m, p in zip(means, pot)]
    return ThoulessReport(zs, list(means), list(ses), log_inv_A, pot.tolist(), res)


@dataclass
class RegularityIdentityReport:
    gamma_n: float
    capacity: float
    integral: float
    rhs: float
    residual: float
    nodes: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def regularity_identity_check(family: ErgodicFamily, E: IntervalUnion, n: int, n_samples: int = 1,
                              nodes_per_interval: int = 16,
                              eps: float = DEFAULT_EPS) -> RegularityIdentityReport:
    """``|Gamma_n - C(E) exp(-int gamma_hat d rho_E)|``.

    The integral uses the Gauss quadrature of the equilibrium measure of ``E``
    with ``gamma_hat`` evaluated at ``x + i eps``.
    """
    eq = equilibrium(E)
    q = eq.quadrature(nodes_per_interval)
    g = lyapunov_many(family, q.nodes, n, n_samples, eps).mean(axis=0)
    integral = float(np.sum(q.weights * g) / np.sum(q.weights))
    gamma_n = geometric_mean_a(family, n, n_samples)
    rhs = eq.capacity * math.exp(-integral)
    return RegularityIdentityReport(gamma_n, eq.capacity, integral, rhs, abs(gamma_n - rhs), q.nodes.size)


# ---------------------------------------------------------------------------
# almost Mathieu spectrum from periodic approximants
# ---------------------------------------------------------------------------
def fibonacci_approximant(level: int) -> tuple[int, int]:
    """``(F_{k-1}, F_k)`` with ``F_{k-1}/F_k -> (sqrt 5 - 1)/2``."""
    p, q = 1, 1
    for _ in range(level):
        p, q = q, p + q
    return p, q


def _periodic_bands(b: np.ndarray) -> np.ndarray:
    """Band edges of the ``q``-periodic operator with ``a = 1`` and diagonal ``b``."""
    q = b.size
    out = []
    for corner in (1.0, -1.0):
        H = np.diag(b) + np.diag(np.ones(q - 1), 1) + np.diag(np.ones(q - 1), -1)
        H[0, -1] += corner
        H[-1, 0] += corner
        out.append(np.linalg.eigvalsh(H))
    return np.sort(np.concatenate(out)).reshape(q, 2)


def almost_mathieu_spectrum(lam: float, level: int = 12, min_gap: float = 1e-4) -> IntervalUnion:
    """Union over phases of the spectra of a Fibonacci periodic approximant.

    For ``b_n = lam cos(2 pi p n / q + theta)`` the discriminant is
    ``D(E) - 2 (lam/2)^q cos(q theta)``, so the union over ``theta`` is
    ``{|D| <= 2 + 2 (lam/2)^q}``; its ``j``-th band is the hull of the
    ``j``-th bands at ``theta = 0`` and ``theta = pi / q``.  Its capacity is
    ``(1 + (lam/2)^q)^(1/q)``.  Gaps narrower than ``min_gap`` are closed.
    """
    p, q = fibonacci_approximant(level)
    n = np.arange(q)
    b0 = lam * np.cos(2 * np.pi * p * n / q)
    b1 = lam * np.cos(2 * np.pi * p * n / q + np.pi / q)
    e0, e1 = _periodic_bands(b0), _periodic_bands(b1)
    lo = np.minimum(e0[:, 0], e1[:, 0])
    hi = np.maximum(e0[:, 1], e1[:, 1])
    return close_gaps(normalize(list(zip(lo, hi))), min_gap)


def close_gaps(E: IntervalUnion, min_gap: float) -> IntervalUnion:
    """Merge neighbouring intervals separated by less than ``min_gap``."""
    merged = [list(E.intervals[0])]
    for lo, hi in E.intervals[1:]:
        if lo - merged[-1][1] < min_gap:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return normalize(merged)


def almost_mathieu_capacity_oracle(lam: float, level: int) -> float:
    q = fibonacci_approximant(level)[1]
    lp = abs(lam) / 2
    return math.exp((q * math.log(lp) + math.log1p(lp ** -q)) / q) if lp > 1 else (1 + lp ** q) ** (1 / q)


# ---------------------------------------------------------------------------
# rotation-invariant OPUC
# ---------------------------------------------------------------------------
@dataclass
class RotationOPUCReport:
    n: int
    n_samples: int
    product_root: float
    stderr: float
    oracle: float
    corrected_oracle: float
    deviation_in_stderr: float
    corrected_deviation_in_stderr: float
    angle_ks: float

    @property
    def matches_oracle(self) -> bool:
        return self.deviation_in_stderr <= 3.0

    @property
    def matches_corrected(self) -> bool:
        return self.corrected_deviation_in_stderr <= 3.0

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["matches_oracle"] = self.matches_oracle
        d["matches_corrected"] = self.matches_corrected
        return d


def radial_log_expectation(radius: float) -> float:
    """``int log(1 - |z|^2) d sigma_0`` for ``sigma_0`` uniform on the disk of the given radius."""
    if not 0 <= radius < 1:
        raise BadLaw("law must put no mass on |z| >= 1")
    if radius == 0:
        return 0.0
    val, _ = integrate.quad(lambda r: math.log1p(-r * r) * 2 * r / radius ** 2, 0, radius,
                            epsabs=1e-14, epsrel=1e-13)
    return float(val)


def rotation_opuc_check(radius: float, n: int, n_samples: int, seed: int = 0) -> RotationOPUCReport:
    """Sample ``alpha_j`` uniform on ``|z| <= radius`` and compare limits.

    ``oracle`` is ``exp(int log(1 - |z|^2) d sigma_0)`` as stated for this
    example; ``corrected_oracle`` is ``exp((1/2) int log(1 - |z|^2) d sigma_0)``,
    the law-of-large-numbers limit of ``(rho_0 ... rho_{n-1})^{1/n}`` with
    ``rho_j = (1 - |alpha_j|^2)^{1/2}``.  The zero angles of ``Phi_n`` pooled
    over samples are compared with the uniform law by a KS distance.
    """
    fam = ErgodicFamily("rotation_opuc", {"radius": radius}, seed)
    if n < 1 or n_samples < 1:
        raise ValidationError("need n >= 1 and n_samples >= 1")
    logs, angles = [], []
    for s in range(n_samples):
        V = sample_verblunsky(fam, n, s)
        logs.append(np.mean(np.log(V.rho)))
        if radius > 0 and n <= 128:
            angles.append(np.angle(opuc_zeros(V, n)))
    m, se = _mean_stderr(logs)
    prod = math.exp(m)
    se_prod = prod * se
    integral = radial_log_expectation(radius)
    oracle, corrected = math.exp(integral), math.exp(0.5 * integral)
    scale = se_prod if se_prod > 0 else float("inf")
    dev = 0.0 if prod == oracle else abs(prod - oracle) / scale
    cdev = 0.0 if prod == corrected else abs(prod - corrected) / scale
    if angles:
        u = np.mod(np.concatenate(angles), 2 * np.pi) / (2 * np.pi)
        ks = float(stats.kstest(u, "uniform").statistic)
    else:
        ks = float("nan")
    return RotationOPUCReport(n, n_samples, prod, se_prod, oracle, corrected, dev, cdev, ks)
