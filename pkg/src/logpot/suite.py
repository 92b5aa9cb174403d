"""Scripted experiment suites.

``acceptance`` runs the numbered acceptance criteria, each with its own
tolerance and runtime limit; ``regression`` recomputes a fixed set of
quantities and compares them byte for byte with the checked-in golden file.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

import numpy as np

from ._numerics import arcsine_cdf, ks_discrete_vs_cdf
from .chebfek import bounds_chain, chebyshev, extrapolate_transfinite, fekete, transfinite_diameter
from .ergodic import (
    ErgodicFamily,
    almost_mathieu_spectrum,
    density_of_states,
    dos_support,
    free_family,
    lyapunov_many,
    regularity_identity_check,
    rotation_opuc_check,
    thouless_check,
)
from .oprl import (
    block_potential_jacobi,
    dyadic_atom_measure,
    free_jacobi,
    jacobi_from_measure,
    monic_norms_highprec,
    pure_point_log_bound,
    random_sign_jacobi,
    regularity_diagnostic,
    sparse_perturbation_jacobi,
    stahl_totik_scan,
    van_der_corput,
    zero_counting,
)
from .opuc import VerblunskyParams, balayage, circle_moments, disk_moments, moment_grid, opuc_zeros
from .potential import (
    MeasureSpec,
    arcsine_spec,
    capacity,
    discretize,
    equilibrium,
    semicircle_spec,
)
from .setgeom import cantor_approximant, lebesgue, normalize


@dataclass
class Outcome:
    passed: bool
    measured: object
    target: str
    details: dict = field(default_factory=dict)


@dataclass
class Criterion:
    number: int
    title: str
    limit_seconds: float
    run: Callable[[], Outcome]


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    measured: object
    target: str
    seconds: float
    limit_seconds: float
    details: dict

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.number:2d} {self.title}: measured {_short(self.measured)} "
                f"target {self.target} ({self.seconds:.1f}s / {self.limit_seconds:.0f}s)")


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}={_short(x)}" for k, x in v.items()) + "}"
    return str(v)


# ---------------------------------------------------------------------------
# random inputs shared by several criteria
# ---------------------------------------------------------------------------
def random_union(rng, n_max: int = 4, lo: float = -3.0, hi: float = 3.0):
    k = int(rng.integers(1, n_max + 1))
    pts = np.sort(rng.uniform(lo, hi, 2 * k))
    pts = lo + np.cumsum(np.diff(np.concatenate([[lo], pts])) + 0.05)
    return normalize(pts.reshape(-1, 2))


def random_subset(rng, E):
    parts = []
    for a, b in E.intervals:
        if parts and rng.random() < 0.3:
            continue
        u, v = np.sort(rng.uniform(0, 1, 2))
        parts.append((a + 0.5 * u * (b - a), b - 0.5 * (1 - v) * (b - a)))
    return normalize(parts)


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------
def c01_interval_capacity() -> Outcome:
    rng = np.random.default_rng(1)
    err = 0.0
    for _ in range(20):
        a = rng.uniform(-10, 10)
        b = a + rng.uniform(1e-3, 20)
        err = max(err, abs(capacity(normalize([(a, b)])) - (b - a) / 4))
    return Outcome(err <= 1e-8, err, "max |C - (b-a)/4| <= 1e-8")


def c02_reference_interval() -> Outcome:
    eq = equilibrium(normalize([(-2, 2)]))
    e1 = abs(eq.capacity - 1.0)
    e2 = abs(float(eq.density(0.0)) - 1 / (2 * math.pi))
    return Outcome(max(e1, e2) <= 1e-8, {"capacity_err": e1, "density_err": e2}, "both <= 1e-8")


def c03_symmetric_two_interval() -> Outcome:
    errs, cross = [], []
    for k in (0.2, 0.5, 0.8):
        E = normalize([(-1, -k), (k, 1)])
        c = capacity(E)
        errs.append(abs(c - math.sqrt(1 - k * k) / 2))
        z = transfinite_diameter(E, 60)
        cross.append(abs(extrapolate_transfinite(range(2, 61), z) - c))
    ok = max(errs) <= 1e-6 and max(cross) <= 1e-2
    return Outcome(ok, {"capacity_err": max(errs), "transfinite_err": max(cross)},
                   "capacity err <= 1e-6, transfinite cross-check <= 1e-2")


def c04_frostman() -> Outcome:
    rng = np.random.default_rng(4)
    worst_in, violations = 0.0, 0
    for _ in range(10):
        E = random_union(rng)
        eq = equilibrium(E)
        target = -math.log(eq.capacity)
        lens = np.diff(np.array(E.intervals), axis=1).ravel()
        comp = rng.choice(E.n_intervals, 50, p=lens / lens.sum())
        t = rng.uniform(0.01, 0.99, 50)
        inner = np.array([E.intervals[c][0] + s * (E.intervals[c][1] - E.intervals[c][0]) for c, s in zip(comp, t)])
        worst_in = max(worst_in, float(np.max(np.abs(eq.potential(inner) - target))))
        lo, hi = E.hull
        outer = []
        while len(outer) < 50:
            z = complex(rng.uniform(lo - 2, hi + 2), rng.choice([0.0, rng.uniform(-2, 2)]))
            if z.imag != 0 or not E.contains(np.array([z.real]), tol=1e-3)[0]:
                outer.append(z)
        violations += int(np.sum(~(eq.potential(np.array(outer)) < target)))
    return Outcome(worst_in <= 1e-6 and violations == 0, {"interior_err": worst_in, "exterior_violations": violations},
                   "interior err <= 1e-6, no exterior violations")


def c05_comparison() -> Outcome:
    rng = np.random.default_rng(5)
    violations = 0
    z = np.array([5.0, 1j, -4 + 0.5j, 0.3 + 2j])
    for _ in range(200):
        E = random_union(rng)
        F = random_subset(rng, E)
        eqE, eqF = equilibrium(E), equilibrium(F)
        violations += int(eqF.capacity > eqE.capacity * (1 + 1e-12))
        violations += int(eqE.capacity < lebesgue(E) / 4 * (1 - 1e-12))
        violations += int(np.sum(eqE.green(z) > eqF.green(z) + 1e-8))
    return Outcome(violations == 0, violations, "0 violations")


def c06_bounds_chain() -> Outcome:
    rng = np.random.default_rng(6)
    u = np.sort(rng.uniform(-1, 1, 2))
    sets = [normalize([(-2, 2)]), normalize([(0, 1)]), normalize([(-1.0, u[0]), (u[1], 1.0)])]
    failures, mono = 0, True
    for E in sets:
        eq = equilibrium(E)
        zetas = []
        for n in range(1, 31):
            b = bounds_chain(E, n, eq)
            failures += int(not b.holds)
            zetas.append(b.zeta_next)
        mono &= bool(np.all(np.diff(zetas) <= 1e-12 * np.array(zetas[:-1])))
    return Outcome(failures == 0 and mono, {"chain_failures": failures, "zeta_monotone": mono},
                   "chain holds for n <= 30 on 3 sets; zeta decreasing")


def c07_chebyshev_fekete() -> Outcome:
    E = normalize([(-2, 2)])
    cheb_err = max(abs(chebyshev(E, n).sup_norm - 2.0) for n in range(1, 21))
    I = normalize([(-1, 1)])
    f3 = fekete(I, 3).points
    f5 = fekete(I, 5).points
    r = math.sqrt(3 / 7)
    fek_err = max(np.max(np.abs(f3 - [-1, 0, 1])), np.max(np.abs(f5 - [-1, -r, 0, r, 1])))
    return Outcome(cheb_err <= 1e-6 and fek_err <= 1e-8, {"cheb_err": cheb_err, "fekete_err": float(fek_err)},
                   "cheb err <= 1e-6, fekete err <= 1e-8")


def c08_oprl_round_trip() -> Outcome:
    Js = jacobi_from_measure(discretize(semicircle_spec(), 64), 20)
    Ja = jacobi_from_measure(discretize(arcsine_spec(), 64), 20)
    a_arc = np.ones(20)
    a_arc[0] = math.sqrt(2)
    err = max(np.max(np.abs(Js.a - 1)), np.max(np.abs(Js.b)), np.max(np.abs(Ja.a - a_arc)), np.max(np.abs(Ja.b)))
    nu = zero_counting(free_jacobi(2000), 2000)
    ks = ks_discrete_vs_cdf(nu.points, np.ones(nu.n), arcsine_cdf)
    return Outcome(err <= 1e-8 and ks <= 0.02, {"param_err": float(err), "ks": ks}, "param err <= 1e-8, KS <= 0.02")


def c09_regularity_verdicts() -> Outcome:
    E22 = normalize([(-2, 2)])
    free = regularity_diagnostic(free_jacobi(10_000), E22, [100, 1000, 10_000]).verdict
    sp = regularity_diagnostic(sparse_perturbation_jacobi(10_000), E22, [100, 1000, 10_000])
    exact = 2.0 ** (-math.floor(math.sqrt(10_000)) / 10_000)
    sparse_err = abs(sp.gamma_n[-1] - exact)
    rs = regularity_diagnostic(random_sign_jacobi(10_000, seed=1), E22, [100, 1000, 10_000])
    bl = regularity_diagnostic(block_potential_jacobi(10_000), normalize([(-2, 3)]), [1000, 10_000])
    ok = (free == "regular" and sp.verdict == "regular" and sparse_err <= 1e-12
          and rs.verdict == "not_regular" and max(abs(g - 0.5) for g in rs.gamma_n) <= 1e-12
          and bl.verdict == "not_regular" and abs(bl.capacity - 1.25) <= 1e-8)
    return Outcome(ok, {"free": free, "sparse": sp.verdict, "sparse_gamma_err": sparse_err,
                        "random_sign": rs.verdict, "block": bl.verdict, "block_gamma": bl.gamma_n[-1]},
                   "regular, regular (exact Gamma), not_regular (1/2), not_regular (C = 5/4)")


def c10_sum_of_regular() -> Outcome:
    spec = MeasureSpec((), arcsine_spec().ac_components + semicircle_spec().ac_components)
    J = jacobi_from_measure(discretize(spec, 512), 400)
    r = regularity_diagnostic(J, normalize([(-2, 2)]), [50, 100, 200, 400])
    return Outcome(r.verdict == "regular", {"verdict": r.verdict, "gamma_n": r.gamma_n[-1]}, "regular")


def c11_stahl_totik() -> Outcome:
    mu = dyadic_atom_measure(0.1)
    E = normalize([(0, 1)])
    l5 = stahl_totik_scan(mu, E, 64, 5.0)
    l1 = stahl_totik_scan(mu, E, 64, 1.0)
    return Outcome(l5 == 0.0 and l1 > 0.0, {"eta5": l5, "eta1": l1}, "length 0 at eta=5, > 0 at eta=1")


def c12_pure_point() -> Outcome:
    x = van_der_corput(40)
    la = -np.arange(1, 41, dtype=float) ** 2
    norms = monic_norms_highprec(x, la, 30)
    bound_ok = all(norms[n] <= pure_point_log_bound(x, la, n) + 1e-9 for n in range(1, 31))
    roots = [math.exp(norms[n] / n) for n in range(1, 31)]
    decreasing = roots[-1] < roots[9] < roots[0]
    return Outcome(bound_ok and decreasing and roots[-1] < 1e-6,
                   {"bound_holds": bound_ok, "root_n1": roots[0], "root_n30": roots[-1]},
                   "||P_n||^(1/n) <= bound, decreasing to 0")


def c13_thouless_free() -> Outcome:
    r = thouless_check(free_family(), [3, 2 + 1j, 5j], 10_000, 1)
    g3 = abs(r.gamma_hat[0] - math.log((3 + math.sqrt(5)) / 2))
    return Outcome(r.max_residual <= 5e-3 and g3 <= 1e-3, {"max_residual": r.max_residual, "gamma3_err": g3},
                   "residual <= 5e-3, gamma(3) err <= 1e-3")


def c14_almost_mathieu() -> Outcome:
    fam = ErgodicFamily("almost_mathieu", {"lam": 4.0})
    n, ns = 100_000, 16
    chambers = almost_mathieu_spectrum(4.0)
    widest = sorted(chambers.intervals, key=lambda ab: ab[0] - ab[1])[:5]
    xs = [0.5 * (a + b) for a, b in widest]
    g = lyapunov_many(fam, xs, n, ns).mean(axis=0)
    gerr = float(np.max(np.abs(g - math.log(2))))
    dos = density_of_states(fam, 2000, ns)
    E = dos_support(dos, 4 / 2000)
    rep = regularity_identity_check(fam, E, 10_000, ns)
    ok = gerr <= 5e-2 and rep.residual <= 5e-2
    return Outcome(ok, {"gamma_err": gerr, "gamma_n": rep.gamma_n, "capacity": rep.capacity,
                        "rhs": rep.rhs, "residual": rep.residual},
                   "|gamma - log 2| <= 5e-2 at 5 points, identity residual <= 5e-2")


def c15_rotation_opuc() -> Outcome:
    r = rotation_opuc_check(0.5, 64, 64, seed=0)
    ok = r.matches_oracle and r.angle_ks <= 0.05
    return Outcome(ok, {"product_root": r.product_root, "oracle": r.oracle, "stderr": r.stderr,
                        "deviation_in_stderr": r.deviation_in_stderr, "angle_ks": r.angle_ks,
                        "corrected_oracle": r.corrected_oracle,
                        "corrected_deviation_in_stderr": r.corrected_deviation_in_stderr},
                   "within 3 stderr of exp(int log(1-|z|^2) d sigma_0), KS <= 0.05")


def c16_balayage() -> Outcome:
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng([16, seed])
        a = rng.uniform(0, 0.3, 32) * np.exp(2j * np.pi * rng.uniform(0, 1, 32))
        z = opuc_zeros(VerblunskyParams(a), 32)
        _, F = balayage(z, moment_grid(z, 8))
        worst = max(worst, float(np.max(np.abs(circle_moments(F, 8) - disk_moments(z, 8)))))
    return Outcome(worst <= 1e-8, worst, "max moment error <= 1e-8")


def c17_cantor_chain() -> Outcome:
    caps = [capacity(cantor_approximant(k)) for k in range(1, 9)]
    diffs = [c1 - c2 for c1, c2 in zip(caps, caps[1:])]
    ok = all(d > 0 for d in diffs) and diffs[-1] <= 1e-3 and caps[-1] > 0.1
    return Outcome(ok, {"capacities": caps, "last_gap": diffs[-1]}, "strictly decreasing, last gap <= 1e-3, limit > 0.1")


CRITERIA = [
    Criterion(1, "interval capacity", 1, c01_interval_capacity),
    Criterion(2, "reference interval", 1, c02_reference_interval),
    Criterion(3, "symmetric two-interval capacity", 30, c03_symmetric_two_interval),
    Criterion(4, "Frostman suite", 60, c04_frostman),
    Criterion(5, "comparison suite", 60, c05_comparison),
    Criterion(6, "bounds chain", 300, c06_bounds_chain),
    Criterion(7, "Chebyshev and Fekete oracles", 60, c07_chebyshev_fekete),
    Criterion(8, "OPRL round trip", 60, c08_oprl_round_trip),
    Criterion(9, "regularity verdicts", 120, c09_regularity_verdicts),
    Criterion(10, "sum of regular measures", 60, c10_sum_of_regular),
    Criterion(11, "Stahl-Totik scan", 60, c11_stahl_totik),
    Criterion(12, "pure point norm bound", 30, c12_pure_point),
    Criterion(13, "Thouless formula (free)", 120, c13_thouless_free),
    Criterion(14, "almost Mathieu", 600, c14_almost_mathieu),
    Criterion(15, "rotation-invariant OPUC", 120, c15_rotation_opuc),
    Criterion(16, "balayage moments", 10, c16_balayage),
    Criterion(17, "Cantor chain", 300, c17_cantor_chain),
]


def run_criterion(c: Criterion) -> Result:
    t0 = time.perf_counter()
    try:
        out = c.run()
    except Exception as exc:  # a crash is a failure of that criterion only
        out = Outcome(False, f"{type(exc).__name__}: {exc}", "no exception")
    dt = time.perf_counter() - t0
    passed = bool(out.passed) and dt <= c.limit_seconds
    return Result(c.number, c.title, passed, out.measured, out.target, dt, c.limit_seconds, out.details)


def run_acceptance(numbers=None, echo: Callable[[str], None] | None = print) -> list[Result]:
    results = []
    for c in CRITERIA:
        if numbers is not None and c.number not in numbers:
            continue
        r = run_criterion(c)
        if echo is not None:
            echo(r.line)
        results.append(r)
    return results


# ---------------------------------------------------------------------------
# regression
# ---------------------------------------------------------------------------
def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def regression_values() -> dict:
    """Deterministic quantities from every module, as 17-digit strings."""
    out = {}
    for name, pairs in [("interval", [(0, 1)]), ("two", [(-1, -0.3), (0.2, 1)]),
                        ("three", [(0, 0.1), (0.4, 0.6), (0.9, 1)])]:
        E = normalize(pairs)
        out[f"capacity.{name}"] = _fmt(capacity(E))
    out["capacity.cantor4"] = _fmt(capacity(cantor_approximant(4)))
    two = normalize([(-1, -0.3), (0.2, 1)])
    out["chebyshev.two.5"] = _fmt(chebyshev(two, 5).sup_norm)
    out["fekete.two.9"] = _fmt(fekete(two, 9).zeta)
    J = jacobi_from_measure(discretize(semicircle_spec(), 64), 10)
    out["jacobi.semicircle.a10"] = _fmt(J.a[-1])
    out["zeros.free.50.max"] = _fmt(zero_counting(free_jacobi(50), 50).points[-1])
    V = VerblunskyParams(0.4 * np.exp(1j * np.arange(8)))
    out["opuc.zeros.8.maxabs"] = _fmt(np.max(np.abs(opuc_zeros(V, 8))))
    out["lyapunov.anderson.3"] = _fmt(lyapunov_many(ErgodicFamily("anderson", seed=11), [3.0], 2000, 2).mean())
    return out


def golden_path():
    return resources.files("logpot").joinpath("golden/regression.json")


def run_regression(echo: Callable[[str], None] | None = print) -> bool:
    current = regression_values()
    golden = json.loads(golden_path().read_text())
    ok = True
    for key in sorted(set(current) | set(golden)):
        same = current.get(key) == golden.get(key)
        ok &= same
        if echo is not None:
            echo(f"{'PASS' if same else 'FAIL'} {key}: {current.get(key)} (golden {golden.get(key)})")
    return ok


def write_golden(path) -> None:
    with open(path, "w") as fh:
        json.dump(regression_values(), fh, indent=1, sort_keys=True)
        fh.write("\n")
