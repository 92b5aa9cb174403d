import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from logpot._numerics import arcsine_cdf, ks_discrete_vs_cdf
from logpot.errors import InconsistentSetClaim, NotApplicable, RankDeficient, ValidationError
from logpot.oprl import (
    AtomicMeasure,
    JacobiParams,
    block_potential_jacobi,
    dyadic_atom_measure,
    free_jacobi,
    jacobi_from_measure,
    lower_bound_check,
    monic_eval,
    monic_norms_highprec,
    orthonormal_eval,
    orthonormal_table,
    pure_point_bound,
    pure_point_log_bound,
    random_sign_jacobi,
    regularity_diagnostic,
    regularize_atomic,
    regularize_measure,
    sparse_perturbation_jacobi,
    stahl_totik_scan,
    tridiagonal_eigenvalues,
    van_der_corput,
    window_log_mass,
    zero_counting,
)
from logpot.potential import (
    DiscretizedMeasure,
    MeasureSpec,
    arcsine_spec,
    discretize,
    semicircle_spec,
    uniform_spec,
)
from logpot.setgeom import normalize


def _random_jacobi(rng, n):
    return JacobiParams(rng.uniform(0.3, 1.5, n), rng.uniform(-1, 1, n))


# -- Jacobi parameters from measures -----------------------------------------
def test_semicircle_parameters():
    J = jacobi_from_measure(discretize(semicircle_spec(), 64), 20)
    assert np.allclose(J.a, 1, atol=1e-8)
    assert np.allclose(J.b, 0, atol=1e-8)


def test_arcsine_parameters():
    J = jacobi_from_measure(discretize(arcsine_spec(), 64), 20)
    assert J.a[0] == pytest.approx(math.sqrt(2), abs=1e-8)
    assert np.allclose(J.a[1:], 1, atol=1e-8)
    assert np.allclose(J.b, 0, atol=1e-8)


def test_two_atoms():
    J = jacobi_from_measure(DiscretizedMeasure.from_points([-1.0, 1.0], [1.0, 1.0]), 1)
    assert J.a[0] == pytest.approx(1.0)
    assert J.b[0] == pytest.approx(0.0, abs=1e-15)


def test_rank_deficient():
    with pytest.raises(RankDeficient):
        jacobi_from_measure(DiscretizedMeasure.from_points([-1.0, 1.0], [1.0, 1.0]), 2)


def test_discrete_orthogonality(rng):
    x = np.sort(rng.uniform(-2, 3, 80))
    w = rng.uniform(0.1, 1.0, 80)
    mu = DiscretizedMeasure.from_points(x, w)
    n = 30
    J = jacobi_from_measure(mu, n)
    P = orthonormal_table(J, n, mu.nodes)
    G = (P * (mu.weights / mu.total_mass)) @ P.T
    assert np.max(np.abs(G - np.eye(n + 1))) <= 1e-8


def test_norm_product_identity():
    spec = uniform_spec(normalize([(-1, 0.5), (1, 2)]))
    mu = discretize(spec, 64)
    n = 12
    J = jacobi_from_measure(mu, n)
    for k in range(n + 1):
        norm = math.sqrt(np.sum(mu.weights * monic_eval(J, k, mu.nodes) ** 2))
        assert norm == pytest.approx(np.prod(J.a[:k]) * math.sqrt(mu.total_mass), rel=1e-8)


def test_json_roundtrip():
    J = JacobiParams([1.0, 0.5], [0.0, 0.25])
    K = JacobiParams.from_json(J.to_json())
    assert np.array_equal(J.a, K.a) and np.array_equal(J.b, K.b)
    with pytest.raises(ValidationError):
        JacobiParams.from_json('{"a": [1], "b": [0], "c": 1}')
    with pytest.raises(ValidationError):
        JacobiParams([1.0, -1.0], [0.0, 0.0])


# -- recursion evaluation -----------------------------------------------------
def test_free_recursion_values():
    J = free_jacobi(20)
    assert orthonormal_eval(J, 0, 0.7) == 1.0
    assert orthonormal_eval(J, 2, 0.0) == pytest.approx(-1.0)
    s5 = math.sqrt(5)
    expected = (((3 + s5) / 2) ** 11 - ((3 - s5) / 2) ** 11) / s5
    assert orthonormal_eval(J, 10, 3.0) == pytest.approx(expected, rel=1e-9)
    theta = 0.83
    for n in range(8):
        val = orthonormal_eval(J, n, 2 * math.cos(theta))
        assert val == pytest.approx(math.sin((n + 1) * theta) / math.sin(theta), abs=1e-12)


def test_complex_argument():
    J = free_jacobi(5)
    assert orthonormal_eval(J, 1, 1j) == pytest.approx(1j)


# -- zeros ---------------------------------------------------------------------
def test_free_zeros_small():
    z = zero_counting(free_jacobi(5), 3)
    assert np.allclose(z.points, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-12)
    assert zero_counting(JacobiParams([1.0], [0.37]), 1).points == pytest.approx([0.37])


def test_free_zero_counting_ks():
    z = zero_counting(free_jacobi(50), 50)
    assert ks_discrete_vs_cdf(z.points, np.ones(50), arcsine_cdf) <= 0.03


def test_bisection_matches_lapack(rng):
    d = rng.normal(size=700)
    e = rng.uniform(0.1, 1.0, 699)
    a = tridiagonal_eigenvalues(d, e, "bisection")
    b = tridiagonal_eigenvalues(d, e, "lapack")
    assert np.max(np.abs(a - b)) <= 1e-11


def test_zeros_match_monic_roots(rng):
    for _ in range(5):
        n = 10
        J = _random_jacobi(rng, n)
        # power-basis coefficients of P_n by the recursion
        p_prev, p = np.zeros(1), np.ones(1)
        for k in range(n):
            a2 = J.a[k - 1] ** 2 if k else 0.0
            nxt = np.concatenate([[0.0], p]) - J.b[k] * np.concatenate([p, [0.0]])
            nxt[: p_prev.size] -= a2 * p_prev
            p_prev, p = p, nxt
        roots = np.sort(np.roots(p[::-1]).real)
        assert np.allclose(roots, zero_counting(J, n).points, atol=1e-8)


def test_interlacing(rng):
    J = _random_jacobi(rng, 40)
    for n in (5, 17, 39):
        z1 = zero_counting(J, n).points
        z2 = zero_counting(J, n + 1).points
        # near-decoupled blocks give pairs that agree to rounding
        assert np.all(z2[:-1] < z1 + 1e-10) and np.all(z1 < z2[1:] + 1e-10)
        assert np.all(np.diff(z2) > 0)


def test_zeros_at_most_one_per_gap():
    E = normalize([(-1, -0.3), (0.2, 1)])
    J = jacobi_from_measure(discretize(uniform_spec(E), 80), 60)
    for n in (10, 31, 60):
        z = zero_counting(J, n).points
        assert np.all((z >= -1) & (z <= 1))
        assert np.sum((z > -0.3) & (z < 0.2)) <= 1


# -- regularity -----------------------------------------------------------------
E22 = normalize([(-2, 2)])


def test_free_is_regular():
    r = regularity_diagnostic(free_jacobi(2000), E22, [100, 1000, 2000])
    assert r.verdict == "regular"
    assert r.gamma_n == pytest.approx([1, 1, 1])


def test_sparse_example():
    J = sparse_perturbation_jacobi(10_000)
    assert J.a[3] == 0.5 and J.a[4] == 1.0 and J.a[0] == 0.5 and J.a[1] == 1.0
    r = regularity_diagnostic(J, E22, [100, 1000, 10_000])
    exact = 2.0 ** (-math.floor(math.sqrt(10_000)) / 10_000)
    assert r.gamma_n[-1] == pytest.approx(exact, rel=1e-12)
    assert r.verdict == "regular"


def test_sparse_example_first_parameter_definition():
    # a_n = 1/2 exactly at perfect squares, n = 1 included
    J = sparse_perturbation_jacobi(30)
    squares = {1, 4, 9, 16, 25}
    for n in range(1, 31):
        assert J.a[n - 1] == (0.5 if n in squares else 1.0)


def test_random_sign_not_regular():
    r = regularity_diagnostic(random_sign_jacobi(2000, seed=7), E22, [100, 2000])
    assert r.verdict == "not_regular"
    assert r.gamma_n == pytest.approx([0.5, 0.5])


def test_block_potential_not_regular():
    J = block_potential_jacobi(5000)
    assert J.b[0] == 1 and J.b[1] == 1 and J.b[2] == 0 and J.b[3] == 1
    r = regularity_diagnostic(J, normalize([(-2, 3)]), [1000, 5000])
    assert r.capacity == pytest.approx(1.25)
    assert r.verdict == "not_regular"


def test_inconsistent_set_claim():
    with pytest.raises(InconsistentSetClaim):
        regularity_diagnostic(free_jacobi(500), normalize([(-1, 1)]), [500])


def test_legendre_weight_regular():
    J = jacobi_from_measure(discretize(uniform_spec(E22), 256), 200)
    r = regularity_diagnostic(J, E22, [50, 200])
    assert r.gamma_n[-1] >= 0.97
    assert r.verdict == "regular"


def test_determinism():
    r1 = regularity_diagnostic(random_sign_jacobi(500, seed=3), E22, [100, 500])
    r2 = regularity_diagnostic(random_sign_jacobi(500, seed=3), E22, [100, 500])
    assert r1.as_dict() == r2.as_dict()


# -- lower bound -----------------------------------------------------------------
def test_lower_bound_free():
    rep = lower_bound_check(free_jacobi(10), 3.0, 5, (-2, 2))
    assert rep["holds"]
    assert rep["bound"] == pytest.approx(0.25 * 1.25 ** 4)
    assert lower_bound_check(free_jacobi(10), 3.0, 0, (-2, 2))["holds"]


def test_lower_bound_not_applicable():
    with pytest.raises(NotApplicable):
        lower_bound_check(free_jacobi(10), 1.0, 3, (-2, 2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 25))
def test_lower_bound_random(seed, n):
    rng = np.random.default_rng(seed)
    J = _random_jacobi(rng, 30)
    # convex hull of the spectral measure: Gershgorin enclosure of the full matrix
    lo = float(np.min(J.b) - 2 * J.a.max())
    hi = float(np.max(J.b) + 2 * J.a.max())
    r = rng.uniform(0.1, 5)
    phi = rng.uniform(0, 2 * np.pi)
    z = complex(hi + r * math.cos(phi), r * math.sin(phi)) if math.cos(phi) > 0 else \
        complex(lo + r * math.cos(phi), r * math.sin(phi))
    assert lower_bound_check(J, z, n, (lo, hi))["holds"]


# -- Stahl-Totik -------------------------------------------------------------------
def _exact_bad_length(mu, m, eta, a, b):
    at = mu.merged()
    bp = np.concatenate([at.nodes - 1 / m, at.nodes + 1 / m, [a, b]])
    bp = np.unique(bp[(bp >= a) & (bp <= b)])
    mids = 0.5 * (bp[:-1] + bp[1:])
    return float(np.sum(np.diff(bp)[window_log_mass(mu, mids, 1 / m) <= -m * eta]))


def test_stahl_totik_arcsine():
    # node spacing must resolve the 1/m windows
    mu = discretize(arcsine_spec(), 2000)
    for eta in (0.5, 2.0):
        assert stahl_totik_scan(mu, E22, 100, eta) == 0.0


def test_stahl_totik_single_atom():
    mu = DiscretizedMeasure.from_points([0.0], [1.0])
    v = stahl_totik_scan(mu, normalize([(-1, 1)]), 10, 1.0)
    assert v == pytest.approx(2 - 0.2, abs=1e-9)


@pytest.mark.parametrize("eta", [0.5, 1.0, 2.0, 3.0, 4.0, 5.0])
def test_stahl_totik_example_matches_enumeration(eta):
    mu = dyadic_atom_measure(0.1)
    got = stahl_totik_scan(mu, normalize([(0, 1)]), 64, eta)
    assert got == pytest.approx(_exact_bad_length(mu, 64, eta, 0, 1), abs=1 / 640)


def test_stahl_totik_threshold():
    mu = dyadic_atom_measure(0.1)
    E = normalize([(0, 1)])
    assert stahl_totik_scan(mu, E, 64, 5.0) == 0.0
    assert stahl_totik_scan(mu, E, 64, 1.0) > 0.0


def test_dyadic_atom_measure():
    mu = dyadic_atom_measure(0.5, 3)
    assert np.allclose(mu.nodes[:7], [0, 0, 0.5, 0, 0.25, 0.5, 0.75])
    assert np.allclose(np.exp(mu.log_weights[:3]), [0.5, 0.25, 0.125])


# -- pure point measures -------------------------------------------------------
def test_pure_point_bound_n0():
    a = [0.5, 0.25, 0.125]
    assert pure_point_bound([0, 1, 0.5], a, 0) == pytest.approx(math.sqrt(0.875))


def test_corollary_norms():
    J = 40
    x = van_der_corput(J)
    la = -np.arange(1, J + 1, dtype=float) ** 2
    norms = monic_norms_highprec(x, la, 30)
    assert norms[0] == pytest.approx(0.5 * math.log(np.sum(np.exp(la))), rel=1e-12)
    roots = []
    for n in range(1, 31):
        assert norms[n] <= pure_point_log_bound(x, la, n) + 1e-9
        roots.append(norms[n] / n)
    assert roots[-1] < roots[9] < roots[0]
    assert math.exp(roots[-1]) < 1e-7


def test_corollary_norms_match_double_precision_lanczos():
    x = np.linspace(0, 1, 30)
    w = np.exp(-0.1 * np.arange(30))
    ln = monic_norms_highprec(x, np.log(w), 10)
    J = jacobi_from_measure(DiscretizedMeasure.from_points(x, w), 10)
    direct = np.log(np.cumprod(J.a)) + 0.5 * math.log(w.sum())
    assert np.allclose(ln[1:], direct, rtol=1e-9)


def test_example_5_7_bound():
    mu = dyadic_atom_measure(0.5, 8)
    ln = monic_norms_highprec(mu.nodes, mu.log_weights, 16)
    assert ln[16] <= pure_point_log_bound(mu.nodes, mu.log_weights, 16)


# -- regularizing a measure -------------------------------------------------------
def test_regularize_single_term():
    spec = MeasureSpec(((0.1, 2.0), (0.6, 1.0)), ())
    eta = regularize_measure(spec, normalize([(0, 1)]), 1)
    assert sum(w for _, w in eta.point_masses) == pytest.approx(1.0)


def test_regularize_cell_lower_bound():
    spec = arcsine_spec(0, 1)
    eta = regularize_measure(spec, normalize([(0, 1)]), 6)
    mu = discretize(eta, 16)
    for n in range(1, 7):
        for j in range(n):
            inside = (mu.nodes > j / n) & (mu.nodes <= (j + 1) / n)
            assert mu.weights[inside].sum() >= n ** -3.0 * (1 - 1e-9)


def test_regularize_arcsine_stays_regular():
    eta = regularize_measure(arcsine_spec(0, 1), normalize([(0, 1)]), 10)
    J = jacobi_from_measure(discretize(eta, 16).normalized(), 150)
    r = regularity_diagnostic(J, normalize([(0, 1)]), [50, 150])
    assert r.verdict == "regular"


def test_regularize_atoms_lifts_gamma():
    # only the dominant atom of each cell keeps a representable weight, so
    # the comparison is made at n <= 40
    count = 4096
    x = van_der_corput(count)
    la = -np.arange(1, count + 1, dtype=float) ** 2
    eta = regularize_atomic(AtomicMeasure(x, la), normalize([(0, 1)]), 40)
    w = np.exp(eta.log_weights)
    keep = w > 0
    J = jacobi_from_measure(DiscretizedMeasure.from_points(eta.nodes[keep], w[keep]), 40)
    raw = monic_norms_highprec(x[:60], la[:60], 40)
    for n in (10, 20, 40):
        assert J.gamma(n) > 0.18
        assert math.exp((raw[n] - raw[0]) / n) < 1e-3
