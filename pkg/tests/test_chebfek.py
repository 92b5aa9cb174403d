import math

import numpy as np
import pytest

from logpot.chebfek import (
    bounds_chain,
    chebyshev,
    extrapolate_transfinite,
    fekete,
    fekete_constant,
    fekete_counting_convergence,
    fekete_polynomial_norms,
    transfinite_diameter,
)
from logpot.errors import ValidationError
from logpot.potential import capacity
from logpot.setgeom import cantor_approximant, normalize


E22 = normalize([(-2, 2)])
E01 = normalize([(0, 1)])
TWO = normalize([(-1, -0.3), (0.2, 1)])


@pytest.mark.parametrize("n", [1, 2, 3, 7, 12, 20])
def test_chebyshev_on_reference_interval(n):
    r = chebyshev(E22, n)
    assert abs(r.sup_norm - 2.0) < 1e-6
    assert r.coefficients[-1] == 1.0
    # monic 2 T_n(x/2): roots 2 cos((k + 1/2) pi / n)
    expected = np.sort(2 * np.cos((np.arange(n) + 0.5) * np.pi / n))
    assert np.allclose(r.roots, expected, atol=1e-8)
    assert len(r.equioscillation_points) == n + 1


def test_chebyshev_cubic_coefficients():
    r = chebyshev(E22, 3)
    assert np.allclose(r.coefficients, [0, -3, 0, 1], atol=1e-9)


@pytest.mark.parametrize("restricted", [False, True])
def test_chebyshev_degree_one(restricted):
    r = chebyshev(E01, 1, restricted)
    assert np.allclose(r.coefficients, [-0.5, 1.0], atol=1e-12)
    assert abs(r.sup_norm - 0.5) < 1e-12


def test_chebyshev_even_two_interval_matches_brute_force():
    E = normalize([(-1, -0.5), (0.5, 1)])
    r = chebyshev(E, 2)
    x = np.concatenate([np.linspace(-1, -0.5, 20001), np.linspace(0.5, 1, 20001)])
    cs = np.linspace(0.25, 1.0, 100001)
    # |x^2 - c| is maximized at x^2 in {0.25, 1}
    brute = np.min(np.maximum(np.abs(0.25 - cs), np.abs(1 - cs)))
    assert abs(r.sup_norm - brute) < 1e-4
    assert abs(r.coefficients[1]) < 1e-10
    assert np.max(np.abs(x ** 2 - 0.625)) == pytest.approx(r.sup_norm, abs=1e-9)


def test_chebyshev_degree_out_of_range():
    with pytest.raises(ValidationError):
        chebyshev(E22, 0)
    with pytest.raises(ValidationError):
        chebyshev(E22, 61)


@pytest.mark.parametrize("n", [3, 8, 15, 30])
def test_restricted_properties(n):
    t = chebyshev(TWO, n)
    tr = chebyshev(TWO, n, True)
    assert tr.coefficients[-1] == 1.0
    assert len(tr.roots) == n
    assert np.all(TWO.contains(tr.roots, tol=1e-9))
    assert t.sup_norm <= tr.sup_norm * (1 + 1e-9)
    cap = capacity(TWO)
    assert t.sup_norm >= cap ** n * (1 - 1e-9)


def test_restricted_beats_simple_candidates():
    # any monic polynomial with roots in E bounds the restricted norm from above
    tr = chebyshev(TWO, 3, True)
    rng = np.random.default_rng(3)
    grid = np.concatenate([np.linspace(-1, -0.3, 2001), np.linspace(0.2, 1, 2001)])
    for _ in range(200):
        roots = rng.choice(grid, 3)
        v = np.max(np.abs(np.prod(grid[:, None] - roots, axis=1)))
        assert tr.sup_norm <= v * (1 + 1e-6)


def test_submultiplicativity():
    norms = {n: chebyshev(TWO, n).sup_norm for n in range(1, 9)}
    for n in range(1, 5):
        for m in range(1, 5):
            assert norms[n + m] <= norms[n] * norms[m] * (1 + 1e-9)


def test_fekete_two_points():
    f = fekete(normalize([(0.5, 3.5)]), 2)
    assert np.allclose(f.points, [0.5, 3.5])
    assert f.zeta == pytest.approx(3.0, rel=1e-14)


@pytest.mark.parametrize("n,expected", [
    (3, [-1.0, 0.0, 1.0]),
    (5, [-1.0, -math.sqrt(3 / 7), 0.0, math.sqrt(3 / 7), 1.0]),
])
def test_fekete_lobatto_oracle(n, expected):
    f = fekete(normalize([(-1, 1)]), n)
    assert np.allclose(f.points, expected, atol=1e-8)


def test_fekete_lobatto_oracle_larger():
    # interior Fekete points of [-1, 1] are the zeros of P'_{n-1}
    from numpy.polynomial import legendre as L
    n = 12
    interior = np.sort(L.legroots(L.legder([0] * (n - 1) + [1])))
    f = fekete(normalize([(-1, 1)]), n)
    assert np.allclose(f.points[1:-1], interior, atol=1e-9)


def test_fekete_zeta_from_points_and_residual():
    f = fekete(TWO, 17)
    assert f.zeta == fekete_constant(f.points)
    assert f.grad_norm <= 1e-9
    assert np.all(TWO.contains(f.points))
    assert np.all(np.diff(f.points) > 0)


def test_fekete_beats_perturbations():
    f = fekete(TWO, 9)
    rng = np.random.default_rng(5)
    base = math.log(f.zeta)
    for _ in range(100):
        p = f.points + rng.normal(scale=1e-3, size=f.points.size)
        p = np.clip(p, -1, 1)
        p = np.where((p > -0.3) & (p < 0.2), f.points, p)
        if np.unique(p).size < p.size:
            continue
        assert math.log(fekete_constant(p)) <= base + 1e-12


def test_transfinite_diameter_unit_interval():
    z = transfinite_diameter(E01, 40)
    assert np.all(np.diff(z) <= 1e-10)
    assert z[0] == pytest.approx(1.0)
    assert z[-1] > 0.25
    est = extrapolate_transfinite(range(2, 41), z)
    assert abs(est - 0.25) <= 0.02


def test_transfinite_diameter_reference_interval():
    assert transfinite_diameter(E22, 2) == [pytest.approx(4.0)]


def test_transfinite_diameter_cantor():
    E = cantor_approximant(4)
    z = transfinite_diameter(E, 30)
    assert np.all(np.diff(z) <= 1e-10)
    c8 = capacity(cantor_approximant(8))
    assert extrapolate_transfinite(range(2, 31), z) >= c8 - 0.05


def test_fekete_polynomial_norm_identity():
    f = fekete(TWO, 10)
    norms, prods = fekete_polynomial_norms(TWO, f.points)
    assert np.allclose(norms, prods, rtol=1e-7)


@pytest.mark.parametrize("E,n", [(E22, 10), (E01, 1), (TWO, 8)])
def test_bounds_chain_examples(E, n):
    b = bounds_chain(E, n)
    assert b.holds
    if E is E22:
        assert b.cheb_root == pytest.approx(2 ** 0.1, rel=1e-7)
    if E is E01:
        assert b.values == pytest.approx([0.25, 0.5, 0.5, 1.0], rel=1e-8)


def test_fekete_counting_convergence():
    ks5, ks40 = fekete_counting_convergence(E22, [5, 40])
    assert ks40 <= 0.05
    assert ks40 < ks5
    assert fekete_counting_convergence(E01, [40])[0] <= 0.05


@pytest.mark.parametrize("intervals,n,expected", [
    # frozen from an exhaustive root-grid search refined by Nelder-Mead
    ([(-1, -0.6), (0.5, 1)], 3, 0.3473686672),
    ([(-1, -0.3), (0.2, 1)], 3, 0.3209937330),
    ([(0, 0.1), (0.4, 0.6), (0.9, 1)], 2, 0.16),
    ([(0, 0.1), (0.4, 0.6), (0.9, 1)], 4, 0.0083076923),
])
def test_restricted_matches_brute_force(intervals, n, expected):
    r = chebyshev(normalize(intervals), n, restricted=True)
    assert r.sup_norm == pytest.approx(expected, rel=1e-5)
