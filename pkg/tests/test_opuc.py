import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logpot.errors import BadSupport, NotApplicable, Unsupported, ValidationError
from logpot.opuc import (
    VerblunskyParams,
    arc_capacity,
    balayage,
    circle_moments,
    moment_grid,
    cn_class_check,
    disk_moments,
    monic_coefficients,
    opuc_zeros,
    szego_eval,
    verblunsky_norm_product,
)


def random_alpha(n, seed, radius=0.9):
    rng = np.random.default_rng(seed)
    return rng.uniform(0, radius, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))


def test_params_validation_and_rho():
    with pytest.raises(ValidationError):
        VerblunskyParams([0.5, 1.0])
    V = VerblunskyParams(random_alpha(20, 0))
    assert np.allclose(V.rho ** 2 + np.abs(V.alpha) ** 2, 1, atol=1e-14)
    assert np.all((V.rho > 0) & (V.rho <= 1))


def test_json_round_trip():
    V = VerblunskyParams(random_alpha(5, 1))
    W = VerblunskyParams.from_json(V.to_json())
    assert np.array_equal(V.alpha, W.alpha)
    with pytest.raises(ValidationError):
        VerblunskyParams.from_json('{"beta": []}')


def test_free_case():
    V = VerblunskyParams(np.zeros(6))
    z = np.array([0.3 + 0.1j, -0.7j, 2.0])
    phi, star = szego_eval(V, 6, z)
    assert np.allclose(phi, z ** 6)
    assert np.allclose(star, 1)


def test_single_step():
    a = 0.4 - 0.2j
    V = VerblunskyParams([a])
    z = np.array([0.1, 0.5j, -0.3 + 0.2j])
    assert np.allclose(szego_eval(V, 1, z)[0], z - np.conj(a))


def test_modulus_identity_on_circle():
    V = VerblunskyParams(random_alpha(30, 2))
    theta = np.random.default_rng(3).uniform(0, 2 * np.pi, 50)
    phi, star = szego_eval(V, 30, np.exp(1j * theta))
    assert np.allclose(np.abs(phi), np.abs(star), rtol=1e-10)


def test_coefficients_match_recursion():
    V = VerblunskyParams(random_alpha(12, 4))
    c = monic_coefficients(V, 12)
    assert c.size == 13 and c[-1] == 1
    z = np.array([0.2 + 0.3j, -0.9, 0.5j])
    assert np.allclose(np.polyval(c[::-1], z), szego_eval(V, 12, z)[0], atol=1e-12)


def test_norm_product():
    assert verblunsky_norm_product(VerblunskyParams(np.zeros(10)), 10) == 1.0
    assert verblunsky_norm_product(VerblunskyParams([0.5] * 4), 4) == pytest.approx(math.sqrt(3) / 2, rel=1e-14)
    V = VerblunskyParams(random_alpha(40, 5))
    assert verblunsky_norm_product(V, 40) == pytest.approx(math.exp(np.mean(np.log(V.rho))), rel=1e-12)


def test_zeros_trivial_cases():
    assert np.array_equal(opuc_zeros(VerblunskyParams(np.zeros(4)), 4), np.zeros(4))
    assert np.allclose(opuc_zeros(VerblunskyParams([0.3]), 1), [0.3])


@pytest.mark.parametrize("seed", range(5))
def test_zeros_inside_disk_and_are_roots(seed):
    V = VerblunskyParams(random_alpha(32, seed))
    z = opuc_zeros(V, 32)
    assert z.size == 32
    assert np.all(np.abs(z) < 1)
    c = monic_coefficients(V, 32)
    assert np.max(np.abs(szego_eval(V, 32, z)[0])) <= 1e-12 * np.abs(c).sum()


def test_zeros_match_companion_roots():
    V = VerblunskyParams(random_alpha(16, 9, radius=0.5))
    z = opuc_zeros(V, 16)
    r = np.roots(monic_coefficients(V, 16)[::-1])
    assert max(np.min(np.abs(r - zi)) for zi in z) < 1e-9


def test_zeros_small_coefficients_stay_away_from_circle():
    V = VerblunskyParams(random_alpha(32, 11, radius=0.3))
    assert np.all(np.abs(opuc_zeros(V, 32)) < 1 - 1e-10)


def test_zeros_degree_limit():
    with pytest.raises(ValidationError):
        opuc_zeros(VerblunskyParams(np.zeros(200)), 129)


def test_balayage_center_and_real_point():
    _, F = balayage([0.0], 256)
    assert np.allclose(F, 1)
    th, F = balayage([0.5], 4096)
    assert np.allclose(F, 0.75 / np.abs(np.exp(1j * th) - 0.5) ** 2)
    assert circle_moments(F, 1)[1] == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_balayage_moment_identity(seed):
    V = VerblunskyParams(random_alpha(32, seed, radius=0.3))
    z = opuc_zeros(V, 32)
    _, F = balayage(z, moment_grid(z, 8))
    assert np.allclose(circle_moments(F, 8), disk_moments(z, 8), atol=1e-8, rtol=0)


def test_moment_grid_limits():
    assert moment_grid([0.0], 8) == 64
    assert moment_grid([0.5], 8) >= 40
    with pytest.raises(Unsupported):
        moment_grid([1 - 1e-9], 8)


def test_balayage_rejects_boundary():
    with pytest.raises(BadSupport):
        balayage([1.0], 64)


def test_arc_capacity_unsupported():
    assert arc_capacity(0, 2 * np.pi) == 1.0
    with pytest.raises(Unsupported):
        arc_capacity(0, 1)


def test_cn_class_examples():
    r = cn_class_check(VerblunskyParams(1 / (np.arange(5000) + 2)))
    assert r.pointwise_holds and r.chain_holds
    assert r.verdict == "regular"
    assert r.cesaro_means[-1] < r.cesaro_means[0]
    z = cn_class_check(VerblunskyParams(np.zeros(50)))
    assert z.pointwise_holds and z.chain_holds and z.product_roots[-1] == 1.0
    c = cn_class_check(VerblunskyParams(np.full(100, 0.9)))
    assert c.product_roots[-1] == pytest.approx(math.sqrt(0.19), rel=1e-12)
    assert c.verdict == "not_regular"
