import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from fermionic_epi import clifford as cl
from fermionic_epi import gaussian as ga

seeds = st.integers(0, 2**32 - 1)


def skew(size, rng, cplx=False):
    a = rng.standard_normal((size, size))
    if cplx:
        a = a + 1j * rng.standard_normal((size, size))
    return a - a.T


# -- Pfaffian ---------------------------------------------------------------

def test_pfaffian_of_4x4_matches_closed_form(rng):
    m = skew(4, rng)
    expected = m[0, 1] * m[2, 3] - m[0, 2] * m[1, 3] + m[0, 3] * m[1, 2]
    assert abs(ga.pfaffian(m) - expected) < 1e-13
    assert abs(ga.pfaffian_oracle(m) - expected) < 1e-13


def test_pfaffian_small_frozen_values():
    assert ga.pfaffian(np.array([[0.0, 2.5], [-2.5, 0.0]])) == 2.5
    j = np.kron(np.eye(3), [[0, 1], [-1, 0]])
    assert ga.pfaffian(j) == pytest.approx(1.0)
    assert ga.pfaffian(np.zeros((4, 4))) == 0
    assert ga.pfaffian(np.zeros((3, 3))) == 0


@pytest.mark.parametrize("size", [2, 4, 6, 8])
def test_pfaffian_matches_permutation_sum(size, rng):
    for cplx in (False, True):
        m = skew(size, rng, cplx)
        assert abs(ga.pfaffian(m) - ga.pfaffian_oracle(m)) < 1e-10 * max(1, abs(ga.pfaffian_oracle(m)))


@given(seeds, st.sampled_from([2, 4, 6, 8, 10]), st.booleans())
def test_pfaffian_squared_is_determinant(seed, size, cplx):
    m = skew(size, np.random.default_rng(seed), cplx)
    det = np.linalg.det(m)
    assert abs(ga.pfaffian(m) ** 2 - det) <= 1e-8 * max(abs(det), 1e-12)


@given(seeds)
def test_pfaffian_congruence(seed):
    rng = np.random.default_rng(seed)
    m = skew(6, rng)
    q = rng.standard_normal((6, 6))
    lhs = ga.pfaffian(q @ m @ q.T)
    rhs = np.linalg.det(q) * ga.pfaffian(m)
    assert abs(lhs - rhs) < 1e-9 * max(1, abs(rhs))


def test_pfaffian_needs_pivoting():
    m = np.zeros((4, 4))
    m[0, 2], m[1, 3] = 1.0, 1.0
    m = m - m.T
    assert ga.pfaffian(m) == pytest.approx(-1.0)


def test_pfaffian_rejects_non_skew():
    with pytest.raises(ga.GaussianError):
        ga.pfaffian(np.eye(2))


# -- covariance and synthesis ----------------------------------------------

def test_vacuum_covariance_pin():
    vacuum = np.diag([1.0, 0.0]).astype(complex)
    assert np.array_equal(ga.covariance_of(vacuum), [[0, -1], [1, 0]])


def test_maximally_mixed_has_zero_covariance():
    assert np.max(np.abs(ga.covariance_of(np.eye(8) / 8))) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_synthesis_round_trip(n, rng):
    for _ in range(5):
        g = ga.random_covariance(n, rng)
        rho = ga.gaussian_state_from_covariance(g)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-12
        assert cl.is_even(rho)
        assert np.max(np.abs(ga.covariance_of(rho) - g)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_pure_state_is_rank_one(n, rng):
    state = ga.random_gaussian_state(n, rng, pure=True)
    assert state.is_pure
    w = np.linalg.eigvalsh(state.density)
    assert np.sum(w > 1e-10) == 1


def test_degenerate_covariance(rng):
    g = np.zeros((6, 6))
    g[0, 3], g[3, 0] = 0.4, -0.4
    rho = ga.gaussian_state_from_covariance(g)
    assert np.max(np.abs(ga.covariance_of(rho) - g)) < 1e-12


@given(seeds, st.integers(1, 3))
def test_normal_form_reconstructs(seed, n):
    g = ga.random_covariance(n, np.random.default_rng(seed))
    nf = ga.normal_form(g)
    assert np.all(nf.lambdas >= 0)
    assert np.max(np.abs(nf.rotation @ nf.rotation.T - np.eye(2 * n))) < 1e-12
    assert np.max(np.abs(nf.rotation.T @ nf.block_matrix() @ nf.rotation - g)) < 1e-12


@given(seeds, st.integers(1, 3))
def test_spectrum_from_normal_form(seed, n):
    state = ga.random_gaussian_state(n, np.random.default_rng(seed))
    assert np.max(np.abs(np.sort(np.linalg.eigvalsh(state.density)) - state.eigenvalues())) < 1e-12


def test_rejects_bad_covariance():
    with pytest.raises(ga.GaussianError):
        ga.GaussianState(np.array([[0.0, 1.5], [-1.5, 0.0]]))
    with pytest.raises(ga.GaussianError):
        ga.GaussianState(np.array([[0.0, 0.5], [0.5, 0.0]]))


# -- Wick -------------------------------------------------------------------

@given(seeds, st.integers(1, 3), st.lists(st.integers(0, 5), min_size=1, max_size=6))
def test_wick_against_direct_moments(seed, n, raw):
    state = ga.random_gaussian_state(n, np.random.default_rng(seed))
    idx = tuple(i % (2 * n) for i in raw)
    assert abs(ga.wick_moment(state, idx) - ga.direct_moment(state.density, idx)) < 1e-10


def test_two_point_function(rng):
    state = ga.random_gaussian_state(2, rng)
    rho = state.density
    two = state.two_point()
    for i in range(4):
        for j in range(4):
            assert abs(ga.direct_moment(rho, (i, j)) - two[i, j]) < 1e-12


def test_odd_moments_vanish(rng):
    state = ga.random_gaussian_state(3, rng)
    for idx in [(0,), (1, 2, 3), (0, 1, 2, 3, 4)]:
        assert ga.wick_moment(state, idx) == 0
        assert abs(ga.direct_moment(state.density, idx)) < 1e-12


# -- Gibbs ------------------------------------------------------------------

def self_dual(n, rng):
    a = rng.standard_normal((2 * n, 2 * n))
    return 1j * (a - a.T)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_gibbs_covariance_is_hyperbolic_tangent(n, rng):
    h = self_dual(n, rng)
    beta = 0.8
    rho = ga.gibbs_state(h, beta)
    expected = 1j * scipy.linalg.tanhm(beta * h)
    assert np.max(np.abs(expected.imag)) < 1e-12
    assert np.max(np.abs(ga.covariance_of(rho) - expected.real)) < 1e-10


def test_gibbs_is_gaussian_and_even(rng):
    h = self_dual(2, rng)
    rho = ga.gibbs_state(h, 1.3)
    assert cl.is_even(rho)
    state = ga.GaussianState(ga.covariance_of(rho))
    assert abs(ga.wick_moment(state, (0, 1, 2, 3)) - ga.direct_moment(rho, (0, 1, 2, 3))) < 1e-10
    assert np.max(np.abs(state.density - rho)) < 1e-10


def test_gibbs_limits(rng):
    h = self_dual(2, rng)
    assert np.max(np.abs(ga.gibbs_state(h, 0.0) - np.eye(4) / 4)) < 1e-15
    assert np.max(np.abs(ga.gibbs_state(np.zeros((4, 4)), 5.0) - np.eye(4) / 4)) < 1e-15


def test_gibbs_rejects_non_self_dual(rng):
    with pytest.raises(ga.GaussianError):
        ga.gibbs_state(np.eye(4), 1.0)
    a = rng.standard_normal((4, 4))
    with pytest.raises(ga.GaussianError):
        ga.gibbs_state(a - a.T, 1.0)
    with pytest.raises(ga.GaussianError):
        ga.gibbs_state(self_dual(2, rng), math.inf)


# -- symbol -------------------------------------------------------------------

def test_symbol_of_tracial_state():
    for n in (1, 2, 3):
        assert np.max(np.abs(ga.symbol_of(np.eye(2**n) / 2**n) - 0.5 * np.eye(2 * n))) < 1e-15


def test_symbol_of_vacuum():
    vacuum = np.diag([1.0, 0.0]).astype(complex)
    assert np.allclose(ga.symbol_of(vacuum), np.diag([1.0, 0.0]))


@given(seeds, st.integers(1, 3))
def test_symbol_constraints(seed, n):
    rho = ga.random_gaussian_state(n, np.random.default_rng(seed)).density
    s = ga.symbol_of(rho)
    w = np.linalg.eigvalsh(s)
    assert w.min() > -1e-12 and w.max() < 1 + 1e-12
    swap = ga.self_dual_swap(n)
    assert np.max(np.abs(s + swap @ s.conj() @ swap - np.eye(2 * n))) < 1e-12


@given(seeds, st.integers(1, 3))
def test_symbol_affine_in_covariance(seed, n):
    rho = ga.random_even_state(n, np.random.default_rng(seed), kind="wishart")
    assert np.max(np.abs(ga.symbol_of(rho) - ga.symbol_from_covariance(ga.covariance_of(rho)))) < 1e-12


def test_even_state_generators(rng):
    for kind in ("mixture", "wishart"):
        rho = ga.random_even_state(2, rng, kind=kind)
        assert cl.is_even(rho)
        assert abs(np.trace(rho) - 1) < 1e-12
    with pytest.raises(ga.GaussianError):
        ga.random_even_state(2, rng, kind="nope")
