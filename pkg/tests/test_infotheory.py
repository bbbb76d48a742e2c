import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fermionic_epi import channels as ch
from fermionic_epi import gaussian as ga
from fermionic_epi import infotheory as it

seeds = st.integers(0, 2**32 - 1)


def single_mode(x):
    return ga.gaussian_state_from_covariance(np.array([[0.0, x], [-x, 0.0]]))


def binary_entropy(p):
    return -sum(q * math.log(q) for q in (p, 1 - p) if q > 0)


# -- entropy ----------------------------------------------------------------------

@pytest.mark.parametrize("x", [0.0, 0.3, 0.9, 1.0])
def test_single_mode_entropy(x):
    assert it.von_neumann_entropy(single_mode(x)) == pytest.approx(binary_entropy((1 + x) / 2), abs=1e-12)


@given(seeds, st.integers(1, 3))
def test_gaussian_entropy_from_normal_form(seed, n):
    state = ga.random_gaussian_state(n, np.random.default_rng(seed))
    expected = sum(binary_entropy((1 + lam) / 2) for lam in state.normal_form.lambdas)
    assert it.von_neumann_entropy(state.density) == pytest.approx(expected, abs=1e-10)


@given(seeds, st.integers(1, 3))
def test_entropy_power_range(seed, n):
    rho = ga.random_even_state(n, np.random.default_rng(seed), kind="wishart")
    assert 1.0 <= it.entropy_power(rho) <= 2.0 + 1e-12


def test_entropy_power_extremes(rng):
    assert it.entropy_power(np.eye(8) / 8) == pytest.approx(2.0)
    pure = ga.random_gaussian_state(3, rng, pure=True).density
    assert it.entropy_power(pure) == pytest.approx(1.0, abs=1e-9)


# -- relative entropy -------------------------------------------------------------

def test_relative_entropy_basic(rng):
    a = ga.random_gaussian_state(2, rng).density
    b = ga.random_gaussian_state(2, rng).density
    assert it.relative_entropy(a, a) == pytest.approx(0.0, abs=1e-12)
    assert it.relative_entropy(a, b) > 0
    mixed = np.eye(4) / 4
    assert it.relative_entropy(a, mixed) == pytest.approx(2 * math.log(2) - it.von_neumann_entropy(a))


def test_relative_entropy_support_condition():
    assert it.relative_entropy(single_mode(0.2), single_mode(1.0)) == math.inf
    assert math.isfinite(it.relative_entropy(single_mode(1.0), single_mode(0.2)))


@given(seeds)
def test_relative_entropy_contracts_under_channel(seed):
    rng = np.random.default_rng(seed)
    a1, a2, b = (ga.random_gaussian_state(1, rng).density for _ in range(3))
    lam = float(rng.uniform(0, 1))
    before = it.relative_entropy(a1, a2)
    after = it.relative_entropy(ch.apply_beam_splitter_channel(a1, b, lam), ch.apply_beam_splitter_channel(a2, b, lam))
    assert after <= before + 1e-10


# -- Fisher information -------------------------------------------------------------

@pytest.mark.parametrize("x", [0.1, 0.5, 0.95])
def test_single_mode_fisher_closed_form(x):
    rho = single_mode(x)
    for j in range(2):
        assert it.fisher_info(rho, j) == pytest.approx(4 * x * math.atanh(x), rel=1e-12)
    assert it.entropy_variation_rate(rho) == pytest.approx(8 * x * math.atanh(x), rel=1e-12)


def test_fisher_is_relative_entropy_of_reflection(rng):
    rho = ga.random_even_state(2, rng, kind="wishart")
    from fermionic_epi.clifford import majoranas

    for j, r in enumerate(majoranas(2)):
        assert it.fisher_info(rho, j) == pytest.approx(2 * it.relative_entropy(r @ rho @ r, rho), rel=1e-10)


@given(seeds)
def test_fisher_matches_finite_difference(seed):
    rho = ga.random_gaussian_state(2, np.random.default_rng(seed)).density
    for j in range(4):
        exact = it.fisher_info(rho, j)
        assert abs(it.fisher_info_fd(rho, j, 1e-3) - exact) <= 1e-4 * exact
        assert abs(it.fisher_info_fd(rho, j, 1e-3, unitary=False) + exact) <= 1e-4 * exact
        assert abs(it.fisher_info_richardson(rho, j) - exact) <= 1e-6 * exact


@given(seeds, st.floats(0.1, 3.0))
def test_fisher_scaling_and_sign(seed, alpha):
    rho = ga.random_even_state(2, np.random.default_rng(seed), kind="wishart")
    for j in range(4):
        base = it.fisher_info(rho, j)
        assert base >= -1e-9
        assert it.fisher_info(rho, j, alpha) == pytest.approx(alpha**2 * base, rel=1e-9, abs=1e-12)
        assert it.fisher_info_fd(rho, j, 1e-3, alpha=alpha) == pytest.approx(alpha**2 * base, rel=1e-4)


def test_fisher_of_tracial_state_vanishes():
    assert it.entropy_variation_rate(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-14)


def test_fd_step_validation(rng):
    with pytest.raises(ValueError):
        it.fisher_info_fd(np.eye(2) / 2, 0, 1.0)


def test_total_fisher_equals_generator_rate(rng):
    rho = ga.random_even_state(2, rng, kind="wishart")
    assert it.entropy_variation_rate(rho) == pytest.approx(it.entropy_rate_from_generator(rho), rel=1e-10)


def test_entropy_report_flags_clipping(rng):
    pure = ga.random_gaussian_state(1, rng, pure=True).density
    report = it.entropy_report(pure)
    assert report.clipped
    mixed = it.entropy_report(ga.random_gaussian_state(2, rng).density)
    assert not mixed.clipped
    assert mixed.total_fisher == pytest.approx(sum(mixed.fisher))


# -- de Bruijn, Stam, EPI ------------------------------------------------------------

def test_debruijn_single_mode_closed_form():
    # Gamma decays as e^{-8t}: dS/dt = 8 x atanh(x) at x = e^{-8t} x0
    rho = single_mode(0.7)
    [pt] = it.debruijn_check(rho, [0.1])
    x = 0.7 * math.exp(-0.8)
    assert pt.fisher == pytest.approx(8 * x * math.atanh(x), rel=1e-10)
    assert pt.relative_defect < 1e-6


@given(seeds)
def test_debruijn(seed):
    rho = ga.random_even_state(2, np.random.default_rng(seed), kind="mixture")
    for pt in it.debruijn_check(rho, [0.05, 0.3]):
        assert pt.relative_defect < 1e-4


def test_stam_equal_inputs_saturates(rng):
    a = ga.random_gaussian_state(2, rng).density
    r = it.stam_check(a, a, 0.5, 1.0, 1.0)
    assert r.weighted_slack == pytest.approx(0.0, abs=1e-10)
    assert r.harmonic_slack == pytest.approx(0.0, abs=1e-10)


def test_stam_skips_tracial_inputs(rng):
    a = ga.random_gaussian_state(1, rng).density
    r = it.stam_check(a, np.eye(2) / 2, 0.5, 1.0, 1.0)
    assert r.skipped and r.harmonic_slack is None


def test_stam_harmonic_counterexample_single_mode():
    # J(x) = 8 x atanh(x) is convex with J ~ 8 x^2 near 0, so 1/J is convex there
    a, b = single_mode(0.1), single_mode(0.5)
    r = it.stam_check(a, b, 0.5, 1.0, 1.0)
    jx = lambda x: 8 * x * math.atanh(x)
    assert r.fisher_out == pytest.approx(jx(0.3), rel=1e-10)
    assert r.harmonic_slack == pytest.approx(1 / jx(0.3) - 0.5 / jx(0.1) - 0.5 / jx(0.5), rel=1e-9)
    assert r.harmonic_slack < 0


@given(seeds, st.floats(0.0, 1.0), st.integers(1, 2))
def test_entropy_power_inequality(seed, lam, n):
    rng = np.random.default_rng(seed)
    a = ga.random_even_state(n, rng, kind="wishart")
    b = ga.random_even_state(n, rng, kind="wishart")
    assert it.epi_gap(a, b, lam) >= -1e-10


def test_epi_equal_inputs_is_equality(rng):
    a = ga.random_gaussian_state(2, rng).density
    assert it.epi_gap(a, a, 0.3) == pytest.approx(0.0, abs=1e-12)


def test_proof_trace_rises_to_one(rng):
    a = ga.random_gaussian_state(2, rng).density
    b = ga.random_gaussian_state(2, rng).density
    tr = it.epi_proof_trace(a, b, 0.4, np.linspace(0, 3, 13))
    assert tr.ratio[0] <= 1 + 1e-12
    assert tr.max_drop <= 1e-9
    assert tr.ratio[-1] == pytest.approx(1.0, abs=1e-6)


# -- resolvent quadrature -------------------------------------------------------------

def test_quadrature_identities(rng):
    a = ga.random_gaussian_state(2, rng).density
    b = ga.random_even_state(2, rng)
    r = it.functional_identity_check(a, b)
    assert r.log_defect < 1e-6
    assert r.difference_defect < 1e-6


@pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
def test_epi_check_identical_inputs(lam, rng):
    a = ga.random_gaussian_state(2, rng).density
    rep = it.epi_check(a, a, lam)
    assert rep.passed
    assert abs(rep.records[0].value) < 1e-9


def test_epi_check_pure_inputs(rng):
    a = ga.random_gaussian_state(2, rng, pure=True).density
    b = ga.random_gaussian_state(2, rng, pure=True).density
    rep = it.epi_check(a, b, 0.3)
    assert rep.passed
    assert rep.rows[0]["E_A"] == pytest.approx(1.0, abs=1e-6)
    assert rep.rows[0]["E_I"] >= 1.0 - 1e-9
    with pytest.raises(ValueError):
        it.epi_check(a, b, 1.5)


@given(seeds, st.floats(0.0, 1.0), st.floats(-3.0, 3.0))
def test_epi_verdict_survives_common_entropy_shift(seed, lam, shift):
    # adding c to every entropy multiplies every entropy power by e^{c/N}
    rng = np.random.default_rng(seed)
    a, b = ga.random_gaussian_state(2, rng).density, ga.random_gaussian_state(2, rng).density
    out = ch.apply_beam_splitter_channel(a, b, lam)
    e = [math.exp((it.von_neumann_entropy(r) + shift) / 2) for r in (a, b, out)]
    shifted_gap = e[2] - lam * e[0] - (1 - lam) * e[1]
    assert shifted_gap == pytest.approx(math.exp(shift / 2) * it.epi_gap(a, b, lam), abs=1e-12)
