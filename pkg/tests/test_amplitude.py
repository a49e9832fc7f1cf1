import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qrlsim.amplitude import (
    StateVector,
    amplify,
    grover_iterate,
    measure,
    optimal_iterations,
    prepare_initial,
    reflect_about,
    success_probability,
)
from qrlsim.environment import OneWinnerEnvironment


def one_winner_state(q, n=1000):
    """Policy state over ``n`` sequences with winner 0 at probability ``q``."""
    p = np.full(n, (1 - q) / (n - 1))
    p[0] = q
    return OneWinnerEnvironment(n, 0), prepare_initial(p)


def test_prepare_examples():
    assert np.array_equal(prepare_initial([1, 0, 0]).amplitudes, [1, 0, 0])
    assert np.allclose(prepare_initial(np.full(100, 0.01)).amplitudes, 0.1)
    assert np.allclose(prepare_initial([0.25, 0.75]).amplitudes, [0.5, math.sqrt(0.75)])


def test_prepare_errors():
    with pytest.raises(ValueError):
        prepare_initial([1.2, -0.2])
    with pytest.raises(ValueError):
        prepare_initial([0.5, 0.4])


def test_statevector_rejects_unnormalized():
    with pytest.raises(ValueError):
        StateVector(np.array([1.0, 1.0]))


def test_reflect_examples():
    psi = prepare_initial(np.full(4, 0.25))
    assert np.allclose(reflect_about(psi, psi).amplitudes, psi.amplitudes)
    perp = StateVector(np.array([1, -1, 0, 0]) / math.sqrt(2))
    assert np.allclose(reflect_about(psi, perp).amplitudes, -perp.amplitudes)
    e0 = StateVector(np.array([1.0, 0, 0, 0]))
    matrix = 2 * np.outer(psi.amplitudes, psi.amplitudes.conj()) - np.eye(4)
    out = reflect_about(psi, e0).amplitudes
    assert np.allclose(out, matrix @ e0.amplitudes, atol=1e-12)
    assert np.allclose(out, [-0.5, 0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        reflect_about(psi, StateVector(np.array([1.0, 0])))


def random_state(seed, n):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return StateVector(v / np.linalg.norm(v))


@given(st.integers(1, 32), st.integers(0, 2**31), st.integers(0, 2**31))
def test_reflection_properties(n, s1, s2):
    ref, phi = random_state(s1, n), random_state(s2, n)
    once = reflect_about(ref, phi)
    assert abs(np.linalg.norm(once.amplitudes) - 1) < 1e-12
    assert np.abs(reflect_about(ref, once).amplitudes - phi.amplitudes).max() < 1e-12


def test_grover_examples():
    env = OneWinnerEnvironment(100, 0)
    psi = prepare_initial(np.full(100, 0.01))
    assert grover_iterate(env, psi, psi).probabilities()[0] == pytest.approx(0.087616, abs=1e-12)
    env4 = OneWinnerEnvironment(4, 0)
    psi4 = prepare_initial(np.full(4, 0.25))
    assert grover_iterate(env4, psi4, psi4).probabilities()[0] == pytest.approx(1.0, abs=1e-12)


def test_grover_without_rewards_is_reflection():
    from test_environment import NeverRewarded

    psi = prepare_initial(np.full(4, 0.25))
    assert np.allclose(grover_iterate(NeverRewarded(4), psi, psi).amplitudes, psi.amplitudes)


@pytest.mark.parametrize("q", [0.001, 0.01, 0.1, 0.25, 0.396])
def test_statevector_matches_closed_form(q):
    env, psi = one_winner_state(q)
    state = psi
    for k in range(11):
        assert abs(state.probabilities()[0] - success_probability(q, k)) < 1e-12
        assert abs(np.linalg.norm(state.amplitudes) - 1) < 1e-12
        losers = state.amplitudes[1:]
        assert np.abs(losers - losers[0]).max() < 1e-12
        state = grover_iterate(env, psi, state)


def test_success_probability_examples():
    assert success_probability(0.3, 0) == pytest.approx(0.3)
    assert success_probability(0.01, 1) == pytest.approx(0.087616, abs=1e-12)
    assert success_probability(0.25, 1) == pytest.approx(1.0, abs=1e-12)
    assert 0 <= success_probability(1.0, 3) <= 1


def first_lobe(q):
    """Iteration counts with (2k+1) xi <= pi, before the success probability comes back up."""
    xi = math.asin(math.sqrt(q))
    return range(int((math.pi / xi - 1) / 2) + 1)


def brute_force_k(q):
    return max(first_lobe(q), key=lambda k: success_probability(q, k))


def test_optimal_iterations_examples():
    assert optimal_iterations(0.01).k == 7
    assert brute_force_k(0.01) == 7
    plan = optimal_iterations(0.01, 1)
    assert plan.k == 1 and plan.capped_by == "coherence_cap"
    assert optimal_iterations(0.5).k == 0
    assert max(range(4), key=lambda k: success_probability(0.5, k) - 1e-12 * k) == 0
    with pytest.raises(ValueError, match="no rewarded sequence reachable"):
        optimal_iterations(0.0)


@settings(max_examples=200)
@given(st.floats(1e-4, 0.999))
def test_optimal_iterations_is_argmax(q):
    k = optimal_iterations(q).k
    best = max(success_probability(q, j) for j in first_lobe(q))
    if k == 0:
        assert best <= q + 1e-12
    else:
        assert success_probability(q, k) >= best - 1e-12


@given(st.floats(1e-4, 0.999), st.integers(1, 20))
def test_cap_respected(q, n):
    plan = optimal_iterations(q, n)
    assert plan.k <= n
    if plan.k:
        assert success_probability(q, plan.k) > q


def test_measure():
    rng = np.random.default_rng(0)
    basis = StateVector(np.array([0, 0, 1.0]))
    assert all(measure(basis, rng) == 2 for _ in range(100))
    env, psi = one_winner_state(0.01, 100)
    state = amplify(env, psi, 1)
    cum = np.cumsum(state.probabilities())
    u = np.random.default_rng(5).random(1_000_000) * cum[-1]
    freq = np.mean(np.searchsorted(cum, u, side="right") == 0)
    assert abs(freq - 0.0876) < 1e-3
    r1, r2 = np.random.default_rng(3), np.random.default_rng(3)
    assert [measure(state, r1) for _ in range(50)] == [measure(state, r2) for _ in range(50)]
