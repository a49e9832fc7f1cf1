import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qrlsim.amplitude import prepare_initial
from qrlsim.environment import (
    DOWN,
    LEFT,
    RIGHT,
    UP,
    DseEnvironment,
    GridWorldEnvironment,
    OneWinnerEnvironment,
    enumerate_rewarded,
    oracle_phase,
    play_classical_epoch,
    reward_register_unitary,
)


class NeverRewarded(DseEnvironment):
    """``n`` single-step actions, none rewarded."""

    def __init__(self, n):
        self.epoch_length, self.n_actions, self.initial_percept = 1, n, 0

    def transition(self, percept, action):
        return action

    def reward(self, percepts):
        return 0


def hand_grid(actions, w=2, h=2, start=(0, 0)):
    x, y = start
    for a in actions:
        dx, dy = {UP: (0, -1), DOWN: (0, 1), LEFT: (-1, 0), RIGHT: (1, 0)}[a]
        x, y = min(max(x + dx, 0), w - 1), min(max(y + dy, 0), h - 1)
    return x, y


def test_one_winner_rewards():
    env = OneWinnerEnvironment(100, 42)
    assert play_classical_epoch(env, [42])[1] == 1
    assert all(play_classical_epoch(env, [j])[1] == 0 for j in range(100) if j != 42)


def test_grid_right_down():
    env = GridWorldEnvironment(2, 2, (0, 0), (1, 1), 2)
    percepts, r = play_classical_epoch(env, [RIGHT, DOWN])
    assert percepts[-1] == (1, 1) and r == 1
    assert len(percepts) == 3 and percepts[0] == (0, 0)


def test_grid_matches_hand_simulation():
    env = GridWorldEnvironment(2, 2, (0, 0), (1, 1), 2)
    assert env.sequence_count == 16
    for actions in itertools.product(range(4), repeat=2):
        expected = int(hand_grid(actions) == (1, 1))
        assert play_classical_epoch(env, actions)[1] == expected


@pytest.mark.parametrize("bad", [[], [0, 1, 2], [4, 0], [-1, 0]])
def test_malformed_sequence(bad):
    with pytest.raises(ValueError):
        play_classical_epoch(GridWorldEnvironment(2, 2, (0, 0), (1, 1), 2), bad)


def test_encode_decode_roundtrip():
    env = GridWorldEnvironment(3, 3, (0, 0), (2, 2), 3)
    for s in range(env.sequence_count):
        assert env.encode(env.decode(s)) == s
    # lexicographic: first action most significant
    assert env.encode([1, 0, 0]) == 16


def test_enumerate_rewarded():
    assert enumerate_rewarded(OneWinnerEnvironment(100, 7)) == {7}
    env = GridWorldEnvironment(2, 2, (0, 0), (1, 1), 2)
    assert enumerate_rewarded(env) == {env.encode([RIGHT, DOWN]), env.encode([DOWN, RIGHT])}
    assert enumerate_rewarded(NeverRewarded(8)) == set()


def test_enumerate_guard():
    env = GridWorldEnvironment(4, 4, (0, 0), (3, 3), 13)  # 4^13 > 2^24
    with pytest.raises(ValueError):
        enumerate_rewarded(env)


def test_oracle_examples():
    env = OneWinnerEnvironment(4, 2)
    psi = prepare_initial(np.full(4, 0.25))
    out = oracle_phase(env, psi)
    assert np.allclose(out.amplitudes, [0.5, 0.5, -0.5, 0.5])
    assert np.allclose(oracle_phase(env, out).amplitudes, psi.amplitudes)
    assert np.allclose(oracle_phase(NeverRewarded(4), psi).amplitudes, psi.amplitudes)
    with pytest.raises(ValueError):
        oracle_phase(env, np.ones(3) / np.sqrt(3))


def test_reward_register_examples():
    env = OneWinnerEnvironment(3, 1)
    win0 = np.zeros(6)
    win0[2 * 1 + 0] = 1
    assert reward_register_unitary(env, win0)[2 * 1 + 1] == 1
    lose0 = np.zeros(6)
    lose0[2 * 0 + 0] = 1
    assert np.array_equal(reward_register_unitary(env, lose0), lose0)
    minus = np.zeros(6)
    minus[2], minus[3] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    assert np.allclose(reward_register_unitary(env, minus), -minus, atol=1e-12)
    with pytest.raises(ValueError):
        reward_register_unitary(env, np.ones(3))


def random_state(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


@given(st.integers(1, 64), st.integers(0, 2**31))
def test_phase_kickback(n, seed):
    rng = np.random.default_rng(seed)
    env = OneWinnerEnvironment(n, int(rng.integers(n)))
    phi = random_state(rng, n)
    minus = np.array([1, -1]) / np.sqrt(2)
    lhs = reward_register_unitary(env, np.kron(phi, minus))
    rhs = np.kron(oracle_phase(env, phi), minus)
    assert np.abs(lhs - rhs).max() < 1e-12
    assert abs(np.linalg.norm(lhs) - 1) < 1e-12
    assert abs(np.linalg.norm(oracle_phase(env, phi)) - 1) < 1e-12


def test_oracle_consistency_grid_exhaustive():
    env = GridWorldEnvironment(3, 2, (0, 1), (2, 0), 4)
    amps = np.ones(env.sequence_count) / np.sqrt(env.sequence_count)
    flipped = oracle_phase(env, amps) < 0
    classical = [play_classical_epoch(env, env.decode(s))[1] for s in range(env.sequence_count)]
    assert np.array_equal(flipped, np.array(classical, dtype=bool))


def test_base_class_is_abstract():
    env = DseEnvironment.__new__(DseEnvironment)
    with pytest.raises(NotImplementedError):
        env.transition(None, 0)
