"""Deterministic strictly-epochal environments and their quantum oracles.

Sequences of ``L`` actions over an alphabet of size ``A`` are numbered
lexicographically (first action most significant), giving ``N = A**L``
stable ids shared by every other module.

The reward-register basis used by :func:`reward_register_unitary` is the
tensor product ``|a>_A |r>_R`` flattened as index ``2*a + r``.
"""
from __future__ import annotations

from functools import cached_property
from typing import Hashable, Sequence

import numpy as np

MAX_ENUMERABLE = 2**24

UP, DOWN, LEFT, RIGHT = range(4)
GRID_ACTIONS = ("up", "down", "left", "right")


class DseEnvironment:
    """Base class: subclasses supply ``transition`` and ``reward``."""

    epoch_length: int
    n_actions: int
    initial_percept: Hashable

    def transition(self, percept, action: int):
        raise NotImplementedError

    def reward(self, percepts: Sequence) -> int:
        """Reward bit from the full percept trajectory ``s_0 .. s_L``."""
        raise NotImplementedError

    @property
    def sequence_count(self) -> int:
        return self.n_actions**self.epoch_length

    def encode(self, actions: Sequence[int]) -> int:
        self._check_actions(actions)
        idx = 0
        for a in actions:
            idx = idx * self.n_actions + int(a)
        return idx

    def decode(self, sequence: int) -> tuple[int, ...]:
        if not 0 <= sequence < self.sequence_count:
            raise ValueError(f"sequence id {sequence} out of range")
        out = []
        for _ in range(self.epoch_length):
            sequence, a = divmod(sequence, self.n_actions)
            out.append(a)
        return tuple(reversed(out))

    def _check_actions(self, actions):
        if len(actions) != self.epoch_length:
            raise ValueError(f"expected {self.epoch_length} actions, got {len(actions)}")
        for a in actions:
            if not 0 <= int(a) < self.n_actions:
                raise ValueError(f"action {a} outside alphabet of size {self.n_actions}")

    @cached_property
    def reward_table(self) -> np.ndarray:
        """Boolean reward per sequence id (read-only)."""
        table = np.zeros(self.sequence_count, dtype=bool)
        table[sorted(enumerate_rewarded(self))] = True
        table.setflags(write=False)
        return table


class OneWinnerEnvironment(DseEnvironment):
    """Single-step environment with ``n`` actions and exactly one rewarded one."""

    epoch_length = 1
    initial_percept = 0

    def __init__(self, n: int, winner: int = 0):
        if n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= winner < n:
            raise ValueError("winner out of range")
        self.n_actions = int(n)
        self.winner = int(winner)

    def transition(self, percept, action):
        return 1 + int(action)

    def reward(self, percepts):
        return int(percepts[-1] == 1 + self.winner)

    def rewarded_ids(self) -> set[int]:
        return {self.winner}

    def __repr__(self):
        return f"OneWinnerEnvironment(n={self.n_actions}, winner={self.winner})"


class GridWorldEnvironment(DseEnvironment):
    """Rectangular grid; cells are ``(x, y)`` with ``x`` to the right and ``y`` down.

    Moves that would leave the grid keep the agent in place.
    """

    n_actions = 4

    def __init__(self, width: int, height: int, start=(0, 0), goal=None, steps: int = 2):
        if width < 1 or height < 1 or steps < 1:
            raise ValueError("width, height and steps must be positive")
        goal = (width - 1, height - 1) if goal is None else goal
        for name, cell in (("start", start), ("goal", goal)):
            if not (0 <= cell[0] < width and 0 <= cell[1] < height):
                raise ValueError(f"{name} {cell} outside the grid")
        self.width, self.height = int(width), int(height)
        self.start = (int(start[0]), int(start[1]))
        self.goal = (int(goal[0]), int(goal[1]))
        self.epoch_length = int(steps)
        self.initial_percept = self.start

    def transition(self, percept, action):
        x, y = percept
        if action == UP:
            y -= 1
        elif action == DOWN:
            y += 1
        elif action == LEFT:
            x -= 1
        elif action == RIGHT:
            x += 1
        else:
            raise ValueError(f"unknown action {action}")
        x = min(max(x, 0), self.width - 1)
        y = min(max(y, 0), self.height - 1)
        return (x, y)

    def reward(self, percepts):
        return int(percepts[-1] == self.goal)

    def __repr__(self):
        return (
            f"GridWorldEnvironment({self.width}x{self.height}, start={self.start}, "
            f"goal={self.goal}, steps={self.epoch_length})"
        )


def play_classical_epoch(env: DseEnvironment, actions: Sequence[int]) -> tuple[list, int]:
    """Percepts ``s_0 .. s_L`` visited by ``actions`` and the epoch reward."""
    env._check_actions(actions)
    percepts = [env.initial_percept]
    for a in actions:
        percepts.append(env.transition(percepts[-1], int(a)))
    return percepts, int(env.reward(percepts))


def enumerate_rewarded(env: DseEnvironment) -> set[int]:
    n = env.sequence_count
    if n > MAX_ENUMERABLE:
        raise ValueError(f"{n} sequences exceed the enumeration guard {MAX_ENUMERABLE}")
    if isinstance(env, OneWinnerEnvironment):
        return env.rewarded_ids()
    return {s for s in range(n) if play_classical_epoch(env, env.decode(s))[1]}


def _amplitudes(state) -> np.ndarray:
    return np.asarray(getattr(state, "amplitudes", state), dtype=np.complex128)


def _wrap(state, amps):
    from .amplitude import StateVector

    if isinstance(state, StateVector):
        return StateVector(amps, state.basis)
    return amps


def oracle_phase(env: DseEnvironment, state):
    """Negate the amplitude of every rewarded sequence."""
    amps = _amplitudes(state)
    if amps.shape != (env.sequence_count,):
        raise ValueError(f"state dimension {amps.shape} != ({env.sequence_count},)")
    out = np.where(env.reward_table, -amps, amps)
    return _wrap(state, out)


def reward_register_unitary(env: DseEnvironment, state):
    """Flip the reward qubit on rewarded action subspaces (index ``2*a + r``)."""
    amps = _amplitudes(state)
    if amps.shape != (2 * env.sequence_count,):
        raise ValueError(f"state dimension {amps.shape} != ({2 * env.sequence_count},)")
    pairs = amps.reshape(-1, 2)
    out = np.where(env.reward_table[:, None], pairs[:, ::-1], pairs).reshape(-1)
    return _wrap(state, out)
