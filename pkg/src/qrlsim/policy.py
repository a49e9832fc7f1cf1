"""Projective-simulation policy over whole action sequences.

Every sequence id carries a weight ``h >= 1``; the induced distribution is
the normalized weight vector and a reward ``r`` adds ``lam * r`` to the
weight of the sequence that earned it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class Policy:
    """Weight table over ``sequence_count`` action sequences.

    Instances are values: :func:`update` returns a new policy and leaves
    the original untouched.
    """

    weights: np.ndarray
    lam: float = 2.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if w.size and np.any(w < 1.0):
            raise ValueError("weights must be >= 1")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, n: int, lam: float = 2.0) -> "Policy":
        return cls(np.ones(int(n)), lam)

    @property
    def sequence_count(self) -> int:
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, Policy):
            return NotImplemented
        return self.lam == other.lam and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.lam, self.weights.tobytes()))


@dataclass
class PolicyTrace:
    """Time-ordered record of rewarded sequences (the list ``l_J``)."""

    history: list[tuple[int, int]] = field(default_factory=list)

    @property
    def rewards_found(self) -> int:
        return len(self.history)

    def record(self, sequence: int, epoch: int) -> None:
        if self.history and epoch <= self.history[-1][1]:
            raise ValueError("epoch indices must be strictly increasing")
        self.history.append((int(sequence), int(epoch)))

    @property
    def sequences(self) -> list[int]:
        return [s for s, _ in self.history]


def _check_id(policy: Policy, sequence: int) -> int:
    s = int(sequence)
    if not 0 <= s < policy.sequence_count:
        raise ValueError(f"invalid sequence id {sequence} for {policy.sequence_count} sequences")
    return s


def action_distribution(policy: Policy) -> np.ndarray:
    if policy.sequence_count == 0:
        raise ValueError("no action sequences")
    return policy.weights / policy.weights.sum()


def update(policy: Policy, sequence: int, reward: int) -> Policy:
    s = _check_id(policy, sequence)
    if reward not in (0, 1):
        raise ValueError("reward must be 0 or 1")
    if reward == 0:
        return policy
    w = policy.weights.copy()
    w[s] += policy.lam * reward
    return Policy(w, policy.lam)


def winning_probability(policy: Policy, rewarded: Iterable[int]) -> float:
    ids = [_check_id(policy, s) for s in set(rewarded)]
    if not ids:
        return 0.0
    w = policy.weights
    return float(w[ids].sum() / w.sum())


def sample(policy: Policy, rng: np.random.Generator) -> int:
    """Inverse-CDF draw in canonical id order; consumes one uniform."""
    cum = np.cumsum(policy.weights)
    x = rng.random() * cum[-1]
    return min(int(np.searchsorted(cum, x, side="right")), policy.sequence_count - 1)


def replay(n: int, lam: float, rewarded_sequences: Iterable[int]) -> Policy:
    """Policy reached from a fresh one after observing the rewards ``l_J``."""
    w = np.ones(int(n))
    for s in rewarded_sequences:
        w[int(s)] += lam
    return Policy(w, lam)


def rewards_to_reach(n: int, lam: float, q_learn: float) -> int:
    """Rewards a one-winner agent needs before its winning probability hits ``q_learn``.

    Smallest ``j`` with ``(1 + lam*j) / (n + lam*j) >= q_learn``.
    """
    if q_learn >= 1:
        raise ValueError("q_learn >= 1 is unreachable")
    if q_learn <= 1.0 / n:
        return 0
    if lam <= 0:
        raise ValueError("policy never learns (lam = 0)")
    # closed-form estimate, then settle on the exact boundary
    j = max(0, int(np.ceil((q_learn * n - 1) / (lam * (1 - q_learn)))) - 1)
    while (1 + lam * j) / (n + lam * j) < q_learn:
        j += 1
    while j > 0 and (1 + lam * (j - 1)) / (n + lam * (j - 1)) >= q_learn:
        j -= 1
    return j
