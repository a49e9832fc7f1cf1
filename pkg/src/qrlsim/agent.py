"""Classical, quantum-only and hybrid agents playing epochs against a DSE environment.

A quantum round spends ``k`` epochs on Grover iterations and one classical
test epoch on the measured sequence, so for ``k = 1`` it costs two epochs.

Because only rewarded weights ever grow, the winning probability is a
function of the number of rewards found so far. :func:`round_tables`
exploits this to precompute, per reward count, the iterations to use and
their success probability; the kernel in :mod:`qrlsim.kernel` then only
samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernel
from .amplitude import amplify, measure, optimal_iterations, prepare_initial, success_probability
from .environment import DseEnvironment, play_classical_epoch
from .policy import Policy, action_distribution, sample, update, winning_probability

SWITCH_Q = (3 - math.sqrt(2)) / 4
STRATEGIES = ("classical", "quantum_only", "hybrid")
BACKENDS = ("abstract", "photonic")
EPOCH_KINDS = ("classical", "grover", "test")

Seed = Union[int, np.random.SeedSequence, None]


@dataclass(frozen=True)
class AgentConfig:
    strategy: str = "hybrid"
    n_cap: int = 1
    switch_q: float = SWITCH_Q
    lam: float = 2.0
    max_epochs: int = 1000
    backend: str = "abstract"
    visibility: float = 1.0

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0 < self.switch_q < 1:
            raise ValueError("switch_q must lie in (0, 1)")
        if self.n_cap < 1:
            raise ValueError("n_cap must be >= 1")
        if self.lam < 0:
            raise ValueError("lam must be non-negative")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be non-negative")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if not 0 <= self.visibility <= 1:
            raise ValueError("visibility must lie in [0, 1]")
        if self.backend == "photonic" and self.n_cap != 1:
            raise ValueError("the photonic backend compiles single-iteration rounds only (n_cap = 1)")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    strategy: str
    sequence: int
    reward: int
    q_before: float
    k: int


@dataclass
class EpochLedger:
    """Array-backed epoch history of one agent.

    ``sequence`` is -1 on Grover epochs, which play no classical sequence.
    ``share`` holds the reward spread evenly over the epochs of its round.
    """

    strategy: np.ndarray
    sequence: np.ndarray
    reward: np.ndarray
    q_before: np.ndarray
    k: np.ndarray
    share: np.ndarray
    policy: Optional[Policy] = None
    truncated: bool = False
    final_q: float = float("nan")

    def __len__(self):
        return len(self.strategy)

    @property
    def records(self) -> list[EpochRecord]:
        return [
            EpochRecord(i, EPOCH_KINDS[s], int(a), int(r), float(q), int(k))
            for i, (s, a, r, q, k) in enumerate(
                zip(self.strategy, self.sequence, self.reward, self.q_before, self.k)
            )
        ]

    @property
    def rewarded_sequences(self) -> list[int]:
        """Time-ordered rewarded sequences (``l_J``)."""
        return [int(s) for s in self.sequence[self.reward == 1]]

    @property
    def reward_epochs(self) -> np.ndarray:
        return np.flatnonzero(self.reward == 1)

    def to_csv(self) -> str:
        lines = ["epoch,strategy,sequence,reward,q_before,k"]
        for r in self.records:
            lines.append(f"{r.epoch},{r.strategy},{r.sequence},{r.reward},{r.q_before:.12f},{r.k}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_records(cls, records, policy=None, truncated=False, final_q=float("nan")):
        records = list(records)
        share = np.zeros(len(records))
        i = 0
        while i < len(records):
            rec = records[i]
            if rec.strategy == "classical":
                share[i] = rec.reward
                i += 1
                continue
            end = i + rec.k
            r = records[end].reward
            share[i : end + 1] = r / (rec.k + 1.0)
            i = end + 1
        return cls(
            strategy=np.array([EPOCH_KINDS.index(r.strategy) for r in records], dtype=np.int8),
            sequence=np.array([r.sequence for r in records], dtype=np.int64),
            reward=np.array([r.reward for r in records], dtype=np.int8),
            q_before=np.array([r.q_before for r in records], dtype=np.float64),
            k=np.array([r.k for r in records], dtype=np.int32),
            share=share,
            policy=policy,
            truncated=truncated,
            final_q=final_q,
        )


def _rewarded_ids(env: DseEnvironment) -> np.ndarray:
    return np.flatnonzero(env.reward_table)


def classical_epoch(policy: Policy, env: DseEnvironment, rng: np.random.Generator, epoch: int = 0):
    q = winning_probability(policy, _rewarded_ids(env))
    sid = sample(policy, rng)
    _, r = play_classical_epoch(env, env.decode(sid))
    return EpochRecord(epoch, "classical", sid, r, q, 0), update(policy, sid, r)


def quantum_round(policy: Policy, env: DseEnvironment, rng: np.random.Generator,
                  n_cap: int = 1, epoch: int = 0, k: Optional[int] = None):
    """Amplify, measure, then test the measured sequence classically.

    Returns ``(grover_records, test_record, policy)``; ``grover_records``
    holds one record per Grover iteration. ``k`` overrides the optimal plan.
    """
    q = winning_probability(policy, _rewarded_ids(env))
    if q <= 0:
        raise ValueError("no rewarded sequence reachable (q = 0)")
    if k is None:
        k = optimal_iterations(q, n_cap).k
    psi = prepare_initial(action_distribution(policy))
    sid = measure(amplify(env, psi, k), rng)
    _, r = play_classical_epoch(env, env.decode(sid))
    grover = tuple(EpochRecord(epoch + i, "grover", -1, 0, q, k) for i in range(k))
    test = EpochRecord(epoch + k, "test", sid, r, q, k)
    return grover, test, update(policy, sid, r)


def should_switch(q: float, switch_q: float = SWITCH_Q) -> bool:
    return q >= switch_q


def planned_iterations(config: AgentConfig, q: float) -> int:
    """Grover iterations for the next round; 0 means a plain classical epoch."""
    if config.strategy == "classical":
        return 0
    if config.strategy == "quantum_only":
        if q <= 0:
            raise ValueError("quantum_only agent needs a reachable reward (q > 0)")
        return config.n_cap
    if q <= 0 or should_switch(q, config.switch_q):
        return 0
    return optimal_iterations(q, config.n_cap).k


def q_by_rewards(env: DseEnvironment, lam: float, count: int) -> np.ndarray:
    """Winning probability of a fresh policy after ``j`` rewards, ``j = 0 .. count-1``."""
    w_rew = float(env.reward_table.sum())
    w_all = float(env.sequence_count)
    j = np.arange(count, dtype=np.float64)
    return (w_rew + lam * j) / (w_all + lam * j)


def round_tables(config: AgentConfig, env: DseEnvironment):
    """Per-reward-count ``(plan_k, success, q_table)`` arrays for the kernel."""
    count = config.max_epochs + 1
    q_table = q_by_rewards(env, config.lam, count)
    plan = np.zeros(count, dtype=np.int32)
    succ = np.zeros(count, dtype=np.float64)
    cache: dict[float, tuple[int, float]] = {}
    for j, q in enumerate(q_table.tolist()):
        if q not in cache:
            k = planned_iterations(config, q)
            if k == 0:
                s = q
            elif config.backend == "photonic":
                from .photonic import photonic_success

                s = photonic_success(q, config.visibility)
            else:
                s = success_probability(q, k)
            cache[q] = (k, s)
        plan[j], succ[j] = cache[q]
    return plan, succ, q_table


def _kernel_arrays(m: int):
    return (
        np.zeros(m, dtype=np.int8),
        np.zeros(m, dtype=np.int64),
        np.zeros(m, dtype=np.int8),
        np.zeros(m, dtype=np.float64),
        np.zeros(m, dtype=np.int32),
        np.zeros(m, dtype=np.float64),
    )


def agent_uniforms(seed: Seed, count: int) -> np.ndarray:
    return np.random.default_rng(seed).random(count)


def run_agent(config: AgentConfig, env: DseEnvironment, seed: Seed = None,
              engine: str = "kernel", tables=None) -> EpochLedger:
    """Play ``config.max_epochs`` epochs (fewer if a final round does not fit).

    ``engine="kernel"`` runs the compiled/interpreted epoch loop;
    ``engine="reference"`` plays every epoch through the statevector
    operations of this module (slow, abstract backend only).
    """
    if engine == "reference":
        return _run_reference(config, env, seed)
    if engine != "kernel":
        raise ValueError(f"unknown engine {engine!r}")
    m = config.max_epochs
    plan, succ, q_table = round_tables(config, env) if tables is None else tables
    rewarded = _rewarded_ids(env).astype(np.int64)
    others = np.flatnonzero(~env.reward_table).astype(np.int64)
    weights = np.ones(env.sequence_count)
    out = _kernel_arrays(m)
    n, j = kernel.simulate_agent(weights, rewarded, others, plan, succ, q_table, float(config.lam),
                                 agent_uniforms(seed, m), *out)
    strategy, seq, reward, q_before, k, share = (a[:n] for a in out)
    return EpochLedger(strategy, seq, reward, q_before, k, share,
                       policy=Policy(weights, config.lam), truncated=n < m,
                       final_q=float(q_table[j]))


def _run_reference(config: AgentConfig, env: DseEnvironment, seed: Seed) -> EpochLedger:
    if config.backend != "abstract":
        raise ValueError("the reference engine simulates the abstract backend only")
    rng = np.random.default_rng(seed)
    policy = Policy.uniform(env.sequence_count, config.lam)
    rewarded = _rewarded_ids(env)
    records: list[EpochRecord] = []
    e = 0
    truncated = False
    while e < config.max_epochs:
        q = winning_probability(policy, rewarded)
        k = planned_iterations(config, q)
        if k == 0:
            rec, policy = classical_epoch(policy, env, rng, epoch=e)
            records.append(rec)
            e += 1
            continue
        if e + k + 1 > config.max_epochs:
            truncated = True
            break
        grover, test, policy = quantum_round(policy, env, rng, config.n_cap, epoch=e, k=k)
        records.extend(grover)
        records.append(test)
        e += k + 1
    return EpochLedger.from_records(records, policy=policy, truncated=truncated,
                                    final_q=winning_probability(policy, rewarded))


def reward_series(ledger: EpochLedger, distribute: bool = True) -> np.ndarray:
    """Per-epoch reward; quantum rewards either spread over their round or booked on the test epoch."""
    if distribute:
        return np.asarray(ledger.share, dtype=np.float64).copy()
    return np.asarray(ledger.reward, dtype=np.float64)
