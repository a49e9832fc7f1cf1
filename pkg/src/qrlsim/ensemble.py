"""Monte Carlo ensembles of independent agents and analytic learning-time predictors.

Agent ``i`` of an ensemble draws its uniforms from
``SeedSequence(master_seed, spawn_key=(i,))``; agents are processed in
fixed-size chunks and reduced in chunk order, so results do not depend on
the number of worker processes.
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernel
from .agent import AgentConfig, _kernel_arrays, agent_uniforms, round_tables
from .environment import DseEnvironment
from .policy import rewards_to_reach

CHUNK = 256


class LearningTimeWarning(UserWarning):
    pass


@dataclass
class EnsembleStats:
    config: AgentConfig
    n_agents: int
    master_seed: int
    counts: np.ndarray  # agents with data at each epoch
    eta_sum: np.ndarray
    eta_sumsq: np.ndarray
    raw_sum: np.ndarray
    raw_sumsq: np.ndarray
    n_epochs: np.ndarray  # per agent
    reward_epochs: list  # per agent, epochs of rewarded outcomes
    q_table: np.ndarray  # winning probability after j rewards
    q_learn: float = 0.37

    @property
    def strategy(self) -> str:
        return self.config.strategy

    @property
    def learning_times(self) -> np.ndarray:
        """Per-agent learning time for ``q_learn``; -1 marks censored agents."""
        return _first_passage(self, self.q_learn)

    @property
    def eta(self) -> np.ndarray:
        return average_reward_curve(self).mean

    @property
    def eta_stderr(self) -> np.ndarray:
        return average_reward_curve(self).stderr


class Curve(NamedTuple):
    mean: np.ndarray
    stderr: np.ndarray
    counts: np.ndarray


class LearningTime(NamedTuple):
    mean: float
    stderr: float
    censored: int
    times: np.ndarray


def _chunk(args):
    tables, rewarded, others, lam, m, master_seed, start, stop = args
    plan, succ, q_table = tables
    n_ag = stop - start
    share = np.zeros((n_ag, m))
    reward = np.zeros((n_ag, m), dtype=np.int8)
    n_epochs = np.zeros(n_ag, dtype=np.int64)
    strat, seq, _, q_before, k_used, _ = _kernel_arrays(m)
    n_seq = len(rewarded) + len(others)
    for row, i in enumerate(range(start, stop)):
        u = agent_uniforms(np.random.SeedSequence(master_seed, spawn_key=(i,)), m)
        n, _ = kernel.simulate_agent(np.ones(n_seq), rewarded, others, plan, succ, q_table, lam, u,
                                     strat, seq, reward[row], q_before, k_used, share[row])
        n_epochs[row] = n
    raw = reward.astype(np.float64)  # 0/1, so its sum of squares is its sum
    reward_epochs = [np.flatnonzero(reward[r]).astype(np.int32) for r in range(n_ag)]
    return (share.sum(0), (share * share).sum(0), raw.sum(0), raw.sum(0), n_epochs, reward_epochs)


def run_ensemble(config: AgentConfig, env: DseEnvironment, n_agents: int, master_seed: int = 0,
                 q_learn: float = 0.37, workers: int = 1) -> EnsembleStats:
    if n_agents < 1:
        raise ValueError("n_agents must be >= 1")
    m = config.max_epochs
    tables = round_tables(config, env)
    rewarded = np.flatnonzero(env.reward_table).astype(np.int64)
    others = np.flatnonzero(~env.reward_table).astype(np.int64)
    jobs = [
        (tables, rewarded, others, float(config.lam), m, int(master_seed), s, min(s + CHUNK, n_agents))
        for s in range(0, n_agents, CHUNK)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, jobs))
    else:
        parts = [_chunk(j) for j in jobs]

    eta_sum = np.zeros(m)
    eta_sumsq = np.zeros(m)
    raw_sum = np.zeros(m)
    raw_sumsq = np.zeros(m)
    n_epochs, reward_epochs = [], []
    for s, s2, r, r2, n, rep in parts:
        eta_sum += s
        eta_sumsq += s2
        raw_sum += r
        raw_sumsq += r2
        n_epochs.append(n)
        reward_epochs.extend(rep)
    n_epochs = np.concatenate(n_epochs)
    counts = (n_epochs[:, None] > np.arange(m)[None, :]).sum(0) if m else np.zeros(0, dtype=np.int64)
    return EnsembleStats(config, n_agents, int(master_seed), counts, eta_sum, eta_sumsq, raw_sum,
                         raw_sumsq, n_epochs, reward_epochs, tables[2], q_learn)


def _mean_stderr(total, totalsq, counts):
    n = counts.astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(n > 0, total / n, np.nan)
        var = np.where(n > 1, (totalsq - n * mean * mean) / (n - 1), 0.0)
        stderr = np.where(n > 0, np.sqrt(np.maximum(var, 0.0) / np.maximum(n, 1)), np.nan)
    return mean, stderr


def average_reward_curve(stats: EnsembleStats, distribute: bool = True) -> Curve:
    if distribute:
        mean, err = _mean_stderr(stats.eta_sum, stats.eta_sumsq, stats.counts)
    else:
        mean, err = _mean_stderr(stats.raw_sum, stats.raw_sumsq, stats.counts)
    return Curve(mean, err, stats.counts)


def _first_passage(stats: EnsembleStats, q_learn: float) -> np.ndarray:
    hits = np.flatnonzero(stats.q_table >= q_learn)
    out = np.full(stats.n_agents, -1, dtype=np.int64)
    if hits.size == 0:
        return out
    need = int(hits[0])
    if need == 0:
        out[:] = 0
        return out
    for i, ep in enumerate(stats.reward_epochs):
        if len(ep) >= need:
            out[i] = int(ep[need - 1]) + 1
    return out


def learning_time(stats: EnsembleStats, q_learn: Optional[float] = None) -> LearningTime:
    """Mean epochs until the policy's winning probability first reaches ``q_learn``.

    Agents that never get there within ``max_epochs`` are censored: counted,
    excluded from the mean.
    """
    q_learn = stats.q_learn if q_learn is None else q_learn
    if q_learn > stats.config.switch_q:
        warnings.warn(
            f"q_learn={q_learn} exceeds the switch threshold {stats.config.switch_q:.6f}; "
            "hybrid and classical agents are no longer comparable there",
            LearningTimeWarning,
            stacklevel=2,
        )
    times = _first_passage(stats, q_learn)
    ok = times[times >= 0].astype(np.float64)
    censored = int((times < 0).sum())
    if ok.size == 0:
        return LearningTime(float("nan"), float("nan"), censored, times)
    stderr = float(ok.std(ddof=1) / math.sqrt(ok.size)) if ok.size > 1 else 0.0
    return LearningTime(float(ok.mean()), stderr, censored, times)


# --- analytic predictors --------------------------------------------------------------


@dataclass(frozen=True)
class QSchedule:
    """Winning probabilities ``q_1 .. q_J`` at which successive rewards are sought."""

    q: tuple

    @property
    def J(self) -> int:
        return len(self.q)

    def __iter__(self):
        return iter(self.q)


def q_schedule(n: int, lam: float, q_learn: Optional[float] = None,
               rewards: Optional[int] = None) -> QSchedule:
    """One-winner schedule ``q_j = (1 + lam (j-1)) / (n + lam (j-1))``.

    ``J`` comes from ``q_learn`` unless ``rewards`` fixes it directly.
    """
    if rewards is None:
        if q_learn is None:
            raise ValueError("give q_learn or rewards")
        rewards = rewards_to_reach(n, lam, q_learn)
    return QSchedule(tuple((1 + lam * j) / (n + lam * j) for j in range(rewards)))


def predict_classical_time(schedule) -> float:
    q = list(schedule)
    if any(x <= 0 for x in q):
        raise ValueError("schedule contains a zero winning probability")
    return math.fsum(1.0 / x for x in q)


def predict_quantum_time(schedule, n: int = 1, alpha0: float = 1.0) -> float:
    """Mean epochs for an agent limited to ``n`` Grover iterations per round."""
    q = list(schedule)
    if any(x <= 0 for x in q):
        raise ValueError("schedule contains a zero winning probability")
    if q and (2 * n + 1) * math.asin(math.sqrt(max(q))) > math.pi / 2 + 1e-12:
        warnings.warn(
            f"(2n+1)*xi_J = {(2 * n + 1) * math.asin(math.sqrt(max(q))):.4f} exceeds pi/2 for n={n}; "
            "the late terms lie past the amplification peak",
            LearningTimeWarning,
            stacklevel=2,
        )
    return math.fsum((alpha0 * n + 1) / math.sin((2 * n + 1) * math.asin(math.sqrt(x))) ** 2 for x in q)


class UnboundedPrediction(NamedTuple):
    time: float
    bound: float


def unbounded_quantum_time(schedule, alpha: float = math.pi / 4) -> UnboundedPrediction:
    """Sum of ``alpha / sqrt(q_j)`` and its Cauchy-Schwarz bound ``alpha sqrt(J sum 1/q_j)``."""
    q = list(schedule)
    if any(x <= 0 for x in q):
        raise ValueError("schedule contains a zero winning probability")
    time = math.fsum(alpha / math.sqrt(x) for x in q)
    bound = alpha * math.sqrt(len(q)) * math.sqrt(math.fsum(1.0 / x for x in q))
    if time > bound * (1 + 1e-12):
        raise AssertionError(f"Cauchy-Schwarz violated: {time} > {bound}")
    return UnboundedPrediction(time, bound)


class CoherenceLimits(NamedTuple):
    q_reachable: float  # sin^2(pi / (4n + 2))
    approx_factor: float  # quantum time ~ classical time * approx_factor for n >> 1


def coherence_limits(n: int) -> CoherenceLimits:
    if n < 1:
        raise ValueError("n must be >= 1")
    return CoherenceLimits(math.sin(math.pi / (4 * n + 2)) ** 2, 1.0 / (4 * n))
