"""Dense statevector amplitude amplification over the action basis."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .environment import MAX_ENUMERABLE, oracle_phase


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    basis: str = "action"

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty vector")
        if amps.size > 2 * MAX_ENUMERABLE:
            raise ValueError("state exceeds the dense-simulation guard")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state not normalized (norm^2 = {norm})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self):
        return self.dimension


@dataclass(frozen=True)
class IterationPlan:
    k: int
    capped_by: Optional[str] = None


def prepare_initial(p) -> StateVector:
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0):
        raise ValueError("negative probabilities")
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total}, not 1")
    amps = np.sqrt(p)
    return StateVector(amps / np.linalg.norm(amps))


def reflect_about(reference: StateVector, state: StateVector) -> StateVector:
    """``2|ref><ref|state> - |state>`` without forming the matrix."""
    if reference.dimension != state.dimension:
        raise ValueError("dimension mismatch")
    psi, phi = reference.amplitudes, state.amplitudes
    return StateVector(2 * np.vdot(psi, phi) * psi - phi, state.basis)


def grover_iterate(env, reference: StateVector, state: StateVector) -> StateVector:
    return reflect_about(reference, oracle_phase(env, state))


def success_probability(q: float, k: int) -> float:
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    if k < 0:
        raise ValueError("k must be non-negative")
    xi = math.asin(math.sqrt(q))
    return min(1.0, max(0.0, math.sin((2 * k + 1) * xi) ** 2))


def optimal_iterations(q: float, n_max: Optional[int] = None) -> IterationPlan:
    """Grover iterations maximizing the success probability, optionally capped.

    Returns ``k = 0`` when amplification would not beat sampling ``q`` directly.
    """
    if q <= 0:
        raise ValueError("no rewarded sequence reachable")
    if q >= 1:
        return IterationPlan(0)
    xi = math.asin(math.sqrt(q))
    # round(pi/(4 xi) - 1/2), ties upward
    k = max(0, math.floor(math.pi / (4 * xi)))
    capped = None
    if n_max is not None and k > n_max:
        k, capped = int(n_max), "coherence_cap"
    # ties (e.g. q = 1/2, k = 1) count as no gain
    if k > 0 and success_probability(q, k) <= q + 1e-12:
        return IterationPlan(0, capped)
    return IterationPlan(int(k), capped)


def amplify(env, reference: StateVector, k: int) -> StateVector:
    state = reference
    for _ in range(k):
        state = grover_iterate(env, reference, state)
    return state


def measure(state: StateVector, rng: np.random.Generator) -> int:
    """Computational-basis outcome; consumes one uniform from ``rng``."""
    cum = np.cumsum(state.probabilities())
    x = rng.random() * cum[-1]
    return min(int(np.searchsorted(cum, x, side="right")), state.dimension - 1)
