"""Simulation of projective-simulation agents sped up by Grover amplitude amplification.

The epoch loop runs in a compiled extension when it is available and in a
pure-Python twin otherwise; ``qrlsim.kernel.BACKEND`` tells which one is live.
"""
from .agent import SWITCH_Q, AgentConfig, EpochLedger, run_agent
from .config import ConfigError, RunConfig, parse_config
from .ensemble import (
    learning_time,
    predict_classical_time,
    predict_quantum_time,
    q_schedule,
    run_ensemble,
)
from .environment import GridWorldEnvironment, OneWinnerEnvironment
from .policy import Policy

__version__ = "0.1.0"
