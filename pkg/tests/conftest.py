import numpy as np
import pytest

from qrlsim.agent import AgentConfig
from qrlsim.environment import OneWinnerEnvironment
from qrlsim.ensemble import run_ensemble

ENSEMBLE_AGENTS = 10_000
ENSEMBLE_SEED = 20240611


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def env100():
    return OneWinnerEnvironment(100, winner=0)


@pytest.fixture(scope="session")
def ensembles(env100):
    """10,000-agent ensembles for each strategy with the default settings."""
    return {
        s: run_ensemble(AgentConfig(strategy=s), env100, ENSEMBLE_AGENTS, ENSEMBLE_SEED)
        for s in ("classical", "hybrid", "quantum_only")
    }


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
