"""Run configuration: INI sections with typed keys, defaults mirroring the experiment.

Grammar (``configparser`` INI, ``;`` or ``#`` comments, every key optional)::

    [environment]
    kind = one_winner          ; or grid_world
    n = 100                    ; one_winner
    winner = 0                 ; one_winner
    width = 2                  ; grid_world
    height = 2
    start = 0, 0
    goal = 1, 1
    steps = 2

    [agent]
    strategy = hybrid          ; classical | quantum_only | hybrid
    lambda = 2
    n_cap = 1
    switch_q = 0.3964466094067262
    max_epochs = 1000

    [run]
    n_agents = 10000
    seed = 0
    q_learn = 0.37
    distribute_reward = true
    workers = 1

    [backend]
    kind = abstract            ; or photonic
    visibility = 1.0

    [output]
    dir = out
    dump_agents = 0            ; ledgers + final policies of the first N agents
"""
from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace

from .agent import BACKENDS, STRATEGIES, SWITCH_Q, AgentConfig
from .environment import GridWorldEnvironment, OneWinnerEnvironment


# do not change any output byte, so they stay out of the echo and the hash
EXECUTION_ONLY = ("workers", "out_dir")


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    env_kind: str = "one_winner"
    n: int = 100
    winner: int = 0
    width: int = 2
    height: int = 2
    start: tuple = (0, 0)
    goal: tuple = (1, 1)
    steps: int = 2
    strategy: str = "hybrid"
    lam: float = 2.0
    n_cap: int = 1
    switch_q: float = SWITCH_Q
    max_epochs: int = 1000
    n_agents: int = 10000
    seed: int = 0
    q_learn: float = 0.37
    distribute_reward: bool = True
    workers: int = 1
    backend: str = "abstract"
    visibility: float = 1.0
    out_dir: str = "out"
    dump_agents: int = 0

    def agent_config(self, strategy=None) -> AgentConfig:
        return AgentConfig(
            strategy=strategy or self.strategy,
            n_cap=self.n_cap,
            switch_q=self.switch_q,
            lam=self.lam,
            max_epochs=self.max_epochs,
            backend=self.backend,
            visibility=self.visibility,
        )

    def environment(self):
        if self.env_kind == "one_winner":
            return OneWinnerEnvironment(self.n, self.winner)
        return GridWorldEnvironment(self.width, self.height, self.start, self.goal, self.steps)

    def to_dict(self) -> dict:
        """Settings that determine results; ``workers`` and ``out_dir`` are left out."""
        d = asdict(self)
        for name in EXECUTION_ONLY:
            del d[name]
        d["start"], d["goal"] = list(self.start), list(self.goal)
        return d

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()

    def override(self, **changes) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        cfg = replace(self, **changes)
        errors = validate(cfg)
        if errors:
            raise ConfigError(errors)
        return cfg


def _int(v):
    return int(v.strip())


def _float(v):
    return float(v.strip())


def _str(v):
    return v.strip()


def _bool(v):
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _cell(v):
    parts = [p.strip() for p in v.strip().strip("()[]").split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected 'x, y', got {v!r}")
    return (int(parts[0]), int(parts[1]))


# section -> key -> (field, parser)
SCHEMA = {
    "environment": {
        "kind": ("env_kind", _str),
        "n": ("n", _int),
        "winner": ("winner", _int),
        "width": ("width", _int),
        "height": ("height", _int),
        "start": ("start", _cell),
        "goal": ("goal", _cell),
        "steps": ("steps", _int),
    },
    "agent": {
        "strategy": ("strategy", _str),
        "lambda": ("lam", _float),
        "n_cap": ("n_cap", _int),
        "switch_q": ("switch_q", _float),
        "max_epochs": ("max_epochs", _int),
    },
    "run": {
        "n_agents": ("n_agents", _int),
        "seed": ("seed", _int),
        "q_learn": ("q_learn", _float),
        "distribute_reward": ("distribute_reward", _bool),
        "workers": ("workers", _int),
    },
    "backend": {
        "kind": ("backend", _str),
        "visibility": ("visibility", _float),
    },
    "output": {
        "dir": ("out_dir", _str),
        "dump_agents": ("dump_agents", _int),
    },
}


def validate(cfg: RunConfig) -> list[str]:
    errors = []

    def check(cond, msg):
        if not cond:
            errors.append(msg)

    check(cfg.env_kind in ("one_winner", "grid_world"), f"environment.kind: unknown kind {cfg.env_kind!r}")
    if cfg.env_kind == "one_winner":
        check(cfg.n >= 1, "environment.n: must be >= 1")
        check(0 <= cfg.winner < max(cfg.n, 1), "environment.winner: must lie in [0, n)")
    elif cfg.env_kind == "grid_world":
        check(cfg.width >= 1 and cfg.height >= 1, "environment.width/height: must be >= 1")
        check(cfg.steps >= 1, "environment.steps: must be >= 1")
        for name, cell in (("start", cfg.start), ("goal", cfg.goal)):
            check(0 <= cell[0] < cfg.width and 0 <= cell[1] < cfg.height,
                  f"environment.{name}: {cell} outside the grid")
    check(cfg.strategy in STRATEGIES, f"agent.strategy: unknown strategy {cfg.strategy!r}")
    check(cfg.lam >= 0, "agent.lambda: must be >= 0")
    check(cfg.n_cap >= 1, "agent.n_cap: must be >= 1")
    check(0 < cfg.switch_q < 1, "agent.switch_q: must lie in (0, 1)")
    check(cfg.max_epochs >= 1, "agent.max_epochs: must be >= 1")
    check(cfg.n_agents >= 1, "run.n_agents: must be >= 1")
    check(cfg.seed >= 0, "run.seed: must be >= 0")
    check(0 < cfg.q_learn < 1, "run.q_learn: must lie in (0, 1)")
    check(cfg.workers >= 1, "run.workers: must be >= 1")
    check(cfg.backend in BACKENDS, f"backend.kind: unknown backend {cfg.backend!r}")
    check(0 <= cfg.visibility <= 1, "backend.visibility: must lie in [0, 1]")
    if cfg.backend == "photonic":
        check(cfg.n_cap == 1, "backend.kind: photonic requires agent.n_cap = 1")
    check(cfg.dump_agents >= 0, "output.dump_agents: must be >= 0")
    return errors


def parse_config(text: str) -> RunConfig:
    """Parse INI text into a validated :class:`RunConfig`; reports every problem at once."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from None
    values, errors = {}, []
    for section in parser.sections():
        if section not in SCHEMA:
            errors.append(f"unknown section [{section}]")
            continue
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                errors.append(f"{section}.{key}: unknown key")
                continue
            name, conv = SCHEMA[section][key]
            try:
                values[name] = conv(raw)
            except ValueError:
                errors.append(f"{section}.{key}: cannot parse {raw!r} as {conv.__name__.strip('_')}")
    cfg = RunConfig(**values)
    errors += validate(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path) -> RunConfig:
    if path is None:
        return parse_config("")
    with open(path) as fh:
        return parse_config(fh.read())


FIELD_NAMES = [f.name for f in fields(RunConfig)]
