"""Time the compiled and interpreted epoch loops on identical inputs.

Only the kernel call is timed; tables and uniforms are prepared up front.

    python benchmarks/bench_kernel.py --agents 2000 --epochs 1000
"""
import argparse
import time

import numpy as np

from qrlsim import kernel
from qrlsim.agent import AgentConfig, _kernel_arrays, agent_uniforms, round_tables
from qrlsim.environment import OneWinnerEnvironment


def bench(fn, cfg, env, n_agents, seed=0):
    tables = round_tables(cfg, env)
    rewarded = np.flatnonzero(env.reward_table).astype(np.int64)
    others = np.flatnonzero(~env.reward_table).astype(np.int64)
    m = cfg.max_epochs
    uniforms = [agent_uniforms(np.random.SeedSequence(seed, spawn_key=(i,)), m) for i in range(n_agents)]
    out = _kernel_arrays(m)
    elapsed = 0.0
    checksum = 0.0
    for u in uniforms:
        w = np.ones(env.sequence_count)
        t0 = time.perf_counter()
        fn(w, rewarded, others, *tables, float(cfg.lam), u, *out)
        elapsed += time.perf_counter() - t0
        checksum += out[5].sum()
    return elapsed, checksum


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--agents", type=int, default=2000)
    ap.add_argument("--epochs", type=int, default=1000)
    ap.add_argument("--n", type=int, default=100, help="number of action sequences")
    args = ap.parse_args()

    env = OneWinnerEnvironment(args.n, 0)
    print(f"{'strategy':<14}{'backend':<9}{'total s':>10}{'us/agent':>11}{'speed-up':>10}")
    for strategy in ("classical", "hybrid", "quantum_only"):
        cfg = AgentConfig(strategy, max_epochs=args.epochs)
        res = {name: bench(fn, cfg, env, args.agents) for name, fn in kernel.BACKENDS.items()}
        sums = {round(c, 6) for _, c in res.values()}
        assert len(sums) == 1, "backends disagree"
        base = res["python"][0]
        for name, (t, _) in res.items():
            print(f"{strategy:<14}{name:<9}{t:>10.3f}{1e6 * t / args.agents:>11.1f}{base / t:>10.1f}")
    if "cython" not in kernel.BACKENDS:
        print("compiled kernel not built; only the interpreted loop was timed")


if __name__ == "__main__":
    main()
