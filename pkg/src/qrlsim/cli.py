"""Command-line entry point: ``qrlsim {run,predict,compare,compile}``.

Exit codes: 0 ok, 2 configuration error, 3 runtime error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

import numpy as np

from . import kernel
from .agent import STRATEGIES, run_agent
from .config import ConfigError, RunConfig, load_config
from .ensemble import (
    average_reward_curve,
    coherence_limits,
    learning_time,
    predict_classical_time,
    predict_quantum_time,
    q_schedule,
    run_ensemble,
    unbounded_quantum_time,
)
from .photonic import (
    DEFAULT_ENCODING,
    compile_epoch_circuit,
    detector_probabilities,
    simulate_with_visibility,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


class Unsupported(RuntimeError):
    pass


def _num(x):
    x = float(x)
    return None if math.isnan(x) else x


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.10f}"


def curve_csv(curve) -> str:
    lines = ["epoch,eta_mean,eta_stderr,n_agents"]
    for e, (m, s, n) in enumerate(zip(curve.mean, curve.stderr, curve.counts)):
        lines.append(f"{e},{_fmt(m)},{_fmt(s)},{int(n)}")
    return "\n".join(lines) + "\n"


def predictors(cfg: RunConfig):
    """Analytic learning times for a one-winner configuration, else ``None``."""
    if cfg.env_kind != "one_winner":
        return None
    sched = q_schedule(cfg.n, cfg.lam, cfg.q_learn)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        quantum = predict_quantum_time(sched, n=cfg.n_cap)
    return {
        "J": sched.J,
        "classical": predict_classical_time(sched),
        "quantum": quantum,
        "bound": unbounded_quantum_time(sched).bound,
        "Q_n": coherence_limits(cfg.n_cap).q_reachable,
    }


def simulate(cfg: RunConfig, strategy: str):
    env = cfg.environment()
    stats = run_ensemble(cfg.agent_config(strategy), env, cfg.n_agents, cfg.seed, cfg.q_learn, cfg.workers)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lt = learning_time(stats)
    curve = average_reward_curve(stats, cfg.distribute_reward)
    resolved = cfg.override(strategy=strategy)
    summary = {
        "strategy": strategy,
        "Q_L": cfg.q_learn,
        "mean_T": _num(lt.mean),
        "stderr_T": _num(lt.stderr),
        "censored": lt.censored,
        "n_agents": cfg.n_agents,
        "seed": cfg.seed,
        "predictors": predictors(cfg),
        "config_hash": resolved.digest(),
        "config": resolved.to_dict(),
    }
    return stats, curve, summary


def _write(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)


def dump_agents(cfg: RunConfig, strategy: str, out_dir: str):
    if cfg.dump_agents == 0:
        return
    env = cfg.environment()
    agent_cfg = cfg.agent_config(strategy)
    target = os.path.join(out_dir, "agents")
    os.makedirs(target, exist_ok=True)
    for i in range(min(cfg.dump_agents, cfg.n_agents)):
        ledger = run_agent(agent_cfg, env, np.random.SeedSequence(cfg.seed, spawn_key=(i,)))
        _write(os.path.join(target, f"{strategy}_{i:05d}_ledger.csv"), ledger.to_csv())
        rows = ["sequence,weight"] + [f"{s},{w!r}" for s, w in enumerate(ledger.policy.weights.tolist())]
        _write(os.path.join(target, f"{strategy}_{i:05d}_policy.csv"), "\n".join(rows) + "\n")


def _summary_text(summary) -> str:
    return json.dumps(summary, indent=2) + "\n"


def _say(args, msg):
    if not args.quiet:
        print(msg)


def cmd_run(cfg: RunConfig, args) -> int:
    os.makedirs(cfg.out_dir, exist_ok=True)
    _say(args, f"running {cfg.n_agents} {cfg.strategy} agents (kernel: {kernel.BACKEND})")
    _, curve, summary = simulate(cfg, cfg.strategy)
    _write(os.path.join(cfg.out_dir, "curve.csv"), curve_csv(curve))
    _write(os.path.join(cfg.out_dir, "summary.json"), _summary_text(summary))
    dump_agents(cfg, cfg.strategy, cfg.out_dir)
    _say(args, f"mean_T = {summary['mean_T']} +/- {summary['stderr_T']} (censored {summary['censored']})")
    _say(args, f"wrote {cfg.out_dir}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    os.makedirs(cfg.out_dir, exist_ok=True)
    curves, summaries = {}, {}
    for strategy in ("classical", "hybrid"):
        _say(args, f"running {cfg.n_agents} {strategy} agents (kernel: {kernel.BACKEND})")
        _, curves[strategy], summaries[strategy] = simulate(cfg, strategy)
        _write(os.path.join(cfg.out_dir, f"curve_{strategy}.csv"), curve_csv(curves[strategy]))
        dump_agents(cfg, strategy, cfg.out_dir)
    c, h = curves["classical"], curves["hybrid"]
    lines = ["epoch,classical_eta_mean,classical_eta_stderr,hybrid_eta_mean,hybrid_eta_stderr,n_agents"]
    for e in range(len(c.mean)):
        n = min(int(c.counts[e]), int(h.counts[e]))
        lines.append(f"{e},{_fmt(c.mean[e])},{_fmt(c.stderr[e])},{_fmt(h.mean[e])},{_fmt(h.stderr[e])},{n}")
    _write(os.path.join(cfg.out_dir, "compare.csv"), "\n".join(lines) + "\n")
    tc, tq = summaries["classical"]["mean_T"], summaries["hybrid"]["mean_T"]
    ratio = tc / tq if tc and tq else None
    doc = {"speedup": ratio, "runs": summaries}
    _write(os.path.join(cfg.out_dir, "summary.json"), _summary_text(doc))
    _say(args, f"classical T = {tc}, hybrid T = {tq}, ratio = {ratio}")
    _say(args, f"wrote {cfg.out_dir}")
    return EXIT_OK


def cmd_predict(cfg: RunConfig, args) -> int:
    if cfg.env_kind != "one_winner":
        raise Unsupported(f"predict supports the one_winner environment only, not {cfg.env_kind!r}")
    n = cfg.n_cap
    sched = q_schedule(cfg.n, cfg.lam, cfg.q_learn)
    tc = predict_classical_time(sched)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        tq = predict_quantum_time(sched, n=n)
    ub = unbounded_quantum_time(sched)
    lim = coherence_limits(n)
    print(f"q-schedule ({cfg.n} sequences, lambda={cfg.lam:g}, Q_L={cfg.q_learn:g}):")
    print("  " + " ".join(f"{q:.6f}" for q in sched))
    print(f"J = {sched.J}")
    print(f"classical learning time       = {tc:.6f}")
    print(f"quantum learning time (n={n})  = {tq:.6f}")
    print(f"speed-up                      = {tc / tq:.6f}" if tq else "speed-up                      = n/a")
    print(f"unbounded quantum time        = {ub.time:.6f}  (alpha = pi/4)")
    print(f"Cauchy-Schwarz bound          = {ub.bound:.6f}")
    print(f"Q_{n}                           = {lim.q_reachable:.6f}")
    print(f"T_C/(4n) approximation        = {tc * lim.approx_factor:.6f}"
          "  (valid only for n >> 1 with every q_j far below Q_n)")
    for w in caught:
        print(f"note: {w.message}")
    return EXIT_OK


def cmd_compile(args) -> int:
    if args.xi is not None and args.q is not None:
        raise ConfigError(["give --xi or --q, not both"])
    if args.q is not None:
        if not 0 < args.q < 1:
            raise ConfigError(["--q must lie in (0, 1)"])
        xi = math.asin(math.sqrt(args.q))
    else:
        xi = args.xi if args.xi is not None else math.asin(0.1)
    if not 0 < xi < math.pi / 2:
        raise ConfigError(["xi must lie in (0, pi/2)"])
    if not 0 <= args.visibility <= 1:
        raise ConfigError(["--visibility must lie in [0, 1]"])
    mesh = compile_epoch_circuit(args.kind, xi)
    print(f"# {args.kind} epoch, xi = {xi:.9f}, {len(mesh)} MZIs")
    print(mesh.table())
    for label, v in (("ideal", 1.0), (f"V={args.visibility:g}", args.visibility)):
        probs = simulate_with_visibility(mesh, DEFAULT_ENCODING.input_mode, v)
        det = detector_probabilities(args.kind, probs)
        print(f"{label}: " + " ".join(f"{k}={p:.6f}" for k, p in det.items()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="INI configuration file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    common.add_argument("--strategy", choices=STRATEGIES, help="agent strategy (overrides the config)")
    common.add_argument("--agents", type=int, metavar="N", help="ensemble size (overrides the config)")
    common.add_argument("--workers", type=int, help="worker processes (overrides the config)")
    common.add_argument("--quiet", action="store_true", help="suppress progress messages")

    ap = argparse.ArgumentParser(prog="qrlsim", description="Hybrid quantum-classical reinforcement learning simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="simulate an ensemble, write curve.csv and summary.json")
    sub.add_parser("predict", parents=[common], help="print analytic learning-time predictions")
    sub.add_parser("compare", parents=[common], help="classical and hybrid ensembles with a shared seed")
    comp = sub.add_parser("compile", help="compile one epoch circuit to an MZI mesh")
    comp.add_argument("--kind", choices=("classical", "quantum"), default="quantum")
    comp.add_argument("--xi", type=float, help="policy angle, q = sin^2(xi)")
    comp.add_argument("--q", type=float, help="winning probability (alternative to --xi)")
    comp.add_argument("--visibility", type=float, default=1.0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compile":
            return cmd_compile(args)
        cfg = load_config(args.config).override(
            seed=args.seed, out_dir=args.out, strategy=args.strategy,
            n_agents=args.agents, workers=args.workers,
        )
        return {"run": cmd_run, "predict": cmd_predict, "compare": cmd_compare}[args.command](cfg, args)
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        if args.command != "compile" and args.config and exc.filename == args.config:
            print(f"config error: cannot read {args.config}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (OSError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
