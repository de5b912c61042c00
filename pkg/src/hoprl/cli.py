"""Command-line entry points.

Subcommands:

* ``run``          — run a configured experiment, write raw/summary/meta files
* ``oracle``       — print an environment's optimal steady performance
* ``distribution`` — sorted max-Q-per-explored-state CSV from a saved table
* ``dump-graph``   — record a random walk and dump the transition graph CSV

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    CONFIG_KEYS,
    ConfigError,
    load_config,
    load_qtable,
    qvalue_distribution,
    run_experiment,
)
from .graph import Transition, TransitionGraph


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="experiment config file")
    parser.add_argument(
        "--arm",
        action="append",
        metavar="NAME",
        help="arm to run (repeatable; overrides the config's arm list)",
    )
    for key, (_, default, help_text) in CONFIG_KEYS.items():
        parser.add_argument(f"--{key}", dest=key, metavar="V", help=f"{help_text} (default {default})")


def _collect_overrides(args: argparse.Namespace) -> dict:
    overrides = {}
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "arm", None):
        overrides["arms"] = ",".join(args.arm)
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoprl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and emit CSVs")
    _add_config_flags(p_run)
    p_run.add_argument("--save-qtables", metavar="DIR", help="save one .npz value table per trial")
    p_run.add_argument("--qdist-out", metavar="PATH", help="write a final-checkpoint max-Q distribution CSV")

    p_oracle = sub.add_parser("oracle", help="print the optimal steady per-step reward")
    _add_config_flags(p_oracle)

    p_dist = sub.add_parser("distribution", help="sorted max-Q distribution from a saved table")
    p_dist.add_argument("--qtable", required=True, metavar="PATH", help=".npz file written by run --save-qtables")
    p_dist.add_argument("--out", required=True, metavar="PATH", help="output CSV (rank,max_q)")

    p_dump = sub.add_parser("dump-graph", help="random-walk an environment and dump its transition graph")
    _add_config_flags(p_dump)
    p_dump.add_argument("--walk-steps", type=int, default=1000, metavar="N", help="random-walk length")
    p_dump.add_argument("--graph-out", required=True, metavar="PATH", help="output CSV (from,action,reward,to)")

    return parser


def cmd_run(args) -> int:
    cfg = load_config(args.config, _collect_overrides(args))
    result = run_experiment(cfg, save_qtables=args.save_qtables, qdist_out=args.qdist_out)
    print(f"wrote {result.raw_path}, {result.summary_path}, {result.meta_path}")
    return 0


def cmd_oracle(args) -> int:
    cfg = load_config(args.config, _collect_overrides(args))
    env = cfg.make_env()
    gamma = float(cfg["agent.gamma"])
    print(f"env={env.name}")
    print(f"states={env.state_count}")
    print(f"actions={env.action_count}")
    print(f"gamma={gamma}")
    print(f"optimal_avg_reward_per_step={env.optimal_performance(gamma)!r}")
    return 0


def cmd_distribution(args) -> int:
    q, explored = load_qtable(args.qtable)
    with open(args.out, "w") as fh:
        fh.write("rank,max_q\n")
        for rank, value in enumerate(qvalue_distribution(q, explored)):
            fh.write(f"{rank},{float(value)!r}\n")
    print(f"wrote {args.out}")
    return 0


def cmd_dump_graph(args) -> int:
    cfg = load_config(args.config, _collect_overrides(args))
    env = cfg.make_env()
    rng = np.random.default_rng(int(cfg["seed"]))
    graph = TransitionGraph()
    state = env.state
    for _ in range(args.walk_steps):
        action = int(rng.integers(env.action_count))
        nxt, reward = env.step(action)
        graph.record(Transition(state, action, reward, nxt))
        state = nxt
    with open(args.graph_out, "w") as fh:
        graph.dump_csv(fh)
    print(f"wrote {args.graph_out} ({len(graph)} transitions)")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": cmd_run,
        "oracle": cmd_oracle,
        "distribution": cmd_distribution,
        "dump-graph": cmd_dump_graph,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
