"""Batch harness: configs, repeated seeded trials, CSV emission.

Runs each configured arm for a number of repetitions (seed = base seed +
repetition index), records a row per checkpoint, and writes three files:

* ``<out>`` — raw rows, header pinned to
  ``run_id,arm,seed,step,sim_steps,hop_steps,pct_of_optimal,wall_ms,explored_states,propagation_updates``;
* ``<out stem>_summary.csv`` — per arm x checkpoint mean/std aggregates;
* ``<out stem>_meta.json`` — the resolved config echo, including the
  ``hop_impl=reconstructed`` label for the hop trigger/target components.

Config files are flat ``key = value`` lines with dotted section keys
(see ``CONFIG_KEYS``); every key also exists as a CLI flag of the same name.
Rows are emitted in canonical (arm, seed, step) order, so identical configs
produce byte-identical raw CSVs apart from the wall-clock column.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .agents import ARMS, CheckpointRow, TrialResult, make_agent, run_trial
from .envs import CrawlerEnv, CrawlerSpec, GatedChainEnv, GatedChainSpec
from .hopping import HOP_IMPLEMENTATION
from .qtable import QTable

RAW_HEADER = (
    "run_id,arm,seed,step,sim_steps,hop_steps,pct_of_optimal,"
    "wall_ms,explored_states,propagation_updates"
)
SUMMARY_HEADER = (
    "arm,step,pct_mean,pct_std,sim_steps_mean,hop_steps_mean,"
    "wall_ms_mean,explored_states_mean,propagation_updates_mean"
)


class ConfigError(Exception):
    """Invalid experiment configuration; message names the offending key."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int_list(text: str) -> tuple:
    return tuple(int(part) for part in str(text).split(",") if part.strip())


def _parse_str_list(text: str) -> tuple:
    return tuple(part.strip() for part in str(text).split(",") if part.strip())


# key -> (parser, default, help)
CONFIG_KEYS: Dict[str, tuple] = {
    "env": (str, "chain", "environment: chain, crawler, or crawler-full"),
    "env.length": (int, 12, "chain: number of positions"),
    "env.gates": (_parse_int_list, (1, 1, 2, 2, 4, 4, 8, 8, 8, 8, 8), "chain: gate period per advancing position"),
    "env.terminal_reward": (float, 1.0, "chain: reward for finishing the chain"),
    "env.crawler_bins": (int, 5, "crawler: bins per joint for the reduced discretization"),
    "env.eval_horizon": (int, 0, "greedy-evaluation rollout length (0 = environment default)"),
    "arms": (_parse_str_list, ARMS, "comma-separated arm names"),
    "steps": (int, 45000, "training slots per trial"),
    "reps": (int, 10, "repetitions per arm"),
    "seed": (int, 1, "base seed; repetition i uses seed + i"),
    "checkpoint_every": (int, 1000, "checkpoint spacing in slots"),
    "out": (str, "results.csv", "raw CSV output path"),
    "agent.gamma": (float, 0.9, "discount factor"),
    "agent.alpha": (float, 1.0, "learning rate (qlearning arm only)"),
    "agent.epsilon_greedy": (float, 0.1, "exploration rate"),
    "agent.epsilon_propagate": (float, 1e-6, "minimum max-Q change that keeps a wave going"),
    "agent.dedupe_queue": (_parse_bool, True, "skip re-queueing already-pending edges"),
    "hop.prune_threshold": (float, 0.5, "branch-abandon fraction of the global best (0 disables hops)"),
    "hop.target_temperature": (float, 1.0, "softness of hop-target weighting"),
}


@dataclass
class ExperimentConfig:
    values: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        merged = {k: spec[1] for k, spec in CONFIG_KEYS.items()}
        merged.update(self.values)
        self.values = merged
        self.validate()

    def __getitem__(self, key: str):
        return self.values[key]

    def validate(self) -> None:
        for key in self.values:
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
        if self["env"] not in ("chain", "crawler", "crawler-full"):
            raise ConfigError(f"env: expected chain, crawler, or crawler-full, got {self['env']!r}")
        if not self["arms"]:
            raise ConfigError("arms: at least one arm is required")
        for arm in self["arms"]:
            if arm not in ARMS:
                raise ConfigError(f"arms: unknown arm {arm!r}; expected one of {ARMS}")
        if int(self["reps"]) < 1:
            raise ConfigError("reps: must be >= 1")
        if int(self["steps"]) < 1:
            raise ConfigError("steps: must be >= 1")
        if int(self["checkpoint_every"]) < 1:
            raise ConfigError("checkpoint_every: must be >= 1")
        if int(self["checkpoint_every"]) > int(self["steps"]):
            raise ConfigError("checkpoint_every: must not exceed steps")
        if self["env"] == "chain" and len(self["env.gates"]) != int(self["env.length"]) - 1:
            raise ConfigError(
                f"env.gates: need {int(self['env.length']) - 1} entries "
                f"(one per advancing position), got {len(self['env.gates'])}"
            )

    def make_env(self):
        horizon = int(self["env.eval_horizon"]) or None
        if self["env"] == "chain":
            spec = GatedChainSpec(
                length=int(self["env.length"]),
                gates=tuple(self["env.gates"]),
                terminal_reward=float(self["env.terminal_reward"]),
            )
            return GatedChainEnv(spec, eval_horizon=horizon)
        if self["env"] == "crawler":
            return CrawlerEnv(CrawlerSpec.reduced(int(self["env.crawler_bins"])), eval_horizon=horizon or 100)
        return CrawlerEnv(CrawlerSpec(), eval_horizon=horizon or 100)

    def make_agent(self, arm: str, seed: int):
        return make_agent(
            arm,
            gamma=self["agent.gamma"],
            alpha=self["agent.alpha"],
            epsilon_greedy=self["agent.epsilon_greedy"],
            epsilon_propagate=self["agent.epsilon_propagate"],
            dedupe=self["agent.dedupe_queue"],
            prune_threshold=self["hop.prune_threshold"],
            target_temperature=self["hop.target_temperature"],
            max_steps=int(self["steps"]),
            seed=seed,
        )

    def checkpoints(self) -> List[int]:
        every = int(self["checkpoint_every"])
        return list(range(every, int(self["steps"]) + 1, every))


def parse_config_text(text: str) -> Dict[str, object]:
    """Parse the flat ``key = value`` grammar into typed values."""
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        parser = CONFIG_KEYS[key][0]
        try:
            values[key] = parser(value.strip())
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from exc
    return values


def load_config(path: Optional[str] = None, overrides: Optional[Dict[str, object]] = None) -> ExperimentConfig:
    values: Dict[str, object] = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    if overrides:
        for key, value in overrides.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            parser = CONFIG_KEYS[key][0]
            try:
                values[key] = value if not isinstance(value, str) else parser(value)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value for {key}: {exc}") from exc
    return ExperimentConfig(values)


def qvalue_distribution(q: QTable, explored) -> np.ndarray:
    """Per-explored-state maximum values, sorted descending."""
    explored = np.asarray(list(explored), dtype=np.int64)
    if explored.size == 0:
        return np.zeros(0)
    return np.sort(q.values[explored].max(axis=1))[::-1]


def save_qtable(path, q: QTable, explored) -> None:
    np.savez(
        path,
        values=q.values,
        explored=np.asarray(list(explored), dtype=np.int64),
        default=np.float64(q.default),
    )


def load_qtable(path):
    data = np.load(path)
    values = data["values"]
    q = QTable(values.shape[0], values.shape[1], float(data["default"]))
    q.values = values
    return q, data["explored"]


def _format_row(row: CheckpointRow) -> str:
    return (
        f"{row.run_id},{row.arm},{row.seed},{row.step},{row.sim_steps},{row.hop_steps},"
        f"{row.pct_of_optimal!r},{row.wall_ms!r},{row.explored_states},{row.propagation_updates}"
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trials: List[TrialResult]
    raw_path: Path
    summary_path: Path
    meta_path: Path

    def rows(self) -> List[CheckpointRow]:
        return [row for trial in self.trials for row in trial.rows]


def summarize(rows: List[CheckpointRow]) -> List[str]:
    """Mean/std aggregate lines (no header), keyed by arm and checkpoint."""
    groups: Dict[tuple, List[CheckpointRow]] = {}
    for row in rows:
        groups.setdefault((row.arm, row.step), []).append(row)
    lines = []
    for (arm, step) in sorted(groups):
        bucket = groups[(arm, step)]
        pct = np.array([r.pct_of_optimal for r in bucket])
        line = (
            f"{arm},{step},{float(pct.mean())!r},{float(pct.std())!r},"
            f"{float(np.mean([r.sim_steps for r in bucket]))!r},"
            f"{float(np.mean([r.hop_steps for r in bucket]))!r},"
            f"{float(np.mean([r.wall_ms for r in bucket]))!r},"
            f"{float(np.mean([r.explored_states for r in bucket]))!r},"
            f"{float(np.mean([r.propagation_updates for r in bucket]))!r}"
        )
        lines.append(line)
    return lines


def run_experiment(
    cfg: ExperimentConfig,
    save_qtables: Optional[str] = None,
    qdist_out: Optional[str] = None,
) -> ExperimentResult:
    """Run all arm x repetition trials and write the raw/summary/meta files."""
    env = cfg.make_env()
    checkpoints = cfg.checkpoints()
    base_seed = int(cfg["seed"])
    reps = int(cfg["reps"])

    trials: List[TrialResult] = []
    for arm in sorted(cfg["arms"]):
        for rep in range(reps):
            seed = base_seed + rep
            agent = cfg.make_agent(arm, seed)
            trials.append(run_trial(agent, env, checkpoints))

    trials.sort(key=lambda t: (t.arm, t.seed))
    raw_path = Path(cfg["out"])
    if raw_path.parent and not raw_path.parent.exists():
        raise OSError(f"output directory does not exist: {raw_path.parent}")
    summary_path = raw_path.with_name(raw_path.stem + "_summary.csv")
    meta_path = raw_path.with_name(raw_path.stem + "_meta.json")

    with open(raw_path, "w") as fh:
        fh.write(RAW_HEADER + "\n")
        for trial in trials:
            for row in sorted(trial.rows, key=lambda r: r.step):
                fh.write(_format_row(row) + "\n")

    rows = [row for trial in trials for row in trial.rows]
    with open(summary_path, "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for line in summarize(rows):
            fh.write(line + "\n")

    meta = {key: _jsonable(cfg[key]) for key in sorted(cfg.values)}
    meta["hop_impl"] = HOP_IMPLEMENTATION
    meta["optimal_performance"] = env.optimal_performance(float(cfg["agent.gamma"]))
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if save_qtables is not None:
        out_dir = Path(save_qtables)
        out_dir.mkdir(parents=True, exist_ok=True)
        for trial in trials:
            save_qtable(out_dir / f"{trial.arm}-s{trial.seed}.npz", trial.q_table, trial.explored_states)

    if qdist_out is not None:
        with open(qdist_out, "w") as fh:
            fh.write("arm,seed,rank,max_q\n")
            for trial in trials:
                for rank, value in enumerate(qvalue_distribution(trial.q_table, trial.explored_states)):
                    fh.write(f"{trial.arm},{trial.seed},{rank},{float(value)!r}\n")

    return ExperimentResult(cfg, trials, raw_path, summary_path, meta_path)


def _jsonable(value):
    if isinstance(value, tuple):
        return list(value)
    return value
