"""Training loops for the three benchmark arms, shaped as sklearn estimators.

Each agent is a ``BaseEstimator``: constructor arguments are plain
hyperparameters (``get_params``/``set_params``/``clone`` work as usual),
``fit(env)`` runs the training loop, and ``predict(states)`` returns greedy
actions. Learned state lives in trailing-underscore attributes.

A fitted trial is a sequence of decision slots. A slot is either one
simulated transition (choose an action epsilon-greedily, step, learn) or one
hop (teleport to a previously visited state). The hop trigger is evaluated
right after each simulated transition, and a firing trigger claims the next
slot, so simulation and hop counters always add up to the slot count.
"""
from __future__ import annotations

import time
from collections import namedtuple
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from sklearn.base import BaseEstimator

from .graph import TransitionGraph
from .hopping import ExplorationStats, HopConfig, hop, select_target, should_hop
from .propagation import (
    PropagationParams,
    PropagationStats,
    default_max_updates,
    seed_and_propagate,
)
from .qtable import QTable
from .validation import check_positive_int, check_range

ARMS = ("qlearning", "time_hopping", "time_hopping_ep")

StepOutcome = namedtuple("StepOutcome", ["kind", "reward"])


@dataclass
class CheckpointRow:
    """One measurement row of the benchmark CSV."""

    run_id: str
    arm: str
    seed: int
    step: int
    sim_steps: int
    hop_steps: int
    pct_of_optimal: float
    wall_ms: float
    explored_states: int
    propagation_updates: int


@dataclass
class TrialResult:
    arm: str
    seed: int
    rows: List[CheckpointRow]
    q_table: QTable
    explored_states: np.ndarray
    sim_steps: int
    hop_steps: int
    propagation_updates: int


def q_update(q: QTable, s: int, a: int, r: float, s2: int, alpha: float, gamma: float) -> None:
    """One-step value update toward ``r + gamma * max_q(s2)``.

    ``alpha == 1`` is applied as a plain assignment so it is the exact full
    backup, bit for bit, rather than a blend that merely equals it
    algebraically.
    """
    target = r + gamma * q.values[s2].max()
    if alpha == 1.0:
        q.values[s, a] = target
    else:
        q.values[s, a] = (1.0 - alpha) * q.values[s, a] + alpha * target


def evaluate_greedy(env, q: QTable, horizon: Optional[int] = None) -> float:
    """Average per-step reward of the greedy policy on a fresh environment.

    Exploration is frozen and nothing is written: the rollout reads the value
    table only, so evaluation never perturbs a running trial.
    """
    sim = env.fresh()
    steps = horizon if horizon is not None else env.eval_horizon
    values = q.values
    total = 0.0
    for _ in range(steps):
        a = int(np.argmax(values[sim.state]))
        _, r = sim.step(a)
        total += r
    return total / steps


class BaseQAgent(BaseEstimator):
    """Shared slot loop; subclasses wire in their learning rule and hopping."""

    arm = ""
    _uses_hops = False
    _uses_graph = False

    def __init__(self, gamma=0.9, epsilon_greedy=0.1, max_steps=45000, seed=0):
        self.gamma = gamma
        self.epsilon_greedy = epsilon_greedy
        self.max_steps = max_steps
        self.seed = seed

    def _validate_params(self):
        check_range(self.gamma, "gamma", 0.0, 1.0, high_inclusive=False)
        check_range(self.epsilon_greedy, "epsilon_greedy", 0.0, 1.0)
        check_positive_int(self.max_steps, "max_steps")

    def _hop_config(self) -> Optional[HopConfig]:
        return None

    def _learn(self, s, a, r, s2):
        raise NotImplementedError

    def setup(self, env) -> "BaseQAgent":
        """Initialize learner state against ``env`` without training yet."""
        self._validate_params()
        self.env_ = env.fresh()
        self.q_table_ = QTable(env.state_count, env.action_count)
        self.stats_ = ExplorationStats(env.state_count, env.action_count)
        self.graph_ = TransitionGraph() if self._uses_graph else None
        self.rng_ = np.random.default_rng(self.seed)
        self.sim_steps_ = 0
        self.hop_steps_ = 0
        self.q_writes_ = 0
        self.propagation_stats_ = PropagationStats()
        self._pending_target: Optional[int] = None
        self._hop_cfg = self._hop_config()
        self.stats_.observe_visit(self.env_.state)
        return self

    def train_step(self) -> StepOutcome:
        """Execute one decision slot: a simulated transition or a hop."""
        if self._pending_target is not None:
            target, self._pending_target = self._pending_target, None
            hop(self.env_, target, self.stats_)
            self.hop_steps_ += 1
            return StepOutcome("hop", 0.0)

        s = self.env_.state
        if self.rng_.random() < self.epsilon_greedy:
            a = int(self.rng_.integers(self.env_.action_count))
        else:
            a = int(np.argmax(self.q_table_.values[s]))
        self.stats_.observe_action(s, a)
        s2, r = self.env_.step(a)
        self._learn(s, a, r, s2)
        self.stats_.observe_visit(s2)
        self.sim_steps_ += 1

        if self._hop_cfg is not None and should_hop(
            self.q_table_, s2, self.gamma, self.stats_, self._hop_cfg
        ):
            self._pending_target = select_target(self.stats_, self._hop_cfg, self.rng_)
        return StepOutcome("sim", r)

    def fit(self, env, checkpoints=None):
        """Train for ``max_steps`` slots on a fresh copy of ``env``.

        ``checkpoints`` is an ascending list of slot counts; at each one the
        greedy policy is evaluated on a fresh environment and a
        :class:`CheckpointRow` is appended to ``checkpoints_``. Evaluation
        time is excluded from the reported wall clock.
        """
        checkpoint_set = _validated_checkpoints(checkpoints, self.max_steps)
        self.setup(env)
        self.checkpoints_ = []
        optimum = env.optimal_performance(self.gamma) if checkpoint_set else None
        if optimum is not None and optimum <= 0:
            raise ValueError(f"environment optimum must be positive, got {optimum}")
        wall = 0.0
        for step in range(self.max_steps + 1):
            if step > 0:
                t0 = time.perf_counter()
                self.train_step()
                wall += time.perf_counter() - t0
            if step in checkpoint_set:
                avg = evaluate_greedy(env, self.q_table_)
                self.checkpoints_.append(
                    CheckpointRow(
                        run_id=f"{self.arm}-s{self.seed}",
                        arm=self.arm,
                        seed=int(self.seed),
                        step=step,
                        sim_steps=self.sim_steps_,
                        hop_steps=self.hop_steps_,
                        pct_of_optimal=100.0 * max(avg, 0.0) / optimum,
                        wall_ms=wall * 1000.0,
                        explored_states=self.stats_.explored_count,
                        propagation_updates=self.q_writes_,
                    )
                )
        return self

    def predict(self, X):
        """Greedy action for each state id in ``X``."""
        if not hasattr(self, "q_table_"):
            raise RuntimeError("agent is not fitted; call fit first")
        states = np.asarray(X, dtype=np.int64)
        if states.ndim != 1:
            raise ValueError("expected a 1-D array of state ids")
        if states.size and (states.min() < 0 or states.max() >= self.q_table_.state_count):
            raise ValueError("state id out of range")
        return self.q_table_.values[states].argmax(axis=1)

    def score(self, env, horizon=None) -> float:
        """Greedy-rollout average per-step reward on a fresh environment."""
        if not hasattr(self, "q_table_"):
            raise RuntimeError("agent is not fitted; call fit first")
        return evaluate_greedy(env, self.q_table_, horizon)


class QLearningAgent(BaseQAgent):
    """Conventional epsilon-greedy tabular learner; never hops."""

    arm = "qlearning"

    def __init__(self, gamma=0.9, alpha=1.0, epsilon_greedy=0.1, max_steps=45000, seed=0):
        super().__init__(gamma=gamma, epsilon_greedy=epsilon_greedy, max_steps=max_steps, seed=seed)
        self.alpha = alpha

    def _validate_params(self):
        super()._validate_params()
        check_range(self.alpha, "alpha", 0.0, 1.0, low_inclusive=False)

    def _learn(self, s, a, r, s2):
        q_update(self.q_table_, s, a, r, s2, self.alpha, self.gamma)
        self.q_writes_ += 1


class TimeHoppingAgent(BaseQAgent):
    """Full-backup learner that teleports away from unpromising branches."""

    arm = "time_hopping"
    _uses_hops = True

    def __init__(
        self,
        gamma=0.9,
        epsilon_greedy=0.1,
        prune_threshold=0.5,
        target_temperature=1.0,
        max_steps=45000,
        seed=0,
    ):
        super().__init__(gamma=gamma, epsilon_greedy=epsilon_greedy, max_steps=max_steps, seed=seed)
        self.prune_threshold = prune_threshold
        self.target_temperature = target_temperature

    def _hop_config(self):
        cfg = HopConfig(
            prune_threshold=self.prune_threshold,
            target_temperature=self.target_temperature,
            rng_seed=self.seed,
        )
        cfg.validate()
        return cfg

    def _learn(self, s, a, r, s2):
        q_update(self.q_table_, s, a, r, s2, 1.0, self.gamma)
        self.q_writes_ += 1


class TimeHoppingEPAgent(TimeHoppingAgent):
    """Hopping learner that back-propagates every update through the graph."""

    arm = "time_hopping_ep"
    _uses_graph = True

    def __init__(
        self,
        gamma=0.9,
        epsilon_greedy=0.1,
        prune_threshold=0.5,
        target_temperature=1.0,
        epsilon_propagate=1e-6,
        dedupe=True,
        max_steps=45000,
        seed=0,
    ):
        super().__init__(
            gamma=gamma,
            epsilon_greedy=epsilon_greedy,
            prune_threshold=prune_threshold,
            target_temperature=target_temperature,
            max_steps=max_steps,
            seed=seed,
        )
        self.epsilon_propagate = epsilon_propagate
        self.dedupe = dedupe

    def _validate_params(self):
        super()._validate_params()
        check_range(self.epsilon_propagate, "epsilon_propagate", 0.0, None, low_inclusive=False)

    def setup(self, env):
        super().setup(env)
        self._prop_params = PropagationParams(
            gamma=self.gamma,
            epsilon=self.epsilon_propagate,
            max_updates=default_max_updates(
                env.state_count, env.action_count, self.gamma, self.epsilon_propagate
            ),
            dedupe=self.dedupe,
        )
        self._prop_params.validate()
        return self

    def _learn(self, s, a, r, s2):
        stats = seed_and_propagate(self.graph_, self.q_table_, s, a, r, s2, self._prop_params)
        self.q_writes_ += stats.updates_applied
        self.propagation_stats_.merge(stats)


def make_agent(arm: str, **params) -> BaseQAgent:
    """Instantiate the estimator for one benchmark arm by its wire name."""
    common = dict(
        gamma=params.get("gamma", 0.9),
        epsilon_greedy=params.get("epsilon_greedy", 0.1),
        max_steps=params.get("max_steps", 45000),
        seed=params.get("seed", 0),
    )
    if arm == "qlearning":
        return QLearningAgent(alpha=params.get("alpha", 1.0), **common)
    hopping = dict(
        prune_threshold=params.get("prune_threshold", 0.5),
        target_temperature=params.get("target_temperature", 1.0),
    )
    if arm == "time_hopping":
        return TimeHoppingAgent(**common, **hopping)
    if arm == "time_hopping_ep":
        return TimeHoppingEPAgent(
            epsilon_propagate=params.get("epsilon_propagate", 1e-6),
            dedupe=params.get("dedupe", True),
            **common,
            **hopping,
        )
    raise ValueError(f"unknown arm {arm!r}; expected one of {ARMS}")


def run_trial(agent: BaseQAgent, env, checkpoints) -> TrialResult:
    """Fit ``agent`` on ``env`` and bundle everything the harness reports."""
    agent.fit(env, checkpoints)
    return TrialResult(
        arm=agent.arm,
        seed=int(agent.seed),
        rows=agent.checkpoints_,
        q_table=agent.q_table_,
        explored_states=agent.stats_.visited_states(),
        sim_steps=agent.sim_steps_,
        hop_steps=agent.hop_steps_,
        propagation_updates=agent.q_writes_,
    )


def _validated_checkpoints(checkpoints, max_steps: int) -> set:
    if not checkpoints:
        return set()
    points = [int(c) for c in checkpoints]
    if points != sorted(points):
        raise ValueError("checkpoints must be sorted ascending")
    if points[0] < 0 or points[-1] > max_steps:
        raise ValueError("checkpoints must lie within [0, max_steps]")
    return set(points)
