"""Tabular Q-learning accelerated by simulation teleportation and reverse
value propagation over a recorded transition graph, plus two deterministic
benchmark environments and a reproducible experiment harness."""

from .agents import (
    ARMS,
    CheckpointRow,
    QLearningAgent,
    TimeHoppingAgent,
    TimeHoppingEPAgent,
    TrialResult,
    evaluate_greedy,
    make_agent,
    q_update,
    run_trial,
)
from .envs import CrawlerEnv, CrawlerSpec, GatedChainEnv, GatedChainSpec, TabularEnv
from .graph import Transition, TransitionConflictError, TransitionGraph
from .hopping import ExplorationStats, HopConfig, hop, select_target, should_hop
from .model import TabularModel, greedy_policy, model_from_fn, value_iteration
from .propagation import (
    PropagationLimitError,
    PropagationParams,
    PropagationStats,
    propagate,
    seed_and_propagate,
)
from .qtable import QTable

__all__ = [
    "ARMS",
    "CheckpointRow",
    "CrawlerEnv",
    "CrawlerSpec",
    "ExplorationStats",
    "GatedChainEnv",
    "GatedChainSpec",
    "HopConfig",
    "PropagationLimitError",
    "PropagationParams",
    "PropagationStats",
    "QLearningAgent",
    "QTable",
    "TabularEnv",
    "TabularModel",
    "TimeHoppingAgent",
    "TimeHoppingEPAgent",
    "Transition",
    "TransitionConflictError",
    "TransitionGraph",
    "TrialResult",
    "evaluate_greedy",
    "greedy_policy",
    "hop",
    "make_agent",
    "model_from_fn",
    "propagate",
    "q_update",
    "run_trial",
    "seed_and_propagate",
    "select_target",
    "should_hop",
    "value_iteration",
]

__version__ = "0.1.0"
