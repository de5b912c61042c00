"""Teleportation of the simulation to previously visited states.

Three pieces, deliberately separable so any one can be swapped out:

* a trigger that flags the current exploration branch as unpromising when its
  discounted outlook falls below a fraction of the best value seen anywhere,
* a target selector that samples a visited state, biased toward states with
  untried actions and few visits,
* the hop itself, which only moves the simulation; everything the learner has
  accumulated (value table, transition graph, counters) stays intact.

The trigger predicate and the selection weighting are this package's own
reconstructions of components whose original internals are not public; both
are labeled ``reconstructed`` in emitted metadata.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qtable import QTable
from .validation import check_index, check_range

HOP_IMPLEMENTATION = "reconstructed"


@dataclass
class HopConfig:
    """Trigger and target-selection knobs.

    ``prune_threshold`` is the fraction of the global best value below which
    the current branch is abandoned; 0 disables hopping entirely.
    ``target_temperature`` softens the exploration-biased target weighting.
    """

    prune_threshold: float = 0.5
    target_temperature: float = 1.0
    rng_seed: int = 0

    def validate(self) -> None:
        check_range(self.prune_threshold, "prune_threshold", 0.0, 1.0)
        check_range(self.target_temperature, "target_temperature", 0.0, None, low_inclusive=False)


class ExplorationStats:
    """Per-state visit counts and tried-action bookkeeping for one trial."""

    def __init__(self, state_count: int, action_count: int):
        self.state_count = int(state_count)
        self.action_count = int(action_count)
        self.visit_count = np.zeros(self.state_count, dtype=np.int64)
        self.tried = np.zeros((self.state_count, self.action_count), dtype=bool)

    def observe_visit(self, state: int) -> None:
        self.visit_count[state] += 1

    def observe_action(self, state: int, action: int) -> None:
        self.tried[state, action] = True

    def is_visited(self, state: int) -> bool:
        return bool(self.visit_count[state] > 0)

    def visited_states(self) -> np.ndarray:
        """Ids of visited states, ascending (deterministic iteration order)."""
        return np.flatnonzero(self.visit_count > 0)

    @property
    def explored_count(self) -> int:
        return int(np.count_nonzero(self.visit_count))

    def untried_count(self, state: int) -> int:
        return self.action_count - int(np.count_nonzero(self.tried[state]))


def best_visited_value(q: QTable, stats: ExplorationStats) -> float:
    """Largest per-state maximum over visited states; 0 when nothing is visited."""
    visited = stats.visit_count > 0
    if not visited.any():
        return 0.0
    return float(q.values[visited].max())


def should_hop(
    q: QTable, state: int, gamma: float, stats: ExplorationStats, cfg: HopConfig
) -> bool:
    """True when the discounted outlook of ``state`` is an unpromising branch.

    Pure predicate: ``gamma * max_q(state) < prune_threshold * best``, where
    ``best`` is the largest per-state maximum among visited states. Before any
    reward has been seen both sides are 0 and the strict inequality is false,
    so hopping never starts ahead of the first learning signal.
    """
    cfg.validate()
    return gamma * q.max_q(state) < cfg.prune_threshold * best_visited_value(q, stats)


def select_target(
    stats: ExplorationStats, cfg: HopConfig, rng: np.random.Generator | None = None
) -> int:
    """Sample a visited state, weighted toward unexplored corners.

    Weight of state s is ``exp(score / temperature)`` with
    ``score = untried_action_count(s) + 1 / (1 + visit_count(s))``.
    Deterministic given the generator's stream; falls back to a generator
    seeded with ``cfg.rng_seed`` when none is supplied.
    """
    cfg.validate()
    visited = stats.visited_states()
    if visited.size == 0:
        raise ValueError("cannot select a hop target: no state has been visited")
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    untried = stats.action_count - stats.tried[visited].sum(axis=1)
    scores = untried + 1.0 / (1.0 + stats.visit_count[visited])
    weights = np.exp((scores - scores.max()) / cfg.target_temperature)
    probs = weights / weights.sum()
    return int(rng.choice(visited, p=probs))


def hop(env, target: int, stats: ExplorationStats) -> None:
    """Teleport the simulation to ``target``; learner data is untouched."""
    target = check_index(target, env.state_count, "target")
    if not stats.is_visited(target):
        raise ValueError(f"hop target {target} has never been visited")
    env.set_state(target)
