"""Deterministic tabular transition models and the value-iteration solver."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .qtable import QTable
from .validation import check_index, check_range


@dataclass(frozen=True)
class TabularModel:
    """A deterministic MDP as two dense arrays indexed by (state, action).

    ``next_state[s, a]`` is the successor id and ``reward[s, a]`` the reward
    obtained for taking ``a`` in ``s``. Both arrays are total: every pair is
    defined.
    """

    next_state: np.ndarray
    reward: np.ndarray

    def __post_init__(self):
        if self.next_state.shape != self.reward.shape or self.next_state.ndim != 2:
            raise ValueError("next_state and reward must share a 2-D (S, A) shape")

    @property
    def state_count(self) -> int:
        return self.next_state.shape[0]

    @property
    def action_count(self) -> int:
        return self.next_state.shape[1]

    def transition(self, state: int, action: int) -> Tuple[int, float]:
        state = check_index(state, self.state_count, "state")
        action = check_index(action, self.action_count, "action")
        return int(self.next_state[state, action]), float(self.reward[state, action])


def model_from_fn(
    state_count: int, action_count: int, fn: Callable[[int, int], Tuple[int, float]]
) -> TabularModel:
    """Materialize ``fn(s, a) -> (next, reward)`` into dense arrays."""
    nxt = np.zeros((state_count, action_count), dtype=np.int64)
    rew = np.zeros((state_count, action_count), dtype=np.float64)
    for s in range(state_count):
        for a in range(action_count):
            n, r = fn(s, a)
            nxt[s, a] = n
            rew[s, a] = r
    return TabularModel(nxt, rew)


def value_iteration(model: TabularModel, gamma: float, tol: float = 1e-9) -> QTable:
    """Solve ``Q(s,a) = R(s,a) + gamma * max_a' Q(s',a')`` by synchronous sweeps.

    Stops once ``gamma * max|dQ|`` over a sweep is at most ``tol``, which
    bounds the Bellman residual of the returned table by ``tol``.
    """
    gamma = check_range(gamma, "gamma", 0.0, 1.0, high_inclusive=False)
    tol = check_range(tol, "tol", 0.0, None, low_inclusive=False)
    q = np.zeros((model.state_count, model.action_count))
    while True:
        v = q.max(axis=1)
        q_new = model.reward + gamma * v[model.next_state]
        delta = np.abs(q_new - q).max()
        q = q_new
        if gamma * delta <= tol:
            break
    table = QTable(model.state_count, model.action_count)
    table.values = q
    return table


def greedy_policy(q: QTable) -> np.ndarray:
    """Per-state argmax action, ties resolved to the lowest action id."""
    return q.values.argmax(axis=1)


def greedy_rollout_reward(
    model: TabularModel, q: QTable, start: int, horizon: int
) -> float:
    """Average per-step reward of the greedy policy over ``horizon`` steps."""
    policy = greedy_policy(q)
    s = check_index(start, model.state_count, "start")
    total = 0.0
    for _ in range(horizon):
        a = int(policy[s])
        total += float(model.reward[s, a])
        s = int(model.next_state[s, a])
    return total / horizon


def greedy_cycle_gain(model: TabularModel, q: QTable, start: int) -> float:
    """Steady-state per-step reward of the greedy policy started at ``start``.

    Deterministic dynamics guarantee the greedy trajectory enters a cycle;
    the gain is the exact reward average over that cycle, free of any
    horizon-truncation transient.
    """
    policy = greedy_policy(q)
    s = check_index(start, model.state_count, "start")
    first_seen: dict[int, int] = {}
    rewards = []
    t = 0
    while s not in first_seen:
        first_seen[s] = t
        a = int(policy[s])
        rewards.append(float(model.reward[s, a]))
        s = int(model.next_state[s, a])
        t += 1
    i = first_seen[s]
    cycle = rewards[i:]
    return sum(cycle) / len(cycle)
