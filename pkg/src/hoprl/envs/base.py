"""Common environment machinery.

Every benchmark environment is a thin stateful wrapper around a
:class:`~hoprl.model.TabularModel`: dense next-state and reward tables make
transitions exact, cheap, and trivially replayable. Environments additionally
support being *placed* into any enumerated state (``set_state``) without
touching anything the learner has accumulated — the capability hop-based
training relies on.
"""
from __future__ import annotations

from ..model import (
    TabularModel,
    greedy_cycle_gain,
    greedy_policy,
    greedy_rollout_reward,
    value_iteration,
)
from ..validation import check_index


class TabularEnv:
    """Deterministic enumerated-state environment backed by transition tables."""

    def __init__(self, model: TabularModel, start_state: int, eval_horizon: int, name: str):
        self._model = model
        self.start_state = check_index(start_state, model.state_count, "start_state")
        self.eval_horizon = int(eval_horizon)
        self.name = name
        self._state = self.start_state
        self.steps_taken = 0  # bookkeeping only; dynamics live in the state id
        self._optimum_cache: dict[float, float] = {}

    @property
    def state_count(self) -> int:
        return self._model.state_count

    @property
    def action_count(self) -> int:
        return self._model.action_count

    @property
    def state(self) -> int:
        return self._state

    def model(self) -> TabularModel:
        return self._model

    def reset(self) -> int:
        self._state = self.start_state
        self.steps_taken = 0
        return self._state

    def step(self, action: int) -> tuple[int, float]:
        """Apply ``action``; returns ``(next_state, reward)``."""
        action = check_index(action, self.action_count, "action")
        nxt = int(self._model.next_state[self._state, action])
        reward = float(self._model.reward[self._state, action])
        self._state = nxt
        self.steps_taken += 1
        return nxt, reward

    def set_state(self, state: int) -> None:
        """Place the simulation into ``state``; learner data is never touched."""
        self._state = check_index(state, self.state_count, "state")

    def fresh(self) -> "TabularEnv":
        """Independent instance over the same dynamics, at the start state."""
        return TabularEnv(self._model, self.start_state, self.eval_horizon, self.name)

    def optimal_performance(self, gamma: float) -> float:
        """Average per-step reward of the value-iteration greedy policy under
        the exact evaluation protocol (``eval_horizon`` steps from the start).

        This is the 100% mark all benchmark percentages are measured against;
        measuring it with the same protocol as the learners keeps the mark
        free of horizon-truncation bias. Cached per discount factor.
        """
        key = (gamma, self.eval_horizon)
        if key not in self._optimum_cache:
            q = value_iteration(self._model, gamma)
            self._optimum_cache[key] = greedy_rollout_reward(
                self._model, q, self.start_state, self.eval_horizon
            )
        return self._optimum_cache[key]

    def optimal_steady_gain(self, gamma: float) -> float:
        """Exact cycle-average reward of the value-iteration greedy policy."""
        q = value_iteration(self._model, gamma)
        return greedy_cycle_gain(self._model, q, self.start_state)

    def optimal_policy(self, gamma: float):
        return greedy_policy(value_iteration(self._model, gamma))
