"""Dense state-action value table."""
from __future__ import annotations

import numpy as np

from .validation import check_index


class QTable:
    """Value estimates for every (state, action) pair of an enumerated space.

    Backed by a dense float array so that unseen pairs simply hold the
    ``default`` value. ``greedy_action`` breaks ties by the lowest action id,
    which keeps every downstream policy and benchmark reproducible.
    """

    def __init__(self, state_count: int, action_count: int, default: float = 0.0):
        if state_count <= 0 or action_count <= 0:
            raise ValueError("state_count and action_count must be positive")
        self.state_count = int(state_count)
        self.action_count = int(action_count)
        self.default = float(default)
        self.values = np.full((self.state_count, self.action_count), self.default)

    def max_q(self, state: int) -> float:
        """Largest value across the actions of ``state`` (default if untouched)."""
        state = check_index(state, self.state_count, "state")
        return float(self.values[state].max())

    def greedy_action(self, state: int) -> int:
        """Action with the highest value; ties go to the lowest action id."""
        state = check_index(state, self.state_count, "state")
        return int(np.argmax(self.values[state]))

    def get(self, state: int, action: int) -> float:
        state = check_index(state, self.state_count, "state")
        action = check_index(action, self.action_count, "action")
        return float(self.values[state, action])

    def set(self, state: int, action: int, value: float) -> None:
        state = check_index(state, self.state_count, "state")
        action = check_index(action, self.action_count, "action")
        self.values[state, action] = float(value)

    def state_maxima(self) -> np.ndarray:
        """Per-state maximum value, as one array."""
        return self.values.max(axis=1)

    def copy(self) -> "QTable":
        dup = QTable(self.state_count, self.action_count, self.default)
        dup.values = self.values.copy()
        return dup

    def equals(self, other: "QTable") -> bool:
        """Exact equality of every entry (no tolerance)."""
        return (
            self.state_count == other.state_count
            and self.action_count == other.action_count
            and bool(np.array_equal(self.values, other.values))
        )

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"QTable(states={self.state_count}, actions={self.action_count})"
