"""Gated linear chain: a small benchmark where deep states are slow to reach.

The chain has ``length`` positions. Action 1 ("advance") moves from position
``i`` to ``i + 1`` only when the running step count is divisible by the gate
period ``gates[i]``; otherwise the agent stays put. Action 0 ("stay") always
stays. Advancing out of the final position pays ``terminal_reward`` and wraps
back to position 0. Growing gate periods make deep positions take many steps
to reach under random exploration, which is exactly the regime that rewards
teleporting the simulation around.

Because the gate reads the step count, the position alone does not determine
the next state. The environment therefore enumerates *(position, phase)*
pairs, phase being the step count modulo the least common multiple of the
gate periods. That keeps every exposed transition a deterministic function of
the observed state id, which both the replay contract and conflict-free
transition recording require.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..model import TabularModel
from .base import TabularEnv

STAY = 0
ADVANCE = 1


@dataclass(frozen=True)
class GatedChainSpec:
    length: int = 5
    gates: tuple = (1, 2, 4, 8)
    terminal_reward: float = 1.0

    def __post_init__(self):
        if self.length < 2:
            raise ValueError("chain length must be at least 2")
        if len(self.gates) != self.length - 1:
            raise ValueError(
                f"need one gate per advancing position: {self.length - 1}, got {len(self.gates)}"
            )
        if any(int(k) < 1 for k in self.gates):
            raise ValueError("gate periods must be >= 1")

    @property
    def period(self) -> int:
        return math.lcm(*(int(k) for k in self.gates)) if self.gates else 1

    @property
    def state_count(self) -> int:
        return self.length * self.period


def chain_step(spec: GatedChainSpec, position: int, action: int, step_counter: int):
    """Position-level dynamics: returns ``(next_position, reward)``.

    Advancing out of the last position always succeeds, pays the terminal
    reward, and wraps to position 0.
    """
    if action == ADVANCE:
        if position == spec.length - 1:
            return 0, spec.terminal_reward
        if step_counter % spec.gates[position] == 0:
            return position + 1, 0.0
        return position, 0.0
    return position, 0.0


class GatedChainEnv(TabularEnv):
    """State ids enumerate (position, phase); see the module docstring."""

    def __init__(self, spec: GatedChainSpec | None = None, eval_horizon: int | None = None):
        spec = spec or GatedChainSpec()
        period = spec.period
        n = spec.state_count
        nxt = np.zeros((n, 2), dtype=np.int64)
        rew = np.zeros((n, 2), dtype=np.float64)
        for pos in range(spec.length):
            for phase in range(period):
                sid = pos * period + phase
                next_phase = (phase + 1) % period
                for a in (STAY, ADVANCE):
                    npos, r = chain_step(spec, pos, a, phase)
                    nxt[sid, a] = npos * period + next_phase
                    rew[sid, a] = r
        if eval_horizon is None:
            eval_horizon = 25 * spec.length
        super().__init__(TabularModel(nxt, rew), 0, eval_horizon, "chain")
        self.spec = spec

    def position_of(self, state: int) -> int:
        return state // self.spec.period

    def phase_of(self, state: int) -> int:
        return state % self.spec.period

    def fresh(self) -> "GatedChainEnv":
        return GatedChainEnv(self.spec, self.eval_horizon)
