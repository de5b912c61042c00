"""Backward value propagation over the recorded transition graph.

After a transition is observed, its full backup may change the maximum value
of its source state. When it does, every recorded edge ending at that state
is re-backed-up too, and so on — a breadth-first wave flowing against the
edge directions until the per-state maxima stop moving by more than a
threshold. The wave gives hop-based training the long-range credit
assignment that step-by-step backups only achieve after many revisits.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .graph import Transition, TransitionGraph
from .qtable import QTable
from .validation import check_range


def default_max_updates(state_count: int, action_count: int, gamma: float, epsilon: float) -> int:
    """Safety cap for one wave, scaled to its geometric relaxation budget.

    A wave can legitimately reprocess every edge once per shrink factor of
    ``gamma`` until changes fall below ``epsilon``, so the cap multiplies the
    edge capacity by ``log(1/epsilon) / log(1/gamma)`` (plus slack). Anything
    beyond that indicates a non-terminating propagation bug.
    """
    if gamma <= 0.0:
        passes = 0
    else:
        passes = math.ceil(math.log(max(1.0 / epsilon, 2.0)) / math.log(1.0 / gamma))
    return state_count * action_count * (10 + passes)


class PropagationLimitError(RuntimeError):
    """Tripwire for runaway propagation; unreachable with epsilon > 0 and gamma < 1."""


@dataclass
class PropagationParams:
    """Knobs of one propagation wave.

    ``epsilon`` is the minimum change of a state's maximum value required to
    keep expanding the wave; it must be strictly positive so that waves over
    cyclic graphs provably terminate. ``max_updates`` is a safety cap only.
    ``dedupe`` skips queueing an edge that is already pending; disable it to
    compare against the naive queue discipline.
    """

    gamma: float
    epsilon: float = 1e-6
    max_updates: int | None = None
    dedupe: bool = True

    def validate(self) -> None:
        check_range(self.gamma, "gamma", 0.0, 1.0, high_inclusive=False)
        check_range(self.epsilon, "epsilon", 0.0, None, low_inclusive=False)
        if self.max_updates is not None and self.max_updates <= 0:
            raise ValueError("max_updates must be positive when set")


@dataclass
class PropagationStats:
    updates_applied: int = 0
    max_depth: int = 0
    queue_peak: int = 0
    appends_skipped: int = 0

    def merge(self, other: "PropagationStats") -> None:
        self.updates_applied += other.updates_applied
        self.max_depth = max(self.max_depth, other.max_depth)
        self.queue_peak = max(self.queue_peak, other.queue_peak)
        self.appends_skipped += other.appends_skipped


def propagate(
    graph: TransitionGraph, q: QTable, seed: Transition, params: PropagationParams
) -> PropagationStats:
    """Run one breadth-first backward wave starting from ``seed``.

    Mutates ``q`` in place and never touches ``graph``. For each queued edge:
    remember the source's maximum value, apply the full backup
    ``Q(source, action) = reward + gamma * max_a Q(target, a)``, recompute the
    maximum, and if it moved by more than ``epsilon`` append every recorded
    predecessor edge of the source to the queue.
    """
    params.validate()
    stored = graph.by_edge.get(seed.key)
    if stored is None or stored.target != seed.target or stored.reward != seed.reward:
        raise ValueError("seed transition has not been recorded in the graph")

    values = q.values
    gamma = params.gamma
    epsilon = params.epsilon
    cap = params.max_updates
    dedupe = params.dedupe

    stats = PropagationStats(queue_peak=1)
    queue: deque = deque()
    queue.append((seed, 0))
    pending = {seed.key}

    while queue:
        t, depth = queue.popleft()
        pending.discard(t.key)

        row = values[t.source]
        q_max = row.max()
        row[t.action] = t.reward + gamma * values[t.target].max()
        q_max_new = row.max()

        stats.updates_applied += 1
        if depth > stats.max_depth:
            stats.max_depth = depth
        if cap is not None and stats.updates_applied > cap:
            raise PropagationLimitError(
                f"propagation exceeded max_updates={cap}; "
                "check epsilon > 0 and environment determinism"
            )

        if abs(q_max_new - q_max) > epsilon:
            for pred in graph.predecessors(t.source):
                if dedupe and pred.key in pending:
                    stats.appends_skipped += 1
                    continue
                pending.add(pred.key)
                queue.append((pred, depth + 1))
            if len(queue) > stats.queue_peak:
                stats.queue_peak = len(queue)
    return stats


def seed_and_propagate(
    graph: TransitionGraph,
    q: QTable,
    source: int,
    action: int,
    reward: float,
    target: int,
    params: PropagationParams,
) -> PropagationStats:
    """Record the transition (no-op when already present), then propagate from it."""
    t = Transition(source, action, reward, target)
    graph.record(t)
    return propagate(graph, q, t, params)
