"""Oriented graph of observed transitions with actions and rewards.

The graph stores each observed ``(source, action) -> (reward, target)`` edge
once and keeps, per state, the list of edges that end there. Backward value
propagation walks those predecessor lists. The graph may be disconnected;
no connectivity is assumed anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, List


class TransitionConflictError(RuntimeError):
    """Raised when one (source, action) pair is observed with two outcomes.

    The propagation update rule is only sound for deterministic environments,
    so a conflicting observation means the environment is buggy; recording
    fails loudly instead of overwriting.
    """


@dataclass(frozen=True)
class Transition:
    """One observed edge: taking ``action`` in ``source`` gave ``reward`` and ``target``."""

    source: int
    action: int
    reward: float
    target: int

    @property
    def key(self) -> tuple:
        return (self.source, self.action)


class TransitionGraph:
    def __init__(self):
        self.by_edge: dict[tuple, Transition] = {}
        self._predecessors: dict[int, List[Transition]] = {}

    def __len__(self) -> int:
        return len(self.by_edge)

    def __contains__(self, key: tuple) -> bool:
        return key in self.by_edge

    def record(self, t: Transition) -> bool:
        """Store ``t``; re-recording an identical edge is a no-op.

        Returns True when the edge is new. A different outcome for an existing
        (source, action) key raises :class:`TransitionConflictError`.
        """
        existing = self.by_edge.get(t.key)
        if existing is not None:
            if existing.target != t.target or existing.reward != t.reward:
                raise TransitionConflictError(
                    f"transition {t.key} recorded with conflicting outcomes: "
                    f"({existing.reward!r}, {existing.target!r}) vs ({t.reward!r}, {t.target!r})"
                )
            return False
        self.by_edge[t.key] = t
        self._predecessors.setdefault(t.target, []).append(t)
        return True

    def predecessors(self, state: int) -> List[Transition]:
        """Edges ending at ``state``, in insertion order. Treat as read-only."""
        return self._predecessors.get(state, [])

    def transitions(self) -> Iterable[Transition]:
        """All edges in insertion order."""
        return self.by_edge.values()

    def dump_csv(self, stream: IO[str]) -> None:
        """Debug dump, one edge per line, for graph-visualization tooling."""
        stream.write("from,action,reward,to\n")
        for t in self.by_edge.values():
            stream.write(f"{t.source},{t.action},{t.reward!r},{t.target}\n")
