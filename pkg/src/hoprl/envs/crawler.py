"""Two-limb crawling robot with discretized joints.

The robot is a rigid body with a limb at each end; every limb has an upper
and a lower segment, giving four independently driven joints. Joint angles
are discretized into bins, and a composite action moves each joint one bin
up, one bin down, or not at all — with the combination that moves nothing
excluded, 3^4 - 1 = 80 composite actions. The state id is the mixed-radix
encoding of the four bin indices.

Reward is the horizontal displacement of the body under a quasi-static
contact model: a limb tip touching the ground both before and after a joint
move acts as an anchor, and the body translates so the anchor stays fixed;
with both limbs anchored the body follows the mean of the two demands, and
with no anchor it does not move. The front limb's geometry mirrors the rear
limb's, so mirroring a configuration left-right exactly negates the
displacement.

Default geometry (body 4, segments 2 + 2, shoulders 2.5 above ground,
upper joints spanning [-pi/6, pi/2] from straight down, lower joints
[0, 5pi/6] of elbow bend) lets the tips reach the ground across a wide range
of bins. All constants are configurable; none are calibrated to any external
robot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..model import TabularModel
from ..validation import check_index
from .base import TabularEnv

ACTION_COUNT = 3**4 - 1  # 80: the all-still combination is excluded
_ALL_STILL_RAW = 1 * 27 + 1 * 9 + 1 * 3 + 1  # raw ternary index of (0,0,0,0) deltas


@dataclass(frozen=True)
class CrawlerSpec:
    upper_bins: int = 9
    lower_bins: int = 13
    upper_range: tuple = (-math.pi / 6, math.pi / 2)
    lower_range: tuple = (0.0, 5 * math.pi / 6)
    upper_length: float = 2.0
    lower_length: float = 2.0
    body_length: float = 4.0
    shoulder_height: float = 2.5

    def __post_init__(self):
        if self.upper_bins < 2 or self.lower_bins < 2:
            raise ValueError("each joint needs at least 2 bins")

    @classmethod
    def reduced(cls, bins: int = 5) -> "CrawlerSpec":
        """Desk-scale discretization: ``bins`` per joint instead of 9 x 13."""
        return cls(upper_bins=bins, lower_bins=bins)

    @property
    def radices(self) -> tuple:
        return (self.upper_bins, self.lower_bins, self.upper_bins, self.lower_bins)

    @property
    def state_count(self) -> int:
        return (self.upper_bins * self.lower_bins) ** 2

    @property
    def action_count(self) -> int:
        return ACTION_COUNT

    def encode(self, bins) -> int:
        """Mixed-radix state id of (upper1, lower1, upper2, lower2) bins."""
        u1, l1, u2, l2 = (check_index(b, r, "joint bin") for b, r in zip(bins, self.radices))
        return ((u1 * self.lower_bins + l1) * self.upper_bins + u2) * self.lower_bins + l2

    def decode(self, state: int) -> tuple:
        state = check_index(state, self.state_count, "state")
        l2 = state % self.lower_bins
        rest = state // self.lower_bins
        u2 = rest % self.upper_bins
        rest //= self.upper_bins
        l1 = rest % self.lower_bins
        u1 = rest // self.lower_bins
        return (u1, l1, u2, l2)

    def action_deltas(self, action: int) -> tuple:
        """Per-joint bin moves in {-1, 0, +1} for one composite action id."""
        action = check_index(action, ACTION_COUNT, "action")
        raw = action if action < _ALL_STILL_RAW else action + 1
        digits = (raw // 27, (raw // 9) % 3, (raw // 3) % 3, raw % 3)
        return tuple(d - 1 for d in digits)

    def action_from_deltas(self, deltas) -> int:
        if all(d == 0 for d in deltas):
            raise ValueError("the all-still combination is not in the action space")
        raw = 0
        for d in deltas:
            if d not in (-1, 0, 1):
                raise ValueError(f"joint delta must be in {{-1, 0, 1}}, got {d}")
            raw = raw * 3 + (d + 1)
        return raw if raw < _ALL_STILL_RAW else raw - 1

    def joint_angles(self, state: int) -> tuple:
        """Joint angles (radians) of the four bins encoded in ``state``."""
        u1, l1, u2, l2 = self.decode(state)
        ug = _grid(self.upper_range, self.upper_bins)
        lg = _grid(self.lower_range, self.lower_bins)
        return (ug[u1], lg[l1], ug[u2], lg[l2])

    def mirror_state(self, state: int) -> int:
        u1, l1, u2, l2 = self.decode(state)
        return self.encode((u2, l2, u1, l1))

    def mirror_action(self, action: int) -> int:
        d1, d2, d3, d4 = self.action_deltas(action)
        return self.action_from_deltas((d3, d4, d1, d2))


def _grid(rng: tuple, bins: int) -> np.ndarray:
    return np.linspace(rng[0], rng[1], bins)


def build_crawler_model(spec: CrawlerSpec) -> TabularModel:
    """Dense next-state and displacement-reward tables for every (state, action)."""
    ub, lb = spec.upper_bins, spec.lower_bins
    n = spec.state_count

    # Per-limb tip position for every (upper_bin, lower_bin) configuration.
    ua = _grid(spec.upper_range, ub)[:, None]
    la = _grid(spec.lower_range, lb)[None, :]
    tip_x = spec.upper_length * np.sin(ua) + spec.lower_length * np.sin(ua + la)
    tip_y = spec.shoulder_height - spec.upper_length * np.cos(ua) - spec.lower_length * np.cos(ua + la)

    ids = np.arange(n)
    l2 = ids % lb
    rest = ids // lb
    u2 = rest % ub
    rest //= ub
    l1 = rest % lb
    u1 = rest // lb
    bins = np.stack([u1, l1, u2, l2], axis=1)

    # Limb-local tip abscissa per state; the front limb is mirrored, so its
    # anchored demand is the negated local difference (the constant shoulder
    # offset cancels exactly, keeping the mirror antisymmetry bit-exact).
    rear_x = tip_x[u1, l1]
    front_x = tip_x[u2, l2]
    rear_contact = tip_y[u1, l1] <= 0.0
    front_contact = tip_y[u2, l2] <= 0.0

    deltas = np.array([CrawlerSpec.action_deltas(spec, a) for a in range(ACTION_COUNT)])
    limits = np.array([ub - 1, lb - 1, ub - 1, lb - 1])
    next_bins = np.clip(bins[:, None, :] + deltas[None, :, :], 0, limits)
    weights = np.array([lb * ub * lb, ub * lb, lb, 1])
    next_ids = next_bins @ weights

    dem_rear = rear_x[:, None] - rear_x[next_ids]
    dem_front = front_x[next_ids] - front_x[:, None]
    anch_rear = rear_contact[:, None] & rear_contact[next_ids]
    anch_front = front_contact[:, None] & front_contact[next_ids]
    count = anch_rear.astype(np.int64) + anch_front.astype(np.int64)
    total = np.where(anch_rear, dem_rear, 0.0) + np.where(anch_front, dem_front, 0.0)
    displacement = np.where(count > 0, total / np.maximum(count, 1), 0.0)

    return TabularModel(next_ids.astype(np.int64), displacement)


class CrawlerEnv(TabularEnv):
    """Stateful crawler; also tracks the body's absolute position for display."""

    def __init__(self, spec: CrawlerSpec | None = None, eval_horizon: int = 100):
        spec = spec or CrawlerSpec.reduced()
        model = build_crawler_model(spec)
        start = spec.encode(tuple((r - 1) // 2 for r in spec.radices))
        name = "crawler" if spec.upper_bins != 9 or spec.lower_bins != 13 else "crawler-full"
        super().__init__(model, start, eval_horizon, name)
        self.spec = spec
        self.body_position = 0.0

    def step(self, action: int) -> tuple[int, float]:
        nxt, reward = super().step(action)
        self.body_position += reward
        return nxt, reward

    def joint_bins(self) -> tuple:
        return self.spec.decode(self.state)

    def joint_angles(self) -> tuple:
        return self.spec.joint_angles(self.state)

    def fresh(self) -> "CrawlerEnv":
        return CrawlerEnv(self.spec, self.eval_horizon)
