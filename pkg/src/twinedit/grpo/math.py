"""Group-relative advantage normalization and the clipped surrogate objective."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RolloutGroup:
    """Rewards of G >= 2 rollouts of the same sample."""

    rewards: tuple[float, ...]

    def __post_init__(self):
        if len(self.rewards) < 2:
            raise ValueError("a rollout group needs at least 2 rewards")
        if not all(math.isfinite(r) for r in self.rewards):
            raise ValueError("rewards must be finite")

    @property
    def group_size(self) -> int:
        return len(self.rewards)


@dataclass(frozen=True)
class GrpoConfig:
    group_size: int = 8
    clip_epsilon: float = 0.2
    kl_coefficient: float = 0.04
    advantage_epsilon: float = 1e-8
    # Run-scale constants recorded for full-model training configs; the toy
    # trainer uses its own learning rate.
    batch_size: int = 8
    learning_rate: float = 5e-7
    epochs: int = 10
    lora_rank: int = 8
    toy_learning_rate: float = 0.5

    def __post_init__(self):
        if self.group_size < 2:
            raise ValueError("group_size must be >= 2")
        if not 0 < self.clip_epsilon < 1:
            raise ValueError("clip_epsilon must be in (0, 1)")
        if self.kl_coefficient < 0:
            raise ValueError("kl_coefficient must be >= 0")


def group_advantages(group: RolloutGroup, cfg: GrpoConfig = GrpoConfig()) -> list[float]:
    """(r - mean) / (population std + epsilon) within the group.

    All-equal rewards yield all-zero advantages rather than an error.
    """
    r = np.asarray(group.rewards, dtype=np.float64)
    std = float(r.std())  # population std
    return list((r - r.mean()) / (std + cfg.advantage_epsilon))


def kl_estimate(logp_new: float, logp_ref: float) -> float:
    """Nonnegative single-sample KL estimate exp(d) - d - 1, d = logp_ref - logp_new."""
    d = logp_ref - logp_new
    return math.exp(d) - d - 1.0


def grpo_objective(
    ratio: float, advantage: float, kl: float, cfg: GrpoConfig = GrpoConfig()
) -> float:
    """Clipped surrogate minus the KL penalty, for one rollout."""
    if ratio <= 0:
        raise ValueError("probability ratio must be positive")
    eps = cfg.clip_epsilon
    clipped = min(max(ratio, 1.0 - eps), 1.0 + eps)
    return min(ratio * advantage, clipped * advantage) - cfg.kl_coefficient * kl
