"""Desk-scale GRPO trainer on a synthetic editing task.

The environment builds a one-frame twin with N objects and hides a target
object id; an action picks the object to edit.  Each action is turned into
a full rollout transcript and scored by the real reward engine (never a
shortcut), so the whole reward-to-update path is exercised with a tiny
categorical policy standing in for the LLM.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from ..rewards import JudgeVerdict, RewardConfig, score_rollout
from ..rollout import parse_rollout, run_execute_block
from ..twin import (
    FrameTwin,
    ObjectInstance,
    RleMask,
    SpatialProps,
    VideoTwin,
    serialize_twin,
    with_instance,
)
from .math import GrpoConfig, RolloutGroup, group_advantages, kl_estimate

__all__ = ["ToyEnv", "CategoricalPolicy", "make_toy_env", "train_toy_policy", "surrogate_and_grad"]


def make_toy_env(n_actions: int = 4, target: int = 0, seed: int = 0) -> "ToyEnv":
    rng = np.random.default_rng(seed)
    instances = []
    for i in range(n_actions):
        instances.append(
            ObjectInstance(
                id=i,
                category=rng.choice(["dog", "cat", "car", "bird", "cup"]),
                attributes=(str(rng.choice(["brown", "red", "small", "shiny"])),),
                mask_ref=RleMask((4, 4, 8), 4, 4),
                spatial=SpatialProps(
                    x=round(float(rng.uniform(0.1, 0.9)), 6),
                    y=round(float(rng.uniform(0.1, 0.9)), 6),
                    depth=round(float(rng.uniform(0.0, 1.0)), 6),
                    size=0.25,
                ),
            )
        )
    twin = VideoTwin(1, (FrameTwin(0, tuple(instances)),))
    return ToyEnv(twin=twin, target_id=target)


@dataclass(frozen=True)
class ToyEnv:
    twin: VideoTwin
    target_id: int
    reward_cfg: RewardConfig = RewardConfig()
    # When set, a wrong pick also produces a sloppy rollout (broken tokens,
    # failing execute, malformed edit), driving the reward to the worst case.
    sloppy_wrong: bool = True

    @property
    def n_actions(self) -> int:
        return len(self.twin.frames[0].instances)

    def score(self, action: int) -> float:
        correct = action == self.target_id
        if correct or not self.sloppy_wrong:
            inst = self.twin.frames[0].instance(action)
            edited = with_instance(
                self.twin, 0, replace(inst, attributes=inst.attributes + ("edited",))
            )
            text = (
                f"<think>object {action} matches the query</think>"
                f"<edit>{serialize_twin(edited)}</edit>"
            )
            outcomes = []
        else:
            text = f"<think>object {action}\n<execute>leftmost(</execute>"
            outcomes = [run_execute_block("leftmost(", self.twin, 1000)]
        breakdown = score_rollout(
            parse_rollout(text),
            outcomes,
            self.twin,
            JudgeVerdict(correct, "target match" if correct else "wrong object"),
            self.reward_cfg,
        )
        return breakdown.total


@dataclass
class CategoricalPolicy:
    logits: np.ndarray

    def probs(self) -> np.ndarray:
        z = self.logits - self.logits.max()
        e = np.exp(z)
        return e / e.sum()

    def logp(self, action: int) -> float:
        z = self.logits - self.logits.max()
        return float(z[action] - np.log(np.exp(z).sum()))

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.choice(len(self.logits), p=self.probs()))

    def entropy(self) -> float:
        p = self.probs()
        return float(-(p * np.log(np.clip(p, 1e-12, None))).sum())


def surrogate_and_grad(
    logits: np.ndarray,
    actions: np.ndarray,
    advantages: np.ndarray,
    old_logp: np.ndarray,
    ref_logp: np.ndarray,
    cfg: GrpoConfig,
) -> tuple[float, np.ndarray]:
    """Mean clipped surrogate minus KL penalty over a group, with its
    analytic gradient on the logits."""
    pol = CategoricalPolicy(logits)
    p = pol.probs()
    eps = cfg.clip_epsilon
    total = 0.0
    grad = np.zeros_like(logits)
    g = len(actions)
    for a, adv, lp_old, lp_ref in zip(actions, advantages, old_logp, ref_logp):
        lp = pol.logp(int(a))
        ratio = np.exp(lp - lp_old)
        clipped = min(max(ratio, 1.0 - eps), 1.0 + eps)
        unclipped_term = ratio * adv
        clipped_term = clipped * adv
        kl = kl_estimate(lp, lp_ref)
        total += min(unclipped_term, clipped_term) - cfg.kl_coefficient * kl
        dlogp = -p.copy()
        dlogp[int(a)] += 1.0
        # The clipped branch has zero gradient in ratio; ties go to the
        # unclipped branch (they coincide at ratio = 1).
        if unclipped_term <= clipped_term:
            grad += adv * ratio * dlogp
        dkl_dlogp = 1.0 - np.exp(lp_ref - lp)
        grad -= cfg.kl_coefficient * dkl_dlogp * dlogp
    return total / g, grad / g


@dataclass(frozen=True)
class TrainResult:
    policy: CategoricalPolicy
    reward_curve: list[float]
    log_records: list[dict]


def train_toy_policy(
    env_factory: Callable[[int], ToyEnv] | ToyEnv,
    cfg: GrpoConfig = GrpoConfig(),
    seed: int = 0,
    iterations: int = 500,
    log_path: Path | None = None,
) -> TrainResult:
    """Policy-gradient loop: sample a group, score through the reward
    engine, normalize advantages in-group, ascend the surrogate.

    Deterministic given the seed; the per-iteration log mirrors the
    documented training-record schema.
    """
    rng = np.random.default_rng(seed)
    env0 = env_factory if isinstance(env_factory, ToyEnv) else env_factory(0)
    policy = CategoricalPolicy(np.zeros(env0.n_actions, dtype=np.float64))
    ref = CategoricalPolicy(policy.logits.copy())
    curve: list[float] = []
    records: list[dict] = []
    for it in range(iterations):
        env = env_factory if isinstance(env_factory, ToyEnv) else env_factory(it)
        actions = np.array([policy.sample(rng) for _ in range(cfg.group_size)])
        rewards = [env.score(int(a)) for a in actions]
        advantages = np.array(group_advantages(RolloutGroup(tuple(rewards)), cfg))
        old_logp = np.array([policy.logp(int(a)) for a in actions])
        ref_logp = np.array([ref.logp(int(a)) for a in actions])
        _, grad = surrogate_and_grad(policy.logits, actions, advantages, old_logp, ref_logp, cfg)
        policy.logits = policy.logits + cfg.toy_learning_rate * grad
        mean_reward = float(np.mean(rewards))
        curve.append(mean_reward)
        kl_mean = float(np.mean([kl_estimate(n, r) for n, r in zip(old_logp, ref_logp)]))
        records.append(
            {
                "iteration": it,
                "mean_reward": mean_reward,
                "mean_advantage_abs": float(np.mean(np.abs(advantages))),
                "kl_mean": kl_mean,
                "policy_entropy": policy.entropy(),
            }
        )
    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec) + "\n")
    return TrainResult(policy, curve, records)
