from .math import GrpoConfig, RolloutGroup, group_advantages, grpo_objective, kl_estimate
from .toy import (
    CategoricalPolicy,
    ToyEnv,
    TrainResult,
    make_toy_env,
    surrogate_and_grad,
    train_toy_policy,
)

__all__ = [
    "GrpoConfig",
    "RolloutGroup",
    "group_advantages",
    "grpo_objective",
    "kl_estimate",
    "CategoricalPolicy",
    "ToyEnv",
    "TrainResult",
    "make_toy_env",
    "surrogate_and_grad",
    "train_toy_policy",
]
