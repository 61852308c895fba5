# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

import dataclasses

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Optional, Self

from ..encode import ImpactConfig, PromptOptions


class Normalization(StrEnum):
    """What the z-score normalization is applied to before the objectives are combined."""
    RETURNS = 'returns'
    REWARDS = 'rewards'


class AblationMode(StrEnum):
    LUCA = 'luca'
    DRL_C = 'drl_c'
    LUCA_M = 'luca_m'


@dataclass(frozen=True)
class RewardConfig:
    """How step rewards become training targets.

    Attributes:
        lam: Weight of the emission objective, in [0, 1]. Defaults to 0.5.
        gamma: Discount factor, in [0, 1]. Defaults to 1 (returns run to the episode end).
        zscore_eps: Added to the standard deviation by the z-score. Defaults to 1e-8.
        normalize: Whether returns or immediate rewards are normalized. Defaults to returns.
    """
    lam: float = 0.5
    gamma: float = 1.0
    zscore_eps: float = 1e-8
    normalize: Normalization = Normalization.RETURNS

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not self.zscore_eps > 0:
            raise ValueError("zscore_eps must be positive")
        object.__setattr__(self, 'normalize', Normalization(self.normalize))

    def cloned_with(self, **kwargs: object) -> Self:
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True)
class PpoHyper:
    """Hyperparameters of the policy optimization and of the training schedule.

    Attributes:
        clip_ratio: Clipping range of the probability ratio. Defaults to 0.2.
        coef_policy: Weight of the clipped policy objective. Defaults to 1.0.
        coef_value: Weight of the value error. Defaults to 0.5.
        coef_entropy: Weight of the entropy bonus. Defaults to 0.01.
        epochs_per_update: Full-batch gradient steps per iteration. Defaults to 4.
        iterations: Number of training iterations. Defaults to 1000.
        batch_size: Instances rolled out per iteration. Defaults to 20.
        l_batch: Iterations between batch resamplings. Defaults to 20.
        l_check: Iterations between validations. Defaults to 50.
        lr: Adam learning rate. Defaults to 2e-4.
    """
    clip_ratio: float = 0.2
    coef_policy: float = 1.0
    coef_value: float = 0.5
    coef_entropy: float = 0.01
    epochs_per_update: int = 4
    iterations: int = 1000
    batch_size: int = 20
    l_batch: int = 20
    l_check: int = 50
    lr: float = 2e-4

    def __post_init__(self) -> None:
        if not 0.0 < self.clip_ratio < 1.0:
            raise ValueError("clip_ratio must lie in (0, 1)")
        if min(self.coef_policy, self.coef_value, self.coef_entropy) < 0:
            raise ValueError("Loss coefficients must be non-negative")
        for name in ('epochs_per_update', 'iterations', 'batch_size', 'l_batch', 'l_check'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.lr > 0:
            raise ValueError("lr must be positive")

    def cloned_with(self, **kwargs: object) -> Self:
        return dataclasses.replace(self, **kwargs)


@dataclass(frozen=True)
class TrainConfig:
    """Everything a training run depends on.

    Attributes:
        reward: Reward settings.
        ppo: Optimization and schedule settings.
        impact: Hint refresh settings; `impact.n_l` is the refresh period.
        prompt: Prompt rendering options.
        mode: Which model variant to train.
        seed: Seed of the parameters, the batches and the action sampling.
        encoder_fallback: Whether to switch to the builtin text encoder when the configured one fails.
        checkpoint_dir: Where interval and final checkpoints go, or None to keep them in memory only.
    """
    reward: RewardConfig = field(default_factory=RewardConfig)
    ppo: PpoHyper = field(default_factory=PpoHyper)
    impact: ImpactConfig = field(default_factory=ImpactConfig)
    prompt: PromptOptions = field(default_factory=PromptOptions)
    mode: AblationMode = AblationMode.LUCA
    seed: int = 0
    encoder_fallback: bool = True
    checkpoint_dir: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, 'mode', AblationMode(self.mode))

    def cloned_with(self, **kwargs: object) -> Self:
        return dataclasses.replace(self, **kwargs)
