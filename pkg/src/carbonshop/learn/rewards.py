# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Reward algebra.

The immediate makespan reward is the negative increase of the makespan lower bound, so its sum over
an episode is minus the final makespan (the initial bound aside). The immediate emission reward is
the negative emission of the scheduled operation, which sums to minus the total emission.
"""

from typing import Sequence

import numpy as np

from ..sim import StepOutcome
from .config import Normalization, RewardConfig


def immediate_rewards(outcome: StepOutcome) -> tuple[float, float]:
    """The makespan and emission rewards of a step."""
    return -outcome.delta_makespan_lb, -outcome.delta_emission


def discounted_returns(rewards: Sequence[float], gamma: float) -> list[float]:
    """Discounted sums of the rewards from every step to the episode end."""
    returns = [0.0] * len(rewards)
    running = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        running = rewards[t] + gamma * running
        returns[t] = running
    return returns


def zscore(values: Sequence[float], eps: float = 1e-8) -> np.ndarray:
    """Standardize values with the population standard deviation.

    Raises:
        ValueError: If there is no value.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("zscore needs at least one value")
    return (values - values.mean()) / (values.std() + eps)


def combine_rewards(r_ms: np.ndarray, r_ce: np.ndarray, lam: float) -> np.ndarray:
    """Weighted combination `(1 - lam) * r_ms + lam * r_ce`.

    Raises:
        ValueError: If the sequences differ in length.
    """
    r_ms, r_ce = np.asarray(r_ms, dtype=np.float64), np.asarray(r_ce, dtype=np.float64)
    if r_ms.shape != r_ce.shape:
        raise ValueError(f"Reward sequences differ in shape: {r_ms.shape} and {r_ce.shape}")
    return (1.0 - lam) * r_ms + lam * r_ce


def advantages(returns: np.ndarray, values: np.ndarray) -> np.ndarray:
    """`A = R - V` for every step.

    Raises:
        ValueError: If the sequences differ in length.
    """
    returns, values = np.asarray(returns, dtype=np.float64), np.asarray(values, dtype=np.float64)
    if returns.shape != values.shape:
        raise ValueError(f"Returns and values differ in shape: {returns.shape} and {values.shape}")
    return returns - values


def training_targets(episodes: Sequence[tuple[Sequence[float], Sequence[float]]],
                     cfg: RewardConfig) -> list[np.ndarray]:
    """Combined, normalized returns of a batch of episodes.

    Each objective is z-scored over the whole batch: either the discounted returns, or the
    immediate rewards before discounting, depending on `cfg.normalize`.

    Args:
        episodes: Per episode, the makespan and emission rewards of its steps.
        cfg: The reward settings.

    Returns:
        The combined returns, one array per episode.
    """
    lengths = [len(r_ms) for r_ms, _ in episodes]
    splits = np.cumsum(lengths)[:-1]
    per_objective = []
    for which in (0, 1):
        if cfg.normalize is Normalization.RETURNS:
            pooled = np.concatenate([discounted_returns(ep[which], cfg.gamma) for ep in episodes])
            per_objective.append(np.split(zscore(pooled, cfg.zscore_eps), splits))
        else:
            flat = np.concatenate([np.asarray(ep[which], dtype=np.float64) for ep in episodes])
            pooled = zscore(flat, cfg.zscore_eps)
            per_objective.append([np.asarray(discounted_returns(list(r), cfg.gamma))
                                  for r in np.split(pooled, splits)])
    return [combine_rewards(ms, ce, cfg.lam) for ms, ce in zip(*per_objective)]
