# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Clipped-objective policy optimization.

The loss over all steps of a batch is

    coef_policy * -mean(min(r * A, clip(r, 1 - eps, 1 + eps) * A))
    + coef_value * mean((V - R)^2)
    - coef_entropy * mean(entropy)

where `r` is the probability ratio of the taken action against the policy that collected it.
"""

import logging

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..nn import adam_step, OptState, Params
from .config import PpoHyper, RewardConfig
from .policy import policy_backward, policy_forward, PolicyParams, StepInputs
from .rewards import advantages, training_targets

logger = logging.getLogger(__name__)


class NonFiniteLossError(FloatingPointError):
    """Raised when a loss or gradient is NaN or infinite; the update is abandoned."""


@dataclass(frozen=True, eq=False)
class StepRecord:
    """One decision of a collected episode.

    Attributes:
        inputs: What the policy saw.
        action_index: The index of the taken action in `inputs.actions`.
        log_prob: Log-probability of the taken action under the collecting policy.
        value: Value estimate of the collecting critic.
        r_ms: Immediate makespan reward.
        r_ce: Immediate emission reward.
        gate: Gate value of the fusion.
    """
    inputs: StepInputs
    action_index: int
    log_prob: float
    value: float
    r_ms: float
    r_ce: float
    gate: float


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A collected episode.

    Attributes:
        instance_name: The scheduled instance.
        steps: The decisions, in order.
        makespan: Final makespan.
        emission: Final total emission.
        impacts: Per step, the `(job, op, makespan impact, emission impact)` to log.
    """
    instance_name: str
    steps: tuple[StepRecord, ...]
    makespan: float
    emission: float
    impacts: tuple[tuple[int, int, float, float], ...] = field(default=())


@dataclass(frozen=True)
class LossReport:
    policy_loss: float
    value_loss: float
    entropy: float
    total: float

    def is_finite(self) -> bool:
        return bool(np.isfinite([self.policy_loss, self.value_loss, self.entropy, self.total]).all())


@dataclass(frozen=True, eq=False)
class UpdateBatch:
    """Flattened steps of a batch with their training targets.

    Attributes:
        steps: All steps of all trajectories.
        returns: The combined normalized returns `R`.
        advantages: `R - V` with the collecting critic's values.
    """
    steps: tuple[StepRecord, ...]
    returns: np.ndarray
    advantages: np.ndarray

    @classmethod
    def from_trajectories(cls, trajs: Sequence[Trajectory], reward_cfg: RewardConfig) -> 'UpdateBatch':
        """Compute returns and advantages for a batch.

        Raises:
            ValueError: If there is no step to learn from.
        """
        trajs = [t for t in trajs if t.steps]
        if not trajs:
            raise ValueError("The update needs at least one complete trajectory")
        targets = training_targets([([s.r_ms for s in t.steps], [s.r_ce for s in t.steps]) for t in trajs], reward_cfg)
        steps = tuple(s for t in trajs for s in t.steps)
        returns = np.concatenate(targets)
        values = np.array([s.value for s in steps])
        return cls(steps, returns, advantages(returns, values))


def ppo_loss(params: PolicyParams, batch: UpdateBatch, hyper: PpoHyper, gate_override: Optional[float] = None,
             with_grads: bool = True) -> tuple[LossReport, Optional[Params]]:
    """Evaluate the loss of a batch and, optionally, its gradient with respect to all weights."""
    n = len(batch.steps)
    eps = hyper.clip_ratio
    policy_sum = value_sum = entropy_sum = 0.0
    grads: Optional[Params] = None
    for step, ret, adv in zip(batch.steps, batch.returns, batch.advantages):
        fwd = policy_forward(params, step.inputs, gate_override)
        log_probs = fwd.log_probs
        probs = np.exp(log_probs)
        a = step.action_index
        ratio = float(np.exp(log_probs[a] - step.log_prob))
        unclipped = ratio * adv
        clipped = float(np.clip(ratio, 1.0 - eps, 1.0 + eps)) * adv
        policy_sum += -min(unclipped, clipped)
        entropy = float(-(probs * log_probs).sum())
        entropy_sum += entropy
        value_sum += (fwd.value - ret) ** 2
        if not with_grads:
            continue
        d_log_prob = -hyper.coef_policy * adv * ratio / n if unclipped <= clipped else 0.0
        d_logits = d_log_prob * (np.eye(len(probs))[a] - probs)
        d_logits = d_logits + hyper.coef_entropy * probs * (log_probs + entropy) / n
        d_value = hyper.coef_value * 2.0 * (fwd.value - ret) / n
        step_grads = policy_backward(params, step.inputs, fwd, d_logits, d_value, gate_override)
        if grads is None:
            grads = step_grads
        else:
            grads = {k: grads[k] + v for k, v in step_grads.items()}
    policy_loss, value_loss, entropy = policy_sum / n, value_sum / n, entropy_sum / n
    total = hyper.coef_policy * policy_loss + hyper.coef_value * value_loss - hyper.coef_entropy * entropy
    return LossReport(policy_loss, value_loss, entropy, total), grads


def ppo_update(trajs: Sequence[Trajectory], params: PolicyParams, opt: OptState, hyper: PpoHyper,
               reward_cfg: RewardConfig,
               gate_override: Optional[float] = None) -> tuple[PolicyParams, OptState, LossReport]:
    """Run `hyper.epochs_per_update` full-batch Adam steps on the loss of a batch.

    Returns:
        The updated weights, the optimizer state and the loss of the first epoch.

    Raises:
        ValueError: If there is no step to learn from.
        NonFiniteLossError: If a loss or a gradient is not finite. Nothing is updated then.
    """
    batch = UpdateBatch.from_trajectories(trajs, reward_cfg)
    flat = params.parameters()
    first: Optional[LossReport] = None
    for epoch in range(hyper.epochs_per_update):
        report, grads = ppo_loss(params.with_parameters(flat), batch, hyper, gate_override)
        if not report.is_finite() or not all(np.isfinite(g).all() for g in grads.values()):
            raise NonFiniteLossError(f"Non-finite loss at epoch {epoch}: {report}")
        first = first or report
        flat, opt = adam_step(flat, grads, opt)
    logger.debug(f"PPO update on {len(batch.steps)} steps: {first}")
    return params.with_parameters(flat), opt, first
