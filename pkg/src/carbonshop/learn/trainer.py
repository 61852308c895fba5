# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
The training loop.

Each iteration rolls out the current policy on a batch of training instances, logs the impacts of
every scheduled operation, and updates the weights. The batch is resampled every `l_batch`
iterations and the prompt hints are refreshed every `n_l` iterations. Every `l_check` iterations
the greedy policy is validated on held-out instances; when the score is worse than at the start of
the interval, the weights and the optimizer state are reverted to that start.
"""

import csv
import io
import logging
import math

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from ..core import Instance
from ..core.fjsp import write_text_atomic
from ..encode import (build_state_prompt, encode_text, EncoderError, HashEncoder, ImpactStore, op_key, PromptOptions,
                      TextEncoder)
from ..nn import OptState
from ..sim import Episode, legal_actions, lower_bound_makespan, reset, Rollout, State
from .config import AblationMode, RewardConfig, TrainConfig
from .policy import policy_forward, PolicyParams, save_policy, step_inputs
from .ppo import LossReport, ppo_update, StepRecord, Trajectory
from .rewards import immediate_rewards

logger = logging.getLogger(__name__)

RUN_LOG_COLUMNS = ('iteration', 'mean_makespan', 'mean_emission', 'policy_loss', 'value_loss', 'entropy',
                   'gate_mean', 'rolled_back')


@dataclass(frozen=True)
class PolicyVariant:
    """How an ablation mode changes the model.

    Attributes:
        mode: The mode.
        gate_override: A fixed gate value, or None for the learned gate.
        lam: The emission weight of the reward.
        uses_text: Whether the prompt is encoded at all.
    """
    mode: AblationMode
    gate_override: Optional[float]
    lam: float
    uses_text: bool


def ablation_mode(cfg: TrainConfig) -> PolicyVariant:
    """Resolve the model variant of a configuration.

    `drl_c` keeps the graph view only (gate fixed to 0) with the dual-objective reward, `luca_m`
    keeps the full model with a makespan-only reward, `luca` is the full model.

    Raises:
        ValueError: If the mode is unknown.
    """
    match AblationMode(cfg.mode):
        case AblationMode.LUCA:
            return PolicyVariant(AblationMode.LUCA, None, cfg.reward.lam, True)
        case AblationMode.DRL_C:
            return PolicyVariant(AblationMode.DRL_C, 0.0, cfg.reward.lam, False)
        case AblationMode.LUCA_M:
            return PolicyVariant(AblationMode.LUCA_M, None, 0.0, True)
    raise ValueError(f"Unknown mode {cfg.mode}")


@dataclass
class PolicyRunner:
    """Runs a policy on instances.

    Attributes:
        params: The weights.
        encoder: The text encoder of the prompts.
        store: The impact store providing the hints.
        variant: The model variant.
        prompt_options: Prompt rendering options.
    """
    params: PolicyParams
    encoder: TextEncoder
    store: ImpactStore
    variant: PolicyVariant
    prompt_options: Optional[PromptOptions] = None

    def _z_llm(self, state: State) -> np.ndarray:
        if not self.variant.uses_text:
            return np.zeros(self.encoder.dim)
        kwargs = {} if self.prompt_options is None else {'options': self.prompt_options}
        return encode_text(build_state_prompt(state, self.store, **kwargs), self.encoder)

    def rollout(self, inst: Instance, rng: Optional[np.random.Generator] = None) -> Trajectory:
        """Schedule an instance; sample actions with `rng`, or act greedily without it.

        Raises:
            EncoderError: If the text encoder fails.
        """
        episode = Episode(inst)
        steps, impacts = [], []
        while not episode.is_finished():
            state = episode.state
            actions = legal_actions(state)
            inputs = step_inputs(state, actions, self._z_llm(state))
            fwd = policy_forward(self.params, inputs, self.variant.gate_override)
            if rng is None:
                index = int(np.argmax(fwd.logits))
            else:
                index = int(rng.choice(len(actions), p=fwd.probs / fwd.probs.sum()))
            action = actions[index]
            outcome = episode.advance(action)
            r_ms, r_ce = immediate_rewards(outcome)
            steps.append(StepRecord(inputs, index, float(fwd.log_probs[index]), fwd.value, r_ms, r_ce, fwd.fusion.g))
            impacts.append((action.job_id, action.op_index, outcome.delta_makespan_lb, outcome.delta_emission))
        rollout = episode.rollout()
        return Trajectory(inst.name, tuple(steps), rollout.makespan, rollout.emission, tuple(impacts))

    def greedy_rollout(self, inst: Instance, method: str = "policy") -> Rollout:
        episode = Episode(inst)
        while not episode.is_finished():
            state = episode.state
            actions = legal_actions(state)
            fwd = policy_forward(self.params, step_inputs(state, actions, self._z_llm(state)),
                                 self.variant.gate_override)
            episode.advance(actions[int(np.argmax(fwd.logits))])
        return episode.rollout(method)


@dataclass(frozen=True)
class ValidationResult:
    """Normalized validation score.

    Attributes:
        mean_r_ms: Minus the mean makespan, relative to each instance's initial makespan bound.
        mean_r_ce: Minus the mean emission, relative to each instance's minimum emission.
        aggregate: `(1 - lam) * mean_r_ms + lam * mean_r_ce`; higher is better.
    """
    mean_r_ms: float
    mean_r_ce: float
    aggregate: float


def aggregate_validation(makespans: Sequence[float], emissions: Sequence[float], lb0: Sequence[float],
                         min_emissions: Sequence[float], lam: float) -> ValidationResult:
    r_ms = -float(np.mean(np.asarray(makespans) / np.asarray(lb0)))
    r_ce = -float(np.mean(np.asarray(emissions) / np.asarray(min_emissions)))
    return ValidationResult(r_ms, r_ce, (1.0 - lam) * r_ms + lam * r_ce)


def validate(params: PolicyParams, val_instances: Sequence[Instance], reward_cfg: RewardConfig,
             runner: Optional[PolicyRunner] = None) -> ValidationResult:
    """Score the greedy policy on held-out instances, without side effects.

    Raises:
        ValueError: If there is no validation instance.
    """
    if not val_instances:
        raise ValueError("Validation needs at least one instance")
    if runner is None:
        variant = PolicyVariant(AblationMode.LUCA, None, reward_cfg.lam, True)
        runner = PolicyRunner(params, HashEncoder(), ImpactStore(), variant)
    else:
        runner = PolicyRunner(params, runner.encoder, runner.store, runner.variant, runner.prompt_options)
    rollouts = [runner.greedy_rollout(inst) for inst in val_instances]
    return aggregate_validation(
        [r.makespan for r in rollouts], [r.emission for r in rollouts],
        [lower_bound_makespan(reset(inst)) for inst in val_instances],
        [inst.min_emission() for inst in val_instances],
        reward_cfg.lam,
    )


@dataclass(frozen=True)
class IterationLog:
    iteration: int
    mean_makespan: float
    mean_emission: float
    policy_loss: float
    value_loss: float
    entropy: float
    gate_mean: float
    rolled_back: bool


@dataclass
class TrainResult:
    """Outcome of a training run.

    Attributes:
        params: The final weights.
        log: One entry per iteration.
        checkpoints: The checkpoint files written, in order.
        history: The weights at every interval start, in order.
        store: The impact store at the end of training.
        validations: The validation scores, keyed by iteration (0 is the initial policy).
    """
    params: PolicyParams
    log: list[IterationLog] = field(default_factory=list)
    checkpoints: list[Path] = field(default_factory=list)
    history: list[PolicyParams] = field(default_factory=list)
    store: ImpactStore = field(default_factory=ImpactStore)
    validations: dict[int, ValidationResult] = field(default_factory=dict)


type ValidationHook = Callable[[int, ValidationResult], ValidationResult]


def run_log_csv(log: Sequence[IterationLog]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(RUN_LOG_COLUMNS)
    for row in log:
        writer.writerow((row.iteration, repr(row.mean_makespan), repr(row.mean_emission), repr(row.policy_loss),
                         repr(row.value_loss), repr(row.entropy), repr(row.gate_mean), int(row.rolled_back)))
    return buffer.getvalue()


def _checkpoint_meta(cfg: TrainConfig, variant: PolicyVariant, iteration: int) -> dict[str, str]:
    return {'mode': variant.mode.value, 'lambda': repr(variant.lam), 'iteration': str(iteration), 'seed': str(cfg.seed)}


def train(cfg: TrainConfig, train_instances: Sequence[Instance], val_instances: Sequence[Instance],
          encoder: Optional[TextEncoder] = None, validation_hook: Optional[ValidationHook] = None,
          initial: Optional[PolicyParams] = None) -> TrainResult:
    """Train a policy.

    Args:
        cfg: The run configuration.
        train_instances: The instances batches are drawn from.
        val_instances: The held-out instances used to decide rollbacks.
        encoder: The text encoder. Defaults to the builtin hash encoder.
        validation_hook: Called with each validation score; its return value is used instead.
        initial: Initial weights. Defaults to seeded random weights.

    Returns:
        The trained weights and the run log.

    Raises:
        ValueError: If there is no training or validation instance.
        EncoderError: If the encoder fails and `cfg.encoder_fallback` is off.
        NonFiniteLossError: If an update produces a non-finite loss.
    """
    if not train_instances or not val_instances:
        raise ValueError("Training needs training and validation instances")
    variant = ablation_mode(cfg)
    reward_cfg = cfg.reward.cloned_with(lam=variant.lam)
    hyper = cfg.ppo
    rng = np.random.default_rng(cfg.seed)
    params = initial if initial is not None else PolicyParams.create(cfg.seed)
    opt = OptState.zeros_like(params.parameters(), lr=hyper.lr)
    store = ImpactStore(cfg.impact)
    runner = PolicyRunner(params, encoder or HashEncoder(), store, variant, cfg.prompt)
    ckpt_dir = Path(cfg.checkpoint_dir) if cfg.checkpoint_dir else None
    result = TrainResult(params, store=store)

    def score(iteration: int) -> ValidationResult:
        runner.params = params
        value = _with_fallback(lambda: validate(params, val_instances, reward_cfg, runner), runner, cfg)
        if validation_hook is not None:
            value = validation_hook(iteration, value)
        result.validations[iteration] = value
        return value

    interval_params, interval_opt = params, opt
    interval_score = score(0)
    result.history.append(params)
    batch: list[Instance] = []
    for iteration in range(1, hyper.iterations + 1):
        if (iteration - 1) % hyper.l_batch == 0:
            picks = rng.choice(len(train_instances), size=hyper.batch_size,
                               replace=hyper.batch_size > len(train_instances))
            batch = [train_instances[int(i)] for i in picks]
        seeds = rng.integers(0, 2**63 - 1, size=len(batch))
        runner.params = params
        trajs = [_with_fallback(lambda: runner.rollout(inst, np.random.default_rng(int(s))), runner, cfg)
                 for inst, s in zip(batch, seeds)]
        for traj in trajs:
            for j, k, d_ms, d_ce in traj.impacts:
                store.record_impact(op_key(traj.instance_name, j, k), d_ms, d_ce, iteration)
        params, opt, report = ppo_update(trajs, params, opt, hyper, reward_cfg, variant.gate_override)
        if store.is_refresh_due(iteration):
            store.refresh_hints()
            logger.debug(f"Refreshed hints at iteration {iteration}: tau_ms={store.tau_ms}, tau_ce={store.tau_ce}")

        rolled_back = False
        if iteration % hyper.l_check == 0:
            current = score(iteration)
            if current.aggregate < interval_score.aggregate:
                logger.warning(f"Validation degraded at iteration {iteration} "
                               f"({current.aggregate:.4f} < {interval_score.aggregate:.4f}), rolling back")
                params, opt = interval_params, interval_opt
                rolled_back = True
            else:
                interval_score = current
            interval_params, interval_opt = params, opt
            result.history.append(params)
            if ckpt_dir is not None:
                result.checkpoints.append(save_policy(ckpt_dir / f"policy-{iteration:05d}.ckpt", params,
                                                      _checkpoint_meta(cfg, variant, iteration)))

        entry = _log_entry(iteration, trajs, report, rolled_back)
        result.log.append(entry)
        logger.info(f"iter {iteration}: makespan={entry.mean_makespan:.2f} emission={entry.mean_emission:.2f} "
                    f"policy={entry.policy_loss:.4f} value={entry.value_loss:.4f} entropy={entry.entropy:.4f} "
                    f"gate={entry.gate_mean:.3f} rollback={rolled_back}")

    result.params = params
    if ckpt_dir is not None:
        result.checkpoints.append(save_policy(ckpt_dir / "policy-final.ckpt", params,
                                              _checkpoint_meta(cfg, variant, hyper.iterations)))
        write_text_atomic(ckpt_dir / "run-log.csv", run_log_csv(result.log))
    return result


def _with_fallback[T](call: Callable[[], T], runner: PolicyRunner, cfg: TrainConfig) -> T:
    try:
        return call()
    except EncoderError as e:
        if not cfg.encoder_fallback or isinstance(runner.encoder, HashEncoder):
            raise
        logger.warning(f"Text encoder {runner.encoder.name} failed ({e}), falling back to the builtin encoder")
        runner.encoder = HashEncoder()
        return call()


def _log_entry(iteration: int, trajs: Sequence[Trajectory], report: LossReport, rolled_back: bool) -> IterationLog:
    gates = [s.gate for t in trajs for s in t.steps]
    return IterationLog(
        iteration=iteration,
        mean_makespan=float(np.mean([t.makespan for t in trajs])),
        mean_emission=float(np.mean([t.emission for t in trajs])),
        policy_loss=report.policy_loss,
        value_loss=report.value_loss,
        entropy=report.entropy,
        gate_mean=float(np.mean(gates)) if gates else math.nan,
        rolled_back=rolled_back,
    )
