# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the actor-critic policy and the clipped policy optimization."""

import dataclasses
import math

from pathlib import Path

import numpy as np
import pytest

from carbonshop.core import Instance
from carbonshop.encode import HashEncoder, ImpactStore, TEXT_DIM
from carbonshop.learn import (AblationMode, load_policy, NonFiniteLossError, policy_forward, PolicyParams,
                              PolicyRunner, PolicyVariant, PpoHyper, ppo_loss, ppo_update, RewardConfig, save_policy,
                              score_actions, step_inputs, StepRecord, UpdateBatch)
from carbonshop.nn import OptState
from carbonshop.sim import Action, legal_actions, reset, step


@pytest.fixture(scope="module")
def params() -> PolicyParams:
    return PolicyParams.create(3)


def toy_steps(params: PolicyParams, inst: Instance, log_prob_offset: float = 0.05) -> list[StepRecord]:
    """Two decisions on an instance, each recorded as if taken by a slightly different policy."""
    rng = np.random.default_rng(0)
    state, steps = reset(inst), []
    for _ in range(2):
        actions = legal_actions(state)
        inputs = step_inputs(state, actions, rng.normal(size=TEXT_DIM))
        fwd = policy_forward(params, inputs)
        a = len(actions) - 1
        steps.append(StepRecord(inputs, a, float(fwd.log_probs[a]) - log_prob_offset, fwd.value, -1.0, -2.0,
                                fwd.fusion.g))
        state, _ = step(state, actions[a])
    return steps


class TestPolicy:
    """Test suite for action scoring."""

    def test_zero_weights_are_uniform(self, params: PolicyParams, tiny_instance: Instance) -> None:
        zero = params.with_parameters({k: np.zeros_like(v) for k, v in params.parameters().items()})
        state = reset(tiny_instance)
        fwd = policy_forward(zero, step_inputs(state, legal_actions(state), np.ones(TEXT_DIM)))
        assert np.allclose(fwd.probs, [1 / 3, 1 / 3, 1 / 3])
        assert fwd.value == 0.0

    def test_single_action(self, params: PolicyParams, tiny_instance: Instance) -> None:
        state = reset(tiny_instance)
        fwd = policy_forward(params, step_inputs(state, [Action(1, 0, 0)], np.zeros(TEXT_DIM)))
        assert list(fwd.probs) == [1.0]

    def test_probabilities(self, params: PolicyParams, medium_instance: Instance) -> None:
        state = reset(medium_instance)
        actions = legal_actions(state)
        fwd = policy_forward(params, step_inputs(state, actions, HashEncoder().encode("job")))
        assert fwd.probs.shape == (len(actions),)
        assert fwd.probs.sum() == pytest.approx(1.0)
        assert np.all(fwd.probs > 0)
        assert np.allclose(fwd.logits, score_actions(fwd.fusion.h, actions, fwd.gnn.node_embeddings, params.actor,
                                                     state))

    def test_graph_only_gate(self, params: PolicyParams, tiny_instance: Instance) -> None:
        """A zero gate makes the state embedding the graph embedding."""
        state = reset(tiny_instance)
        fwd = policy_forward(params, step_inputs(state, legal_actions(state), np.ones(TEXT_DIM)), gate_override=0.0)
        assert np.array_equal(fwd.fusion.h, fwd.gnn.z_gnn)

    def test_no_action(self, tiny_instance: Instance) -> None:
        with pytest.raises(ValueError):
            step_inputs(reset(tiny_instance), [], np.zeros(TEXT_DIM))

    def test_checkpoint_round_trip(self, params: PolicyParams, tmp_path: Path) -> None:
        path = save_policy(tmp_path / "policy.ckpt", params, {"mode": "luca"})
        loaded, meta = load_policy(path)
        assert meta["mode"] == "luca"
        for name, value in params.parameters().items():
            assert np.array_equal(loaded.parameters()[name], value)


class TestPpoLoss:
    """Test suite for the clipped objective."""

    def test_gradient_matches_finite_differences(self, params: PolicyParams, tiny_instance: Instance) -> None:
        """The analytic gradient of the total loss agrees with central differences on sampled weights."""
        steps = toy_steps(params, tiny_instance)
        batch = UpdateBatch(tuple(steps), np.array([0.7, -0.4]), np.array([0.9, -1.3]))
        hyper = PpoHyper(coef_entropy=0.05)
        _, grads = ppo_loss(params, batch, hyper)
        flat = params.parameters()
        rng = np.random.default_rng(1)
        h = 1e-6
        for name, value in flat.items():
            for _ in range(3):
                idx = tuple(int(rng.integers(n)) for n in value.shape)
                up, down = value.copy(), value.copy()
                up[idx] += h
                down[idx] -= h
                loss_up = ppo_loss(params.with_parameters({**flat, name: up}), batch, hyper, with_grads=False)[0]
                loss_down = ppo_loss(params.with_parameters({**flat, name: down}), batch, hyper, with_grads=False)[0]
                numeric = (loss_up.total - loss_down.total) / (2 * h)
                assert np.isclose(grads[name][idx], numeric, rtol=1e-4, atol=1e-8), (name, idx)

    def test_clipping(self, params: PolicyParams, tiny_instance: Instance) -> None:
        """A ratio of 1.5 with a positive advantage contributes the clipped term 1.2 A and no gradient."""
        steps = toy_steps(params, tiny_instance, log_prob_offset=math.log(1.5))[:1]
        batch = UpdateBatch(tuple(steps), np.array([1.0]), np.array([2.0]))
        hyper = PpoHyper(clip_ratio=0.2, coef_value=0.0, coef_entropy=0.0)
        report, grads = ppo_loss(params, batch, hyper)
        assert report.policy_loss == pytest.approx(-1.2 * 2.0)
        assert all(not g.any() for g in grads.values())

    def test_zero_advantage(self, params: PolicyParams, tiny_instance: Instance) -> None:
        """Matched values and zero advantages leave the entropy term only."""
        steps = toy_steps(params, tiny_instance, log_prob_offset=0.0)
        batch = UpdateBatch(tuple(steps), np.array([s.value for s in steps]), np.zeros(2))
        report, grads = ppo_loss(params, batch, PpoHyper(coef_entropy=0.0))
        assert report.policy_loss == 0.0
        assert report.value_loss == 0.0
        assert report.entropy > 0.0
        assert all(not g.any() for g in grads.values())
        with_entropy, _ = ppo_loss(params, batch, PpoHyper(coef_entropy=0.1), with_grads=False)
        assert with_entropy.total == pytest.approx(-0.1 * report.entropy)


class TestPpoUpdate:
    """Test suite for the optimizer step."""

    def runner(self, params: PolicyParams) -> PolicyRunner:
        return PolicyRunner(params, HashEncoder(), ImpactStore(), PolicyVariant(AblationMode.LUCA, None, 0.5, True))

    def test_update(self, params: PolicyParams, small_instances: list[Instance]) -> None:
        runner = self.runner(params)
        trajs = [runner.rollout(inst, np.random.default_rng(i)) for i, inst in enumerate(small_instances[:4])]
        before = {k: v.copy() for k, v in params.parameters().items()}
        opt = OptState.zeros_like(params.parameters(), lr=1e-3)
        new_params, new_opt, report = ppo_update(trajs, params, opt, PpoHyper(epochs_per_update=2), RewardConfig())
        assert new_opt.step == 2
        assert report.is_finite()
        assert all(np.array_equal(params.parameters()[k], v) for k, v in before.items())
        assert any(not np.array_equal(new_params.parameters()[k], v) for k, v in before.items())

    def test_empty_batch(self) -> None:
        with pytest.raises(ValueError):
            UpdateBatch.from_trajectories([], RewardConfig())

    def test_non_finite_loss(self, params: PolicyParams, tiny_instance: Instance) -> None:
        """A NaN reward aborts the update."""
        runner = self.runner(params)
        traj = runner.rollout(tiny_instance, np.random.default_rng(0))
        broken = dataclasses.replace(traj.steps[0], r_ms=math.nan)
        traj = dataclasses.replace(traj, steps=(broken, *traj.steps[1:]))
        opt = OptState.zeros_like(params.parameters())
        with pytest.raises(NonFiniteLossError):
            ppo_update([traj], params, opt, PpoHyper(), RewardConfig())
