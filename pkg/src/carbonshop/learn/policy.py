# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
The actor-critic policy over (operation, machine) actions.

For a state, the graph network yields operation embeddings and `z_gnn`, the prompt encoder yields
`z_llm`, and the gated fusion yields the state embedding `h`. Each legal action is scored by the
actor from `h`, the embedding of its operation and four features of its machine (processing time,
emission rate, energy and free-at time, all normalized). The critic estimates the state value from
`h` alone.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Self, Sequence

import numpy as np

from ..encode import (build_graph, fuse, fuse_backward, FusionOutput, FusionParams, gnn_backward, gnn_embed, GNN_HIDDEN,
                      GnnOutput, GnnParams, GraphSnapshot)
from ..nn import (Activation, backward, DenseNet, forward, load_checkpoint, log_softmax, Params, save_checkpoint,
                  ShapeError)
from ..sim import Action, State

ACTION_FEATURES = 4
ACTOR_INPUT = 2 * GNN_HIDDEN + ACTION_FEATURES
HIDDEN = 128
HEAD = 64

_PARTS = ('gnn', 'fusion', 'actor', 'critic')


@dataclass(frozen=True, eq=False)
class PolicyParams:
    """All learned weights.

    Attributes:
        gnn: The message-passing layers.
        fusion: The text projection and the gate.
        actor: Scores one action from `h ∥ operation embedding ∥ machine features`.
        critic: Estimates the state value from `h`.
    """
    gnn: GnnParams
    fusion: FusionParams
    actor: DenseNet
    critic: DenseNet

    def __post_init__(self) -> None:
        if self.actor.n_in != ACTOR_INPUT or self.actor.n_out != 1:
            raise ShapeError(f"The actor must map {ACTOR_INPUT} inputs to one score")
        if self.critic.n_in != GNN_HIDDEN or self.critic.n_out != 1:
            raise ShapeError(f"The critic must map {GNN_HIDDEN} inputs to one value")

    @classmethod
    def create(cls, seed: int) -> Self:
        """Seeded initial weights."""
        rng = np.random.default_rng(seed)
        acts = (Activation.TANH, Activation.TANH, Activation.IDENTITY)
        return cls(
            gnn=GnnParams.create(rng),
            fusion=FusionParams.create(rng),
            actor=DenseNet.create((ACTOR_INPUT, HIDDEN, HEAD, 1), acts, rng),
            critic=DenseNet.create((GNN_HIDDEN, HIDDEN, HEAD, 1), acts, rng),
        )

    def parameters(self) -> Params:
        """All weights in one flat mapping, keyed `<part>.<name>`."""
        flat = {}
        for part in _PARTS:
            for name, value in getattr(self, part).parameters().items():
                flat[f"{part}.{name}"] = value
        return flat

    def with_parameters(self, params: Params) -> Self:
        parts = {}
        for part in _PARTS:
            prefix = f"{part}."
            parts[part] = getattr(self, part).with_parameters(
                {k[len(prefix):]: v for k, v in params.items() if k.startswith(prefix)})
        return type(self)(**parts)


@dataclass(frozen=True, eq=False)
class StepInputs:
    """What the policy sees of a state.

    Attributes:
        snapshot: The graph view.
        z_llm: The text embedding of the prompt.
        actions: The legal actions, in canonical order.
        op_rows: For every action, the flat index of its operation.
        machine_features: For every action, the four normalized machine features.
    """
    snapshot: GraphSnapshot
    z_llm: np.ndarray
    actions: tuple[Action, ...]
    op_rows: np.ndarray
    machine_features: np.ndarray


@dataclass(frozen=True, eq=False)
class StepForward:
    gnn: GnnOutput
    fusion: FusionOutput
    actor_inputs: np.ndarray
    logits: np.ndarray
    log_probs: np.ndarray
    value: float

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)


def action_features(state: State, actions: Sequence[Action]) -> np.ndarray:
    """Normalized processing time, emission rate, energy and machine free-at time of each action."""
    inst = state.instance
    rates = inst.emission_rates
    features = np.empty((len(actions), ACTION_FEATURES))
    for i, a in enumerate(actions):
        p = inst.jobs[a.job_id][a.op_index].time_on(a.machine_id)
        e = rates[a.machine_id]
        features[i] = (p / inst.max_time, e / inst.max_rate, p * e / inst.max_energy,
                       state.machine_free_at[a.machine_id] / inst.horizon)
    return features


def step_inputs(state: State, actions: Sequence[Action], z_llm: np.ndarray) -> StepInputs:
    if not actions:
        raise ValueError("The policy needs at least one action")
    inst = state.instance
    op_rows = np.array([inst.flat_index(a.job_id, a.op_index) for a in actions], dtype=np.int64)
    return StepInputs(build_graph(state), np.asarray(z_llm, dtype=np.float64), tuple(actions), op_rows,
                      action_features(state, actions))


def score_actions(h: np.ndarray, actions: Sequence[Action], node_embeddings: np.ndarray, actor: DenseNet,
                  state: State) -> np.ndarray:
    """One logit per action, from `h`, the operation embeddings and the machine features.

    Raises:
        ValueError: If there is no action.
    """
    if not actions:
        raise ValueError("Cannot score an empty action set")
    inst = state.instance
    rows = [inst.flat_index(a.job_id, a.op_index) for a in actions]
    inputs = np.hstack([np.tile(h, (len(actions), 1)), node_embeddings[rows], action_features(state, actions)])
    return forward(actor, inputs)[:, 0]


def policy_forward(params: PolicyParams, inputs: StepInputs, gate_override: Optional[float] = None) -> StepForward:
    gnn_out = gnn_embed(inputs.snapshot, params.gnn)
    fusion_out = fuse(inputs.z_llm, gnn_out.z_gnn, params.fusion, gate_override)
    n = len(inputs.actions)
    actor_inputs = np.hstack([np.tile(fusion_out.h, (n, 1)), gnn_out.node_embeddings[inputs.op_rows],
                              inputs.machine_features])
    logits = forward(params.actor, actor_inputs)[:, 0]
    value = float(forward(params.critic, fusion_out.h)[0])
    return StepForward(gnn_out, fusion_out, actor_inputs, logits, log_softmax(logits), value)


def policy_backward(params: PolicyParams, inputs: StepInputs, fwd: StepForward, d_logits: np.ndarray,
                    d_value: float, gate_override: Optional[float] = None) -> Params:
    """Gradients of all weights, given the gradients of the logits and of the value of one step."""
    actor_grads, d_actor_inputs = backward(params.actor, fwd.actor_inputs, d_logits[:, None])
    critic_grads, d_h_critic = backward(params.critic, fwd.fusion.h, np.array([d_value]))
    d_h = d_actor_inputs[:, :GNN_HIDDEN].sum(axis=0) + d_h_critic
    d_nodes = np.zeros_like(fwd.gnn.node_embeddings)
    np.add.at(d_nodes, inputs.op_rows, d_actor_inputs[:, GNN_HIDDEN:2 * GNN_HIDDEN])
    fusion_grads, d_z_gnn = fuse_backward(inputs.z_llm, fwd.gnn.z_gnn, params.fusion, fwd.fusion, d_h,
                                          gate_fixed=gate_override is not None)
    gnn_grads = gnn_backward(inputs.snapshot, params.gnn, fwd.gnn, d_nodes, d_z_gnn)
    grads = {}
    for part, part_grads in (('gnn', gnn_grads), ('fusion', fusion_grads), ('actor', actor_grads),
                             ('critic', critic_grads)):
        grads.update({f"{part}.{k}": v for k, v in part_grads.items()})
    return grads


def save_policy(path: Path, params: PolicyParams, meta: Optional[dict[str, str]] = None) -> Path:
    return save_checkpoint(path, params.parameters(), meta)


def load_policy(path: Path) -> tuple[PolicyParams, dict[str, str]]:
    """Read policy weights written by `save_policy`, with their metadata.

    Raises:
        FileNotFoundError: If the checkpoint does not exist.
        ShapeError: If the checkpoint does not hold a policy of the expected architecture.
    """
    template = PolicyParams.create(0)
    params, meta = load_checkpoint(path, template.parameters())
    return template.with_parameters(params), meta
