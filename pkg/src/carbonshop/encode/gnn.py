# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Two-layer mean-aggregation message passing.

Each layer computes `H' = tanh(H @ ws + (A @ H) @ wn + E @ we + b)`, where `A` averages over the
neighbours of a node (precedence and eligibility edges alike) and `E` holds the mean eligibility
edge features of each node. The graph embedding `z_gnn` is the mean of the operation rows.
"""

from dataclasses import dataclass
from typing import Self

import numpy as np

from ..nn import Params, ShapeError
from .graph import EDGE_FEATURES, GraphSnapshot, NODE_FEATURES

GNN_HIDDEN = 8
GNN_LAYERS = 2


@dataclass(frozen=True, eq=False)
class GnnLayer:
    ws: np.ndarray
    wn: np.ndarray
    we: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        d_in, d_out = self.ws.shape
        if self.wn.shape != (d_in, d_out) or self.we.shape != (EDGE_FEATURES, d_out) or self.b.shape != (d_out,):
            raise ShapeError("Inconsistent message-passing layer shapes")


@dataclass(frozen=True, eq=False)
class GnnParams:
    """Weights of the message-passing layers.

    Attributes:
        layers: The layers, from the node features to the embedding.
    """
    layers: tuple[GnnLayer, ...]

    def __post_init__(self) -> None:
        if len(self.layers) != GNN_LAYERS:
            raise ShapeError(f"Expected {GNN_LAYERS} message-passing layers, got {len(self.layers)}")
        if self.layers[0].ws.shape[0] != NODE_FEATURES:
            raise ShapeError(f"First layer expects {NODE_FEATURES} node features")
        if self.layers[0].ws.shape[1] != self.layers[1].ws.shape[0]:
            raise ShapeError("Message-passing layers do not chain")

    @classmethod
    def create(cls, rng: np.random.Generator | int, hidden: int = GNN_HIDDEN) -> Self:
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        layers = []
        for d_in in (NODE_FEATURES, hidden):
            scale = 1.0 / np.sqrt(d_in)
            layers.append(GnnLayer(
                ws=rng.uniform(-scale, scale, size=(d_in, hidden)),
                wn=rng.uniform(-scale, scale, size=(d_in, hidden)),
                we=rng.uniform(-scale, scale, size=(EDGE_FEATURES, hidden)),
                b=np.zeros(hidden),
            ))
        return cls(tuple(layers))

    @property
    def dim(self) -> int:
        return self.layers[-1].ws.shape[1]

    def parameters(self) -> Params:
        params = {}
        for i, layer in enumerate(self.layers):
            params.update({f"l{i}.ws": layer.ws, f"l{i}.wn": layer.wn, f"l{i}.we": layer.we, f"l{i}.b": layer.b})
        return params

    def with_parameters(self, params: Params) -> Self:
        return type(self)(tuple(
            GnnLayer(params[f"l{i}.ws"], params[f"l{i}.wn"], params[f"l{i}.we"], params[f"l{i}.b"])
            for i in range(len(self.layers))
        ))


@dataclass(frozen=True, eq=False)
class GnnOutput:
    """Result of a forward pass, with what the backward pass needs.

    Attributes:
        node_embeddings: One row per operation.
        z_gnn: The mean of the operation rows.
        activations: The input of every layer followed by the final node matrix.
    """
    node_embeddings: np.ndarray
    z_gnn: np.ndarray
    activations: tuple[np.ndarray, ...]


def gnn_embed(g: GraphSnapshot, params: GnnParams) -> GnnOutput:
    h = g.node_features()
    if h.shape[1] != params.layers[0].ws.shape[0]:
        raise ShapeError(f"Node features have {h.shape[1]} columns, "
                         f"the first layer expects {params.layers[0].ws.shape[0]}")
    adjacency, edges = g.adjacency, g.edge_features
    activations = [h]
    for layer in params.layers:
        h = np.tanh(h @ layer.ws + (adjacency @ h) @ layer.wn + edges @ layer.we + layer.b)
        activations.append(h)
    node_embeddings = h[:g.n_ops]
    return GnnOutput(node_embeddings, node_embeddings.mean(axis=0), tuple(activations))


def gnn_backward(g: GraphSnapshot, params: GnnParams, out: GnnOutput,
                 d_node_embeddings: np.ndarray | None, d_z: np.ndarray | None) -> Params:
    """Gradients of the message-passing weights, given the gradients of both outputs.

    Args:
        g: The graph of the forward pass.
        params: The weights of the forward pass.
        out: The forward pass result.
        d_node_embeddings: Gradient with respect to the operation rows, or None for zero.
        d_z: Gradient with respect to `z_gnn`, or None for zero.

    Returns:
        The gradients, keyed like `params.parameters()`.
    """
    final = out.activations[-1]
    grad_h = np.zeros_like(final)
    n = g.n_ops
    if d_node_embeddings is not None:
        grad_h[:n] += d_node_embeddings
    if d_z is not None:
        grad_h[:n] += d_z / n
    adjacency, edges = g.adjacency, g.edge_features
    grads: Params = {}
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        h_in, h_out = out.activations[i], out.activations[i + 1]
        dpre = grad_h * (1.0 - h_out * h_out)
        aggregated = adjacency @ h_in
        grads[f"l{i}.ws"] = h_in.T @ dpre
        grads[f"l{i}.wn"] = aggregated.T @ dpre
        grads[f"l{i}.we"] = edges.T @ dpre
        grads[f"l{i}.b"] = dpre.sum(axis=0)
        grad_h = dpre @ layer.ws.T + adjacency.T @ (dpre @ layer.wn.T)
    return {k: grads[k] for k in params.parameters()}
