# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Gated fusion of the text and graph embeddings.

The text embedding is first projected to the graph latent size: `p = proj_w @ z_llm + proj_b`. A
scalar gate `g = sigmoid(gate_w · [p ∥ z_gnn] + gate_b)` then mixes both views:
`h = g * p + (1 - g) * z_gnn`.
"""

from dataclasses import dataclass
from typing import Optional, Self

import numpy as np

from ..nn import Params, ShapeError, sigmoid
from .gnn import GNN_HIDDEN
from .text import TEXT_DIM


@dataclass(frozen=True, eq=False)
class FusionParams:
    """Projection and gate weights.

    Attributes:
        proj_w: Projection matrix, shape (latent, text).
        proj_b: Projection bias, shape (latent,).
        gate_w: Gate weights over the concatenation `[p ∥ z_gnn]`, shape (2 * latent,).
        gate_b: Gate bias, shape (1,).
    """
    proj_w: np.ndarray
    proj_b: np.ndarray
    gate_w: np.ndarray
    gate_b: np.ndarray

    def __post_init__(self) -> None:
        latent = self.proj_w.shape[0]
        if self.proj_b.shape != (latent,) or self.gate_w.shape != (2 * latent,) or self.gate_b.shape != (1,):
            raise ShapeError("Inconsistent fusion parameter shapes")

    @classmethod
    def create(cls, rng: np.random.Generator | int, text_dim: int = TEXT_DIM, latent: int = GNN_HIDDEN) -> Self:
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        scale = 1.0 / np.sqrt(text_dim)
        gate_scale = 1.0 / np.sqrt(2 * latent)
        return cls(
            proj_w=rng.uniform(-scale, scale, size=(latent, text_dim)),
            proj_b=np.zeros(latent),
            gate_w=rng.uniform(-gate_scale, gate_scale, size=2 * latent),
            gate_b=np.zeros(1),
        )

    def parameters(self) -> Params:
        return {'proj_w': self.proj_w, 'proj_b': self.proj_b, 'gate_w': self.gate_w, 'gate_b': self.gate_b}

    def with_parameters(self, params: Params) -> Self:
        return type(self)(params['proj_w'], params['proj_b'], params['gate_w'], params['gate_b'])


@dataclass(frozen=True, eq=False)
class FusionOutput:
    """Result of a fusion.

    Attributes:
        h: The fused state embedding.
        g: The gate value.
        projected: The projected text embedding `p`.
    """
    h: np.ndarray
    g: float
    projected: np.ndarray


def fuse(z_llm: np.ndarray, z_gnn: np.ndarray, params: FusionParams,
         gate_override: Optional[float] = None) -> FusionOutput:
    """Mix the projected text embedding with the graph embedding.

    Args:
        z_llm: The text embedding.
        z_gnn: The graph embedding.
        params: The fusion weights.
        gate_override: A fixed gate value replacing the learned one (0 keeps the graph view only).

    Raises:
        ShapeError: If the embedding sizes do not match the weights.
    """
    if z_llm.shape != (params.proj_w.shape[1],) or z_gnn.shape != (params.proj_w.shape[0],):
        raise ShapeError(f"Fusion expects embeddings of sizes {params.proj_w.shape[1]} and {params.proj_w.shape[0]}")
    projected = params.proj_w @ z_llm + params.proj_b
    if gate_override is None:
        g = float(sigmoid(params.gate_w @ np.concatenate([projected, z_gnn]) + params.gate_b[0]))
    else:
        g = float(gate_override)
    return FusionOutput(g * projected + (1.0 - g) * z_gnn, g, projected)


def fuse_backward(z_llm: np.ndarray, z_gnn: np.ndarray, params: FusionParams, out: FusionOutput,
                  d_h: np.ndarray, d_g: float = 0.0, gate_fixed: bool = False) -> tuple[Params, np.ndarray]:
    """Gradients of the fusion weights and of `z_gnn`.

    Args:
        z_llm: The text embedding of the forward pass.
        z_gnn: The graph embedding of the forward pass.
        params: The fusion weights.
        out: The forward pass result.
        d_h: Gradient with respect to `h`.
        d_g: Gradient with respect to the gate value, on top of what flows through `h`.
        gate_fixed: Whether the forward pass used a gate override; no gradient then reaches the gate.

    Returns:
        The weight gradients, keyed like `params.parameters()`, and the gradient with respect to `z_gnn`.
    """
    g, projected = out.g, out.projected
    latent = projected.shape[0]
    d_projected = g * d_h
    d_z_gnn = (1.0 - g) * d_h
    d_gate_w, d_gate_b = np.zeros_like(params.gate_w), np.zeros(1)
    if not gate_fixed:
        d_pre = (float(d_h @ (projected - z_gnn)) + d_g) * g * (1.0 - g)
        d_gate_w = d_pre * np.concatenate([projected, z_gnn])
        d_gate_b = np.array([d_pre])
        d_projected = d_projected + d_pre * params.gate_w[:latent]
        d_z_gnn = d_z_gnn + d_pre * params.gate_w[latent:]
    grads = {
        'proj_w': np.outer(d_projected, z_llm),
        'proj_b': d_projected,
        'gate_w': d_gate_w,
        'gate_b': d_gate_b,
    }
    return grads, d_z_gnn
