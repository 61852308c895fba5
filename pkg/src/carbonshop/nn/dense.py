# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Dense feed-forward networks with exact reverse-mode gradients.

Parameters are treated as immutable: an update builds new arrays and a new network, and never
writes into existing ones. Holding a reference to a network is therefore enough to keep a snapshot.
"""

from dataclasses import dataclass
from typing import Self, Sequence

import numpy as np

from .functional import activate, Activation, activation_grad, ShapeError

type Params = dict[str, np.ndarray]


@dataclass(frozen=True, eq=False)
class Layer:
    """An affine map followed by an activation: `y = act(x @ weight.T + bias)`.

    Attributes:
        weight: The weight matrix, of shape (out, in).
        bias: The bias vector, of shape (out,).
        activation: The element-wise activation.
    """
    weight: np.ndarray
    bias: np.ndarray
    activation: Activation = Activation.IDENTITY

    def __post_init__(self) -> None:
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[0],):
            raise ShapeError(f"Layer weight {self.weight.shape} and bias {self.bias.shape} do not match")
        object.__setattr__(self, 'activation', Activation(self.activation))

    @property
    def n_in(self) -> int:
        return self.weight.shape[1]

    @property
    def n_out(self) -> int:
        return self.weight.shape[0]


def init_layer(rng: np.random.Generator, n_in: int, n_out: int,
               activation: Activation = Activation.IDENTITY) -> Layer:
    """A layer with weights and biases uniform in `[-1/sqrt(n_in), 1/sqrt(n_in)]`."""
    scale = 1.0 / np.sqrt(n_in)
    return Layer(rng.uniform(-scale, scale, size=(n_out, n_in)), rng.uniform(-scale, scale, size=n_out), activation)


@dataclass(frozen=True, eq=False)
class DenseNet:
    """A chain of dense layers.

    Attributes:
        layers: The layers, from input to output.
    """
    layers: tuple[Layer, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ShapeError("A network needs at least one layer")
        for a, b in zip(self.layers, self.layers[1:]):
            if a.n_out != b.n_in:
                raise ShapeError(f"Layer output {a.n_out} does not chain into layer input {b.n_in}")

    @classmethod
    def create(cls, sizes: Sequence[int], activations: Sequence[Activation | str],
               rng: np.random.Generator | int) -> Self:
        """Create a seeded network.

        Args:
            sizes: Input size followed by every layer's output size.
            activations: One activation per layer.
            rng: A generator or a seed.
        """
        if len(activations) != len(sizes) - 1:
            raise ShapeError(f"Expected {len(sizes) - 1} activations, got {len(activations)}")
        rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
        return cls(tuple(init_layer(rng, n_in, n_out, Activation(act))
                         for n_in, n_out, act in zip(sizes, sizes[1:], activations)))

    @property
    def n_in(self) -> int:
        return self.layers[0].n_in

    @property
    def n_out(self) -> int:
        return self.layers[-1].n_out

    def parameters(self) -> Params:
        params = {}
        for i, layer in enumerate(self.layers):
            params[f"layer{i}.w"] = layer.weight
            params[f"layer{i}.b"] = layer.bias
        return params

    def with_parameters(self, params: Params) -> Self:
        """Return a network of the same architecture holding the given parameters.

        Raises:
            ShapeError: If a parameter is missing or has the wrong shape.
        """
        layers = []
        for i, layer in enumerate(self.layers):
            w, b = params[f"layer{i}.w"], params[f"layer{i}.b"]
            if w.shape != layer.weight.shape or b.shape != layer.bias.shape:
                raise ShapeError(f"Parameters of layer {i} have shapes {w.shape}, {b.shape}")
            layers.append(Layer(w, b, layer.activation))
        return type(self)(tuple(layers))

    def zeroed(self) -> Self:
        return self.with_parameters({k: np.zeros_like(v) for k, v in self.parameters().items()})


def _as_batch(net: DenseNet, x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != net.n_in:
        raise ShapeError(f"Network expects inputs of size {net.n_in}, got shape {x.shape}")
    return batch, single


def forward(net: DenseNet, x: np.ndarray) -> np.ndarray:
    """Evaluate a network on one input vector or on a batch (one input per row)."""
    y, single = _as_batch(net, x)
    for layer in net.layers:
        y = activate(layer.activation, y @ layer.weight.T + layer.bias)
    return y[0] if single else y


def backward(net: DenseNet, x: np.ndarray, upstream: np.ndarray) -> tuple[Params, np.ndarray]:
    """Back-propagate an output gradient through a network.

    For a batch, parameter gradients are summed over the rows.

    Args:
        net: The network.
        x: The input (vector or batch) of the forward pass.
        upstream: The gradient of the loss with respect to the output, shaped like the output.

    Returns:
        The parameter gradients, keyed like `net.parameters()`, and the gradient with respect to `x`.

    Raises:
        ShapeError: If the upstream gradient does not match the output shape.
    """
    a, single = _as_batch(net, x)
    inputs, pre, outs = [], [], []
    for layer in net.layers:
        z = a @ layer.weight.T + layer.bias
        inputs.append(a)
        pre.append(z)
        a = activate(layer.activation, z)
        outs.append(a)
    g = np.asarray(upstream, dtype=np.float64)
    g = g[None, :] if single and g.ndim == 1 else g
    if g.shape != a.shape:
        raise ShapeError(f"Upstream gradient shape {np.shape(upstream)} does not match output shape {a.shape}")
    grads: Params = {}
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        dz = g * activation_grad(layer.activation, pre[i], outs[i])
        grads[f"layer{i}.w"] = dz.T @ inputs[i]
        grads[f"layer{i}.b"] = dz.sum(axis=0)
        g = dz @ layer.weight
    return {k: grads[k] for k in net.parameters()}, (g[0] if single else g)
