# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

import dataclasses

from dataclasses import dataclass
from typing import Self

import numpy as np

from .dense import Params
from .functional import ShapeError


@dataclass(frozen=True, eq=False)
class OptState:
    """State of the Adam optimizer.

    Attributes:
        m: First-moment estimates, keyed like the parameters.
        v: Second-moment estimates, keyed like the parameters.
        step: Number of updates applied so far.
        lr: The learning rate. Defaults to 2e-4.
        beta1: Decay of the first moment. Defaults to 0.9.
        beta2: Decay of the second moment. Defaults to 0.999.
        eps: Denominator offset. Defaults to 1e-8.
    """
    m: Params
    v: Params
    step: int = 0
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if not self.lr > 0:
            raise ValueError("The learning rate must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Moment decays must lie in [0, 1)")

    @classmethod
    def zeros_like(cls, params: Params, **kwargs: float) -> Self:
        """A fresh optimizer state for a parameter set; keyword arguments set the hyperparameters."""
        zeros = {k: np.zeros_like(p) for k, p in params.items()}
        return cls(m=zeros, v=dict(zeros), **kwargs)

    def cloned_with(self, **kwargs: object) -> Self:
        return dataclasses.replace(self, **kwargs)


def adam_step(params: Params, grads: Params, opt: OptState) -> tuple[Params, OptState]:
    """Apply one bias-corrected Adam update.

    Neither the parameters nor the optimizer state are modified; new arrays are returned.

    Raises:
        ShapeError: If the gradients do not match the parameters.
    """
    if grads.keys() != params.keys():
        raise ShapeError(f"Gradient keys {sorted(grads)} do not match parameter keys {sorted(params)}")
    t = opt.step + 1
    correction1 = 1.0 - opt.beta1 ** t
    correction2 = 1.0 - opt.beta2 ** t
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"Gradient of {name} has shape {g.shape}, expected {p.shape}")
        m = opt.beta1 * opt.m[name] + (1.0 - opt.beta1) * g
        v = opt.beta2 * opt.v[name] + (1.0 - opt.beta2) * g * g
        new_params[name] = p - opt.lr * (m / correction1) / (np.sqrt(v / correction2) + opt.eps)
        new_m[name], new_v[name] = m, v
    return new_params, opt.cloned_with(m=new_m, v=new_v, step=t)
