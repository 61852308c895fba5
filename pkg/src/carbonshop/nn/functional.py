# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Element-wise activations, their derivatives, and the masked softmax."""

from enum import StrEnum

import numpy as np


class ShapeError(ValueError):
    """Raised when arrays have inconsistent dimensions."""


class Activation(StrEnum):
    TANH = 'tanh'
    RELU = 'relu'
    SIGMOID = 'sigmoid'
    IDENTITY = 'identity'


def sigmoid(x: np.ndarray | float) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    # Split by sign so that exp never overflows.
    return np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))), np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))


def activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    match kind:
        case Activation.TANH:
            return np.tanh(z)
        case Activation.RELU:
            return np.maximum(z, 0.0)
        case Activation.SIGMOID:
            return sigmoid(z)
        case Activation.IDENTITY:
            return z
    raise ValueError(f"Unknown activation {kind}")


def activation_grad(kind: Activation, z: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Derivative of an activation at pre-activation `z`, given its output `y`."""
    match kind:
        case Activation.TANH:
            return 1.0 - y * y
        case Activation.RELU:
            return (z > 0).astype(np.float64)
        case Activation.SIGMOID:
            return y * (1.0 - y)
        case Activation.IDENTITY:
            return np.ones_like(z)
    raise ValueError(f"Unknown activation {kind}")


def softmax(logits: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
    """Masked softmax of a logit vector.

    Masked-out entries get probability exactly 0. The largest unmasked logit is subtracted before
    exponentiation, so large logits do not overflow.

    Args:
        logits: The logit vector.
        mask: True for the entries to keep. Defaults to all entries.

    Returns:
        The probability vector.

    Raises:
        ValueError: If every entry is masked out.
        ShapeError: If the mask and the logits differ in shape.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if mask is None:
        mask = np.ones(logits.shape, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != logits.shape:
        raise ShapeError(f"Mask shape {mask.shape} does not match logits shape {logits.shape}")
    if not mask.any():
        raise ValueError("softmax needs at least one unmasked entry")
    shifted = np.where(mask, logits - logits[mask].max(), -np.inf)
    weights = np.where(mask, np.exp(shifted), 0.0)
    return weights / weights.sum()


def log_softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())
