# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

from typing import Sequence, TypeVar

import numpy as np

T = TypeVar('T')


def split_dataset(instances: Sequence[T], fractions: tuple[float, float, float] = (0.8, 0.1, 0.1),
                  seed: int = 0) -> tuple[list[T], list[T], list[T]]:
    """Shuffle a dataset deterministically and split it into train, validation and test sets.

    The validation and test sizes are the rounded shares of the dataset; the training set takes the
    remainder so that the three sets are disjoint and together exhaustive.

    Args:
        instances: The items to split.
        fractions: The (train, validation, test) shares; they must sum to 1.
        seed: The shuffling seed.

    Returns:
        The three lists, in (train, validation, test) order.

    Raises:
        ValueError: If a share is negative or the shares do not sum to 1 (within 1e-9).
    """
    if len(fractions) != 3 or any(f < 0 for f in fractions):
        raise ValueError(f"Expected three non-negative fractions, got {fractions}.")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValueError(f"Fractions must sum to 1, got {sum(fractions)}.")
    n = len(instances)
    n_val = int(round(fractions[1] * n))
    n_test = min(int(round(fractions[2] * n)), n - n_val)
    n_train = n - n_val - n_test
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [instances[i] for i in order]
    return shuffled[:n_train], shuffled[n_train:n_train + n_val], shuffled[n_train + n_val:]


def derive_seeds(seed: int, count: int) -> list[int]:
    """Derive `count` independent, reproducible seeds from a base seed."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]
