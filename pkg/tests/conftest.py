# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Shared pytest fixtures and configuration for carbonshop tests."""

import pytest

from carbonshop.core import GenConfig, generate_instance, Instance


@pytest.fixture
def tiny_instance() -> Instance:
    """Two jobs of two operations on two machines, machine 0 twice as dirty as machine 1."""
    return Instance.build(
        "tiny",
        [
            [{0: 3.0, 1: 5.0}, {1: 2.0}],
            [{0: 4.0}, {0: 1.0, 1: 2.0}],
        ],
        emission_rates=[2.0, 1.0],
    )


@pytest.fixture
def prompt_instance() -> Instance:
    """A 2x5 instance whose first operation reads `machines=0:7.0|1:6.0|2:9.0|3:9.0|4:6.0`."""
    return Instance.build(
        "prompt",
        [
            [{0: 7.0, 1: 6.0, 2: 9.0, 3: 9.0, 4: 6.0}, {2: 4.0}, {0: 3.0, 3: 5.0}, {1: 2.0}, {4: 8.0}],
            [{1: 5.0, 2: 4.0}, {0: 6.0}],
        ],
        emission_rates=[1.0, 1.5, 2.0, 1.2, 1.8],
    )


@pytest.fixture
def small_instances() -> list[Instance]:
    """Twenty generated 3x2 instances, small enough for exact search."""
    cfg = GenConfig(n_jobs=3, n_machines=2, ops_per_job_range=(1, 2), flexibility=0.7, e_min=1.0, e_max=4.0)
    return [generate_instance(seed, cfg) for seed in range(20)]


@pytest.fixture
def medium_instance() -> Instance:
    """A generated 6x3 instance."""
    return generate_instance(11, GenConfig(n_jobs=6, n_machines=3, ops_per_job_range=(2, 3), flexibility=0.7))
