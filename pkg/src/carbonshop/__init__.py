# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Project: carbonshop

This package provides a set of tools for carbon-aware flexible job-shop scheduling (FJSP):
every operation can run on one of several eligible machines, each machine emits carbon at its
own rate, and a schedule is judged on both its makespan and its total emission.

The project is structured into the following modules:
- `.core`: Instance data model, synthetic generation, the FJSP text format with emission
    sidecars, and dataset splitting.
- `.sim`: The decision-step scheduling environment, episode runner, rollout records, and
    Gantt/CSV export.
- `.algo`: Baselines, namely classical dispatching rules and an exact branch-and-bound oracle.
- `.nn`: A small dense-network substrate with exact gradients, Adam, and checkpoints.
- `.encode`: State representations: graph message passing, text prompts with feedback hints,
    text encoders, and gated fusion.
- `.learn`: The dual-objective PPO policy and its training loop with validation rollback.
- `.bench`: Command-line interface and the experiment harness.

Using this library typically consists of three steps:
1. Generating or parsing instances with `.core`.
2. Scheduling them with a heuristic, the oracle, or a trained policy.
3. Comparing the results with the harness in `.bench`.
"""

from . import algo, bench, core, encode, learn, nn, sim

__all__ = ['algo', 'bench', 'core', 'encode', 'learn', 'nn', 'sim']
