# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the non-learning schedulers of the carbonshop library: the classical
dispatching rules used as baselines, and an exact branch-and-bound solver for small instances.

The components are defined in multiple files, and the main ones are re-exported here:
- `.heuristics`:
    - `.heuristics.Rule`: FIFO, SPT, MOR, MWKR or a seeded random rule.
    - `.heuristics.dispatch`: The action a rule takes in a state.
    - `.heuristics.rollout_heuristic`: A complete schedule built by a rule.
    - `.heuristics.random_policy_rollout`: Makespan and emission of a seeded random schedule.
- `.oracle`:
    - `.oracle.Objective`, `.oracle.SearchLimits`: What to minimize, and the search budget.
    - `.oracle.solve_exact`: Depth-first branch and bound.
    - `.oracle.solve_exhaustive`: Enumeration of all decision sequences, for cross-checking.
    - `.oracle.verify_schedule`: Validity check of a schedule.

For instance:
```python
from carbonshop.algo import Objective, solve_exact, verify_schedule
from carbonshop.core import GenConfig, generate_instance

inst = generate_instance(seed=3, cfg=GenConfig(n_jobs=3, n_machines=2, ops_per_job_range=(2, 2)))
result = solve_exact(inst, Objective(lam=0.5))
assert verify_schedule(inst, result.entries).passed
```
"""

# re-exports
from .heuristics import DETERMINISTIC_RULES as DETERMINISTIC_RULES
from .heuristics import dispatch as dispatch
from .heuristics import earliest_finish_machine as earliest_finish_machine
from .heuristics import random_policy_rollout as random_policy_rollout
from .heuristics import rollout_heuristic as rollout_heuristic
from .heuristics import Rule as Rule
from .heuristics import RuleKind as RuleKind
from .oracle import DEFAULT_MAX_OPS as DEFAULT_MAX_OPS
from .oracle import Diagnostics as Diagnostics
from .oracle import InstanceTooLargeError as InstanceTooLargeError
from .oracle import Objective as Objective
from .oracle import OracleResult as OracleResult
from .oracle import SearchLimits as SearchLimits
from .oracle import solve_exact as solve_exact
from .oracle import solve_exhaustive as solve_exhaustive
from .oracle import verify_schedule as verify_schedule
