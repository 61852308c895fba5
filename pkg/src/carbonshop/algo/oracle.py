# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Exact solver for small instances.

The solver searches depth-first over the same decision sequences as the environment and prunes a
partial schedule as soon as an admissible bound on its scalarized value cannot beat the incumbent.
The incumbent starts from the MWKR rule's schedule.
"""

import logging
import math
import time

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..core import Instance
from ..sim import legal_actions, lower_bound_makespan, makespan, reset, Rollout, ScheduleEntry, State, step
from .heuristics import rollout_heuristic, Rule, RuleKind

logger = logging.getLogger(__name__)

DEFAULT_MAX_OPS = 12


class InstanceTooLargeError(ValueError):
    """Raised when an instance has more operations than the oracle accepts."""


@dataclass(frozen=True)
class Objective:
    """Scalarization of the two objectives: `(1 - lam) * makespan + lam * emission`.

    Attributes:
        lam: The weight of emission, in [0, 1]. 0 is pure makespan, 1 is pure emission.
    """
    lam: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"Objective weight must be in [0, 1], got {self.lam}")

    def value(self, makespan_value: float, emission_value: float) -> float:
        return (1.0 - self.lam) * makespan_value + self.lam * emission_value


@dataclass(frozen=True)
class SearchLimits:
    """Budget of a search.

    Attributes:
        max_nodes: Maximum number of expanded search nodes.
        max_seconds: Maximum wall-clock duration.
    """
    max_nodes: int = 5_000_000
    max_seconds: float = 60.0

    def __post_init__(self) -> None:
        if self.max_nodes <= 0:
            raise ValueError("max_nodes must be positive")
        if not self.max_seconds > 0:
            raise ValueError("max_seconds must be positive")


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exact search.

    Attributes:
        value: The best scalarized value found.
        rollout: The best schedule found.
        proven_optimal: False if the search stopped on a limit before exhausting the tree.
        nodes: The number of expanded nodes.
    """
    value: float
    rollout: Rollout
    proven_optimal: bool
    nodes: int

    @property
    def entries(self) -> tuple[ScheduleEntry, ...]:
        return self.rollout.entries


class _LimitReached(Exception):
    pass


def _check_size(inst: Instance, max_ops: int) -> None:
    if inst.n_ops > max_ops:
        raise InstanceTooLargeError(
            f"Instance {inst.name} has {inst.n_ops} operations, the oracle accepts at most {max_ops}")


def _remaining_min_emission(inst: Instance) -> tuple[tuple[float, ...], ...]:
    """Per job, suffix sums of the smallest `p·e` of each operation."""
    rates = inst.emission_rates
    result = []
    for ops in inst.jobs:
        suffix = [0.0] * (len(ops) + 1)
        for k in range(len(ops) - 1, -1, -1):
            suffix[k] = min(p * rates[m] for m, p in ops[k].alternatives) + suffix[k + 1]
        result.append(tuple(suffix))
    return tuple(result)


@dataclass
class _Search:
    inst: Instance
    obj: Objective
    lim: SearchLimits
    min_energy: tuple[tuple[float, ...], ...]
    incumbent: float
    best: Optional[State] = None
    nodes: int = 0
    deadline: float = 0.0
    seen: set[tuple] = field(default_factory=set)

    def bound(self, state: State) -> float:
        remaining = math.fsum(self.min_energy[j][k] for j, k in enumerate(state.next_op))
        return self.obj.value(lower_bound_makespan(state), state.emission_so_far + remaining)

    def is_pruned(self, bound: float) -> bool:
        return bound >= self.incumbent + 1e-9 * (1.0 + abs(self.incumbent))

    def visit(self, state: State) -> None:
        self.nodes += 1
        if self.nodes > self.lim.max_nodes or (self.nodes % 1024 == 0 and time.monotonic() > self.deadline):
            raise _LimitReached()
        signature = (state.next_op, state.job_ready, state.machine_free_at, state.emission_so_far,
                     state.makespan_so_far)
        if signature in self.seen:
            return
        self.seen.add(signature)
        if state.is_terminal():
            value = self.obj.value(makespan(state), state.emission_so_far)
            if value < self.incumbent:
                self.incumbent = value
                self.best = state
            return
        children = []
        for action in legal_actions(state):
            child, _ = step(state, action)
            children.append((self.bound(child), child))
        children.sort(key=lambda pair: pair[0])
        for bound, child in children:
            if self.is_pruned(bound):
                break
            self.visit(child)


def solve_exact(inst: Instance, obj: Objective = Objective(), lim: SearchLimits = SearchLimits(),
                max_ops: int = DEFAULT_MAX_OPS) -> OracleResult:
    """Minimize the scalarized objective by depth-first branch and bound.

    Args:
        inst: The instance to solve.
        obj: The scalarization weight.
        lim: The search budget; when it runs out, the best schedule so far is returned.
        max_ops: The largest accepted number of operations.

    Returns:
        The best value and schedule, and whether optimality is proven.

    Raises:
        InstanceTooLargeError: If the instance has more than `max_ops` operations.
    """
    _check_size(inst, max_ops)
    start = rollout_heuristic(inst, Rule(RuleKind.MWKR))
    search = _Search(inst, obj, lim, _remaining_min_emission(inst), obj.value(start.makespan, start.emission),
                     deadline=time.monotonic() + lim.max_seconds)
    proven = True
    try:
        search.visit(reset(inst))
    except _LimitReached:
        proven = False
    logger.debug(f"Oracle on {inst.name}: {search.nodes} nodes, value {search.incumbent}, proven={proven}")
    if search.best is None:
        rollout = Rollout(f"oracle(lam={obj.lam})", start.instance_name, start.n_machines,
                          start.entries, start.makespan, start.emission)
    else:
        rollout = Rollout.from_state(search.best, f"oracle(lam={obj.lam})")
    return OracleResult(search.incumbent, rollout, proven, search.nodes)


def solve_exhaustive(inst: Instance, obj: Objective = Objective(), max_ops: int = 8) -> tuple[float, Rollout]:
    """Enumerate every decision sequence without pruning and return the best value and schedule.

    Raises:
        InstanceTooLargeError: If the instance has more than `max_ops` operations.
    """
    _check_size(inst, max_ops)
    best_value, best_state = math.inf, None
    stack = [reset(inst)]
    while stack:
        state = stack.pop()
        if state.is_terminal():
            value = obj.value(makespan(state), state.emission_so_far)
            if value < best_value:
                best_value, best_state = value, state
            continue
        stack.extend(step(state, a)[0] for a in legal_actions(state))
    return best_value, Rollout.from_state(best_state, "exhaustive")


@dataclass(frozen=True)
class Diagnostics:
    """Result of a schedule check: an empty violation list means the schedule is valid."""
    violations: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed


def verify_schedule(inst: Instance, entries: Sequence[ScheduleEntry], tol: float = 1e-9) -> Diagnostics:
    """Check that scheduled operations form a valid complete schedule of an instance.

    The checks cover completeness, machine eligibility, start/end arithmetic, job precedence and
    machine non-overlap. Violations are reported, not raised.
    """
    violations: list[str] = []
    seen: dict[tuple[int, int], ScheduleEntry] = {}
    per_machine: dict[int, list[ScheduleEntry]] = defaultdict(list)
    for e in entries:
        key = (e.job_id, e.op_index)
        if not (0 <= e.job_id < inst.n_jobs and 0 <= e.op_index < inst.job_lengths[e.job_id]):
            violations.append(f"unknown operation ({e.job_id}, {e.op_index})")
            continue
        if key in seen:
            violations.append(f"operation {key} scheduled more than once")
            continue
        seen[key] = e
        op = inst.jobs[e.job_id][e.op_index]
        if e.start < -tol:
            violations.append(f"operation {key} starts at negative time {e.start}")
        if e.machine_id not in op:
            violations.append(f"operation {key} assigned to ineligible machine {e.machine_id}")
            continue
        p = op.time_on(e.machine_id)
        if abs(e.end - e.start - p) > tol * (1.0 + abs(e.end)):
            violations.append(f"operation {key} on machine {e.machine_id} spans {e.end - e.start}, expected {p}")
        per_machine[e.machine_id].append(e)

    for j, ops in enumerate(inst.jobs):
        for k in range(len(ops)):
            if (j, k) not in seen:
                violations.append(f"operation ({j}, {k}) is not scheduled")
            elif k > 0 and (j, k - 1) in seen and seen[(j, k)].start < seen[(j, k - 1)].end - tol:
                violations.append(f"operation ({j}, {k}) starts before its predecessor ends")

    for m, scheduled in sorted(per_machine.items()):
        scheduled.sort(key=lambda e: (e.start, e.end))
        for a, b in zip(scheduled, scheduled[1:]):
            if b.start < a.end - tol:
                violations.append(f"operations ({a.job_id}, {a.op_index}) and ({b.job_id}, {b.op_index}) "
                                  f"overlap on machine {m}")
    return Diagnostics(tuple(violations))
