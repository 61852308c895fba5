# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Decision-step semantics of the scheduling environment.

A decision assigns the next operation of one unfinished job to one of its eligible machines. The
operation is appended to the machine timeline at its earliest feasible start,
`max(machine free time, job ready time)`. A complete episode takes exactly one decision per
operation.
"""

import math

from ..core import Instance
from .state import Action, ScheduleEntry, State, StepOutcome


class IllegalActionError(ValueError):
    """Raised when `step` is given an action that is not in `legal_actions(state)`."""


def reset(inst: Instance) -> State:
    """Return the empty schedule of an instance."""
    return State(
        instance=inst,
        entries=(),
        next_op=(0,) * inst.n_jobs,
        job_ready=(0.0,) * inst.n_jobs,
        machine_free_at=(0.0,) * inst.n_machines,
    )


def legal_actions(state: State) -> list[Action]:
    """Enumerate the legal actions, ordered by job then machine.

    Returns an empty list for a terminal state.
    """
    inst = state.instance
    actions = []
    for j, k in enumerate(state.next_op):
        if k < inst.job_lengths[j]:
            actions.extend(Action(j, k, m) for m, _ in inst.jobs[j][k].alternatives)
    return actions


def is_legal(state: State, action: Action) -> bool:
    inst = state.instance
    j = action.job_id
    if not 0 <= j < inst.n_jobs:
        return False
    k = state.next_op[j]
    return k < inst.job_lengths[j] and action.op_index == k and action.machine_id in inst.jobs[j][k]


def makespan(state: State) -> float:
    """Largest completion time among the scheduled operations, 0 for an empty schedule."""
    return max((e.end for e in state.entries), default=0.0)


def total_emission(state: State) -> float:
    """Total emission of the scheduled operations, recomputed from the instance.

    The sum is exactly rounded, so it does not depend on the order in which operations were scheduled.
    """
    rates = state.instance.emission_rates
    inst = state.instance
    return math.fsum(inst.jobs[e.job_id][e.op_index].time_on(e.machine_id) * rates[e.machine_id]
                     for e in state.entries)


def lower_bound_makespan(state: State) -> float:
    """Admissible estimate of the final makespan.

    The bound is the largest of the current makespan and, for every unfinished job, its ready time
    plus the min-alternative times of its remaining operations.
    """
    inst = state.instance
    bound = state.makespan_so_far
    for j, k in enumerate(state.next_op):
        if k < inst.job_lengths[j]:
            bound = max(bound, state.job_ready[j] + inst.remaining_min_work[j][k])
    return bound


def step(state: State, action: Action) -> tuple[State, StepOutcome]:
    """Apply an action and return the successor state with the step outcome.

    Raises:
        IllegalActionError: If the action is not legal in the state.
    """
    if not is_legal(state, action):
        raise IllegalActionError(f"Action {action} is not legal at decision step {state.decision_step}")
    inst = state.instance
    j, m = action.job_id, action.machine_id
    op = inst.jobs[j][action.op_index]
    p = op.time_on(m)
    energy = p * inst.emission_rates[m]
    start = max(state.machine_free_at[m], state.job_ready[j])
    end = start + p
    entry = ScheduleEntry(j, action.op_index, m, start, end, energy)
    entries = (*state.entries, entry)
    next_state = State(
        instance=inst,
        entries=entries,
        next_op=state.next_op[:j] + (state.next_op[j] + 1,) + state.next_op[j + 1:],
        job_ready=state.job_ready[:j] + (end,) + state.job_ready[j + 1:],
        machine_free_at=state.machine_free_at[:m] + (end,) + state.machine_free_at[m + 1:],
        emission_so_far=math.fsum(e.emission for e in entries),
        makespan_so_far=max(state.makespan_so_far, end),
        decision_step=state.decision_step + 1,
    )
    outcome = StepOutcome(
        delta_makespan_lb=lower_bound_makespan(next_state) - lower_bound_makespan(state),
        delta_emission=energy,
        done=next_state.is_terminal(),
    )
    return next_state, outcome


def earliest_finish(state: State, job_id: int, machine_id: int) -> float:
    """Completion time the next operation of a job would get on a machine."""
    op = state.instance.jobs[job_id][state.next_op[job_id]]
    return max(state.machine_free_at[machine_id], state.job_ready[job_id]) + op.time_on(machine_id)
