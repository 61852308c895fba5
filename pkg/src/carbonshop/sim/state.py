# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

import dataclasses

from dataclasses import dataclass
from typing import Self

from ..core import Instance


@dataclass(frozen=True, order=True)
class Action:
    """Assignment of the next operation of a job to one of its eligible machines.

    Attributes:
        job_id: The job whose next unscheduled operation is assigned.
        op_index: The index of that operation within the job.
        machine_id: The machine the operation is assigned to.
    """
    job_id: int
    op_index: int
    machine_id: int

    def __str__(self) -> str:
        return f"(J{self.job_id}.O{self.op_index} -> M{self.machine_id})"


@dataclass(frozen=True, order=True)
class ScheduleEntry:
    """A scheduled operation.

    Attributes:
        job_id: The job of the operation.
        op_index: The index of the operation within its job.
        machine_id: The machine processing the operation.
        start: The start time.
        end: The completion time, `start + p` for the assigned machine.
        emission: The emission of the operation, `p·e` for the assigned machine.
    """
    job_id: int
    op_index: int
    machine_id: int
    start: float
    end: float
    emission: float = 0.0


@dataclass(frozen=True)
class StepOutcome:
    """What a single decision step changed.

    Attributes:
        delta_makespan_lb: Increase of the makespan lower bound caused by the step.
        delta_emission: Emission of the scheduled operation (`p·e`, never negative).
        done: Whether every operation is now scheduled.
    """
    delta_makespan_lb: float
    delta_emission: float
    done: bool


@dataclass(frozen=True)
class State:
    """A partial schedule of an instance.

    States are values: `step` returns a new state and leaves its argument untouched, so any number
    of rollouts can share the same instance concurrently.

    Attributes:
        instance: The instance being scheduled.
        entries: The scheduled operations, in decision order.
        next_op: Per job, the index of its next unscheduled operation (the job length when done).
        job_ready: Per job, the completion time of its last scheduled operation (0 if none).
        machine_free_at: Per machine, the completion time of its last operation (0 if none).
        emission_so_far: Total emission of the scheduled operations.
        makespan_so_far: Largest completion time among the scheduled operations.
        decision_step: Number of decisions taken so far.
    """
    instance: Instance
    entries: tuple[ScheduleEntry, ...]
    next_op: tuple[int, ...]
    job_ready: tuple[float, ...]
    machine_free_at: tuple[float, ...]
    emission_so_far: float = 0.0
    makespan_so_far: float = 0.0
    decision_step: int = 0

    def cloned_with(self, **kwargs: object) -> Self:
        """Create a copy of this state with updated attributes."""
        return dataclasses.replace(self, **kwargs)

    def is_terminal(self) -> bool:
        return all(k >= n for k, n in zip(self.next_op, self.instance.job_lengths))

    def unfinished_jobs(self) -> list[int]:
        return [j for j, (k, n) in enumerate(zip(self.next_op, self.instance.job_lengths)) if k < n]

    def remaining_ops(self, job_id: int) -> int:
        return self.instance.job_lengths[job_id] - self.next_op[job_id]

    def remaining_work(self, job_id: int) -> float:
        """Sum of min-alternative times of the unscheduled operations of a job."""
        return self.instance.remaining_min_work[job_id][self.next_op[job_id]]

    def __str__(self) -> str:
        return (f"State({self.instance.name}, step={self.decision_step}, "
                f"makespan={self.makespan_so_far}, emission={self.emission_so_far})")
