# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

import dataclasses
import math

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Self


@dataclass(frozen=True, order=True)
class MachineProfile:
    """A machine of the shop floor.

    Attributes:
        machine_id: The 0-based identifier of the machine, unique within an instance.
        emission_rate: The carbon emitted per unit of processing time. Defaults to 1.0.
    """
    machine_id: int
    emission_rate: float = 1.0

    def __post_init__(self) -> None:
        if self.machine_id < 0:
            raise ValueError("Machine ID must be a non-negative integer")
        if not (self.emission_rate > 0 and math.isfinite(self.emission_rate)):
            raise ValueError(f"Emission rate of machine {self.machine_id} must be a positive finite number")

    def __str__(self) -> str:
        return f"M{self.machine_id}(e={self.emission_rate})"


@dataclass(frozen=True, init=False)
class OperationSpec:
    """One operation of a job, with its eligible machines and processing times.

    The alternatives are stored as `(machine_id, processing_time)` pairs in ascending machine order,
    which keeps the operation hashable and its canonical ordering explicit.

    Attributes:
        job_id: The job this operation belongs to.
        op_index: The 0-based position of the operation within its job.
        alternatives: The eligible machines and the corresponding processing times.
    """
    job_id: int
    op_index: int
    alternatives: tuple[tuple[int, float], ...]

    def __init__(self, job_id: int, op_index: int,
                 alternatives: dict[int, float] | Iterable[tuple[int, float]]) -> None:
        pairs = alternatives.items() if isinstance(alternatives, dict) else alternatives
        normalized = tuple(sorted((int(m), float(p)) for m, p in pairs))
        if not normalized:
            raise ValueError(f"Operation {op_index} of job {job_id} has no eligible machine")
        machines = [m for m, _ in normalized]
        if len(set(machines)) != len(machines):
            raise ValueError(f"Operation {op_index} of job {job_id} lists a machine twice")
        for m, p in normalized:
            if m < 0:
                raise ValueError(f"Operation {op_index} of job {job_id} refers to negative machine {m}")
            if not (p > 0 and math.isfinite(p)):
                raise ValueError(f"Processing time {p} of job {job_id}, op {op_index} on machine {m} must be positive")
        object.__setattr__(self, 'job_id', job_id)
        object.__setattr__(self, 'op_index', op_index)
        object.__setattr__(self, 'alternatives', normalized)

    def machines(self) -> tuple[int, ...]:
        """Return the eligible machines in ascending order."""
        return tuple(m for m, _ in self.alternatives)

    def time_on(self, machine_id: int) -> float:
        """Return the processing time on an eligible machine.

        Raises:
            KeyError: If the machine is not eligible for this operation.
        """
        for m, p in self.alternatives:
            if m == machine_id:
                return p
        raise KeyError(f"Machine {machine_id} is not eligible for job {self.job_id}, op {self.op_index}")

    def __contains__(self, machine_id: int) -> bool:
        return any(m == machine_id for m, _ in self.alternatives)

    @property
    def min_time(self) -> float:
        return min(p for _, p in self.alternatives)

    @property
    def mean_time(self) -> float:
        return sum(p for _, p in self.alternatives) / len(self.alternatives)

    def __str__(self) -> str:
        alts = '|'.join(f"{m}:{p}" for m, p in self.alternatives)
        return f"O({self.job_id},{self.op_index})[{alts}]"


@dataclass(frozen=True)
class Synthetic:
    """Provenance of a generated instance."""
    seed: int
    config: 'GenConfig'


@dataclass(frozen=True)
class Parsed:
    """Provenance of an instance read from a file."""
    path: str


type Provenance = Synthetic | Parsed


@dataclass(frozen=True)
class Instance:
    """An immutable carbon-aware FJSP instance.

    Each job is an ordered chain of operations: operation `k` of a job can only start once operation
    `k-1` of the same job has completed. Instances are safe to share between concurrent rollouts.

    Attributes:
        name: The instance name, used for file names and reports.
        jobs: One tuple of operations per job, in precedence order.
        machines: The machine profiles, indexed by machine id.
        provenance: Where the instance comes from (generated or parsed). Optional.
    """
    name: str
    jobs: tuple[tuple[OperationSpec, ...], ...]
    machines: tuple[MachineProfile, ...]
    provenance: Optional[Provenance] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.jobs) < 1:
            raise ValueError("An instance needs at least one job")
        if len(self.machines) < 1:
            raise ValueError("An instance needs at least one machine")
        for index, machine in enumerate(self.machines):
            if machine.machine_id != index:
                raise ValueError(f"Machine at position {index} has id {machine.machine_id}")
        n_machines = len(self.machines)
        for j, ops in enumerate(self.jobs):
            if not ops:
                raise ValueError(f"Job {j} has no operation")
            for k, op in enumerate(ops):
                if op.job_id != j or op.op_index != k:
                    raise ValueError(f"Operation at job {j}, position {k} is labelled ({op.job_id}, {op.op_index})")
                for m in op.machines():
                    if m >= n_machines:
                        raise ValueError(f"Job {j}, op {k} refers to unknown machine {m}")

    @classmethod
    def build(cls, name: str, jobs: Iterable[Iterable[dict[int, float]]],
              emission_rates: Optional[Iterable[float]] = None, n_machines: Optional[int] = None,
              provenance: Optional[Provenance] = None) -> Self:
        """Create an instance from plain per-operation `{machine: time}` maps.

        Args:
            name: The instance name.
            jobs: For each job, the sequence of its operations' alternatives.
            emission_rates: Per-machine emission rates. Defaults to 1.0 for every machine.
            n_machines: Number of machines, inferred from the alternatives when omitted.
            provenance: Optional provenance record.

        Returns:
            The validated instance.
        """
        job_specs = tuple(
            tuple(OperationSpec(j, k, alts) for k, alts in enumerate(ops))
            for j, ops in enumerate(jobs)
        )
        rates = list(emission_rates) if emission_rates is not None else None
        if n_machines is None:
            if rates is not None:
                n_machines = len(rates)
            else:
                n_machines = 1 + max(m for ops in job_specs for op in ops for m in op.machines())
        if rates is None:
            rates = [1.0] * n_machines
        if len(rates) != n_machines:
            raise ValueError(f"Expected {n_machines} emission rates, got {len(rates)}")
        machines = tuple(MachineProfile(i, float(e)) for i, e in enumerate(rates))
        return cls(name=name, jobs=job_specs, machines=machines, provenance=provenance)

    def cloned_with(self, **kwargs: object) -> Self:
        """Create a copy of this instance with updated attributes."""
        return dataclasses.replace(self, **kwargs)

    @property
    def n_jobs(self) -> int:
        return len(self.jobs)

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    @cached_property
    def n_ops(self) -> int:
        return sum(len(ops) for ops in self.jobs)

    @cached_property
    def job_lengths(self) -> tuple[int, ...]:
        return tuple(len(ops) for ops in self.jobs)

    @cached_property
    def op_offsets(self) -> tuple[int, ...]:
        """Flat index of the first operation of each job (operations are numbered job by job)."""
        offsets, total = [], 0
        for length in self.job_lengths:
            offsets.append(total)
            total += length
        return tuple(offsets)

    def op(self, job_id: int, op_index: int) -> OperationSpec:
        return self.jobs[job_id][op_index]

    def flat_index(self, job_id: int, op_index: int) -> int:
        return self.op_offsets[job_id] + op_index

    def operations(self) -> Iterator[OperationSpec]:
        """Iterate over all operations in canonical (job, op) order."""
        for ops in self.jobs:
            yield from ops

    @cached_property
    def emission_rates(self) -> tuple[float, ...]:
        return tuple(m.emission_rate for m in self.machines)

    @cached_property
    def remaining_min_work(self) -> tuple[tuple[float, ...], ...]:
        """Per job, suffix sums of min-alternative times: entry `k` covers operations `k..end`."""
        result = []
        for ops in self.jobs:
            suffix = [0.0] * (len(ops) + 1)
            for k in range(len(ops) - 1, -1, -1):
                suffix[k] = ops[k].min_time + suffix[k + 1]
            result.append(tuple(suffix))
        return tuple(result)

    @cached_property
    def max_time(self) -> float:
        return max(p for op in self.operations() for _, p in op.alternatives)

    @cached_property
    def max_rate(self) -> float:
        return max(self.emission_rates)

    @cached_property
    def max_energy(self) -> float:
        """The largest `p·e` over all operation/machine pairs."""
        rates = self.emission_rates
        return max(p * rates[m] for op in self.operations() for m, p in op.alternatives)

    @cached_property
    def horizon(self) -> float:
        """Sum of the largest alternative time of every operation, an upper bound on any makespan."""
        return sum(max(p for _, p in op.alternatives) for op in self.operations())

    def min_emission(self) -> float:
        """Closed-form minimum of the total emission: every operation on its cleanest machine."""
        rates = self.emission_rates
        return math.fsum(min(p * rates[m] for m, p in op.alternatives) for op in self.operations())

    def with_emission_rates(self, rates: Iterable[float]) -> Self:
        """Return a copy with new per-machine emission rates.

        Raises:
            ValueError: If the number of rates does not match the number of machines,
                or a rate is not positive.
        """
        rates = [float(e) for e in rates]
        if len(rates) != self.n_machines:
            raise ValueError(f"Expected {self.n_machines} emission rates, got {len(rates)}")
        return self.cloned_with(machines=tuple(MachineProfile(i, e) for i, e in enumerate(rates)))

    def structurally_equal(self, other: Self) -> bool:
        """Compare jobs, operations and machine count, ignoring names, rates and provenance."""
        return self.n_machines == other.n_machines and self.jobs == other.jobs

    def __str__(self) -> str:
        return f"Instance({self.name}: {self.n_jobs}x{self.n_machines}, {self.n_ops} ops)"
