# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
State prompts.

Every operation that is not yet scheduled is described by one fragment:

    {Job <j>, Op <k>, <r> ops left; est_start=<t1>, dur=<t2>; machines=<id>:<p>(|<id>:<p>)*}

`r` counts the operation itself and the ones after it, `dur` is the mean processing time over the
eligible machines, and every number has one decimal. Options may append `; rates=<id>:<e>(|...)*`,
and active hints append `; Hint: High Makespan Impact` and/or `; Hint: High Emission Impact`,
all inside the braces. The prompt document joins the fragments with `", "`, in (job, op) order.
"""

import re

from dataclasses import dataclass
from typing import Optional

from ..sim import State
from .impact import ImpactStore, op_key

MAKESPAN_HINT = "Hint: High Makespan Impact"
EMISSION_HINT = "Hint: High Emission Impact"

_FRAGMENT = re.compile(
    r"\{Job (?P<job>\d+), Op (?P<op>\d+), (?P<left>\d+) ops left; "
    r"est_start=(?P<est>\d+\.\d), dur=(?P<dur>\d+\.\d); "
    r"machines=(?P<machines>\d+:\d+\.\d(?:\|\d+:\d+\.\d)*)"
    r"(?:; rates=(?P<rates>\d+:\d+\.\d(?:\|\d+:\d+\.\d)*))?"
    rf"(?P<ms>; {MAKESPAN_HINT})?"
    rf"(?P<ce>; {EMISSION_HINT})?\}}"
)


@dataclass(frozen=True)
class PromptOptions:
    """Rendering options.

    Attributes:
        show_emission_rates: Whether fragments list the emission rate of each eligible machine.
            Defaults to False, leaving rates implicit in the machine ids.
    """
    show_emission_rates: bool = False


@dataclass(frozen=True)
class PromptRecord:
    """The prompt of a state.

    Attributes:
        keys: The `(job, op)` of every fragment.
        fragments: One text per unscheduled operation.
    """
    keys: tuple[tuple[int, int], ...]
    fragments: tuple[str, ...]

    @property
    def document(self) -> str:
        return ", ".join(self.fragments)


@dataclass(frozen=True)
class FragmentFields:
    """The values carried by a fragment."""
    job_id: int
    op_index: int
    ops_left: int
    est_start: float
    dur: float
    machines: tuple[tuple[int, float], ...]
    rates: Optional[tuple[tuple[int, float], ...]]
    makespan_hint: bool
    emission_hint: bool


def _pairs(text: str) -> tuple[tuple[int, float], ...]:
    return tuple((int(m), float(v)) for m, v in (pair.split(':') for pair in text.split('|')))


def parse_fragment(text: str) -> FragmentFields:
    """Read a fragment back.

    Raises:
        ValueError: If the text does not follow the fragment grammar.
    """
    match = _FRAGMENT.fullmatch(text)
    if match is None:
        raise ValueError(f"Not a prompt fragment: {text!r}")
    return FragmentFields(
        job_id=int(match['job']),
        op_index=int(match['op']),
        ops_left=int(match['left']),
        est_start=float(match['est']),
        dur=float(match['dur']),
        machines=_pairs(match['machines']),
        rates=_pairs(match['rates']) if match['rates'] else None,
        makespan_hint=match['ms'] is not None,
        emission_hint=match['ce'] is not None,
    )


def split_document(document: str) -> list[str]:
    """Split a prompt document into its fragments."""
    if not document:
        return []
    parts = document.split("}, ")
    return [p + "}" for p in parts[:-1]] + [parts[-1]]


def estimated_starts(state: State, job_id: int) -> list[float]:
    """Earliest start estimates of the unscheduled operations of a job.

    An operation cannot start before its job's ready time plus the shortest durations of its
    unscheduled predecessors, nor before the earliest free time among its eligible machines.
    """
    inst = state.instance
    chain_ready = state.job_ready[job_id]
    starts = []
    for op in inst.jobs[job_id][state.next_op[job_id]:]:
        machine_ready = min(state.machine_free_at[m] for m in op.machines())
        starts.append(max(chain_ready, machine_ready))
        chain_ready += op.min_time
    return starts


def render_fragment(job_id: int, op_index: int, ops_left: int, est_start: float, dur: float,
                    machines: tuple[tuple[int, float], ...], rates: Optional[tuple[tuple[int, float], ...]] = None,
                    makespan_hint: bool = False, emission_hint: bool = False) -> str:
    parts = [f"{{Job {job_id}, Op {op_index}, {ops_left} ops left; est_start={est_start:.1f}, dur={dur:.1f}; "
             f"machines={'|'.join(f'{m}:{p:.1f}' for m, p in machines)}"]
    if rates is not None:
        parts.append(f"; rates={'|'.join(f'{m}:{e:.1f}' for m, e in rates)}")
    if makespan_hint:
        parts.append(f"; {MAKESPAN_HINT}")
    if emission_hint:
        parts.append(f"; {EMISSION_HINT}")
    parts.append("}")
    return ''.join(parts)


def build_state_prompt(state: State, store: Optional[ImpactStore] = None,
                       options: PromptOptions = PromptOptions()) -> PromptRecord:
    """Describe every unscheduled operation of a state, with the hints of the impact store.

    A terminal state yields an empty prompt.
    """
    inst = state.instance
    rates = inst.emission_rates
    keys, fragments = [], []
    for j in state.unfinished_jobs():
        first = state.next_op[j]
        for k, est in enumerate(estimated_starts(state, j), start=first):
            op = inst.jobs[j][k]
            hints = store.hints_for(op_key(inst.name, j, k)) if store is not None else None
            fragments.append(render_fragment(
                j, k, inst.job_lengths[j] - k, est, op.mean_time, op.alternatives,
                rates=tuple((m, rates[m]) for m in op.machines()) if options.show_emission_rates else None,
                makespan_hint=hints is not None and hints.makespan,
                emission_hint=hints is not None and hints.emission,
            ))
            keys.append((j, k))
    return PromptRecord(tuple(keys), tuple(fragments))
