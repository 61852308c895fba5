# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Classical dispatching rules.

A rule first selects a job among the unfinished ones, then assigns the job's next operation to the
eligible machine where it would finish earliest. Ties are broken by lowest job id, then by lowest
machine id. The random rule instead picks uniformly among all legal actions.
"""

from dataclasses import dataclass
from enum import StrEnum
from typing import Callable, Self

import numpy as np

from ..core import Instance
from ..sim import Action, earliest_finish, Episode, legal_actions, Rollout, State


class RuleKind(StrEnum):
    FIFO = 'fifo'
    SPT = 'spt'
    MOR = 'mor'
    MWKR = 'mwkr'
    RANDOM = 'random'


@dataclass(frozen=True)
class Rule:
    """A dispatching rule.

    Attributes:
        kind: Which rule to apply.
        seed: Seed of the random rule; ignored by the other rules.
    """
    kind: RuleKind
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, 'kind', RuleKind(self.kind))

    @classmethod
    def parse(cls, token: str, seed: int = 0) -> Self:
        """Create a rule from its lowercase CLI token (fifo, spt, mor, mwkr, random).

        Raises:
            ValueError: If the token names no rule.
        """
        try:
            return cls(RuleKind(token.strip().lower()), seed)
        except ValueError:
            raise ValueError(f"Unknown rule '{token}', expected one of {', '.join(k.value for k in RuleKind)}")

    @property
    def name(self) -> str:
        return self.kind.value.upper()


DETERMINISTIC_RULES = (Rule(RuleKind.FIFO), Rule(RuleKind.SPT), Rule(RuleKind.MOR), Rule(RuleKind.MWKR))

# Lower key is preferred; the job id comes last so that ties go to the lowest job.
_JOB_KEYS: dict[RuleKind, Callable[[State, int], tuple[float, int]]] = {
    RuleKind.FIFO: lambda s, j: (s.job_ready[j], j),
    RuleKind.SPT: lambda s, j: (s.instance.jobs[j][s.next_op[j]].min_time, j),
    RuleKind.MOR: lambda s, j: (-s.remaining_ops(j), j),
    RuleKind.MWKR: lambda s, j: (-s.remaining_work(j), j),
}


def earliest_finish_machine(state: State, job_id: int) -> int:
    """The eligible machine where the next operation of a job would complete first."""
    op = state.instance.jobs[job_id][state.next_op[job_id]]
    return min(op.machines(), key=lambda m: (earliest_finish(state, job_id, m), m))


def dispatch(state: State, rule: Rule) -> Action:
    """Choose the next action according to a dispatching rule.

    Raises:
        ValueError: If the state is terminal.
    """
    jobs = state.unfinished_jobs()
    if not jobs:
        raise ValueError("Cannot dispatch in a terminal state")
    if rule.kind is RuleKind.RANDOM:
        actions = legal_actions(state)
        rng = np.random.default_rng([rule.seed, state.decision_step])
        return actions[int(rng.integers(len(actions)))]
    key = _JOB_KEYS[rule.kind]
    j = min(jobs, key=lambda job: key(state, job))
    return Action(j, state.next_op[j], earliest_finish_machine(state, j))


def rollout_heuristic(inst: Instance, rule: Rule) -> Rollout:
    """Schedule an instance entirely with a dispatching rule.

    Returns:
        The rollout, holding the makespan, the emission and the schedule.
    """
    episode = Episode(inst)
    episode.run_to_completion(lambda state: dispatch(state, rule))
    return episode.rollout(rule.name)


def random_policy_rollout(inst: Instance, seed: int) -> tuple[float, float]:
    """Makespan and emission of a schedule built from uniformly random legal actions."""
    rollout = rollout_heuristic(inst, Rule(RuleKind.RANDOM, seed))
    return rollout.makespan, rollout.emission
