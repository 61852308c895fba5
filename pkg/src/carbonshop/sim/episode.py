# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

from dataclasses import dataclass, field
from typing import Callable, Optional, Self

from ..core import Instance
from . import environment as env
from .state import Action, ScheduleEntry, State, StepOutcome

type Chooser = Callable[[State], Action]


@dataclass(frozen=True)
class Rollout:
    """The record of a completed episode.

    A rollout is self-contained: it holds the instance name and machine count but not the instance,
    so stored rollouts can be loaded and rendered without the instance files.

    Attributes:
        method: The name of the method that produced the schedule.
        instance_name: The name of the scheduled instance.
        n_machines: The number of machines of the instance.
        entries: The scheduled operations, in decision order.
        makespan: The makespan of the schedule.
        emission: The total emission of the schedule.
    """
    method: str
    instance_name: str
    n_machines: int
    entries: tuple[ScheduleEntry, ...]
    makespan: float
    emission: float

    @classmethod
    def from_state(cls, state: State, method: str = "") -> Self:
        return cls(
            method=method,
            instance_name=state.instance.name,
            n_machines=state.instance.n_machines,
            entries=state.entries,
            makespan=env.makespan(state),
            emission=state.emission_so_far,
        )

    def dump(self) -> bytes:
        """Serialize the rollout to pickle format (default)."""
        return self.dump_pickle()

    @classmethod
    def load(cls, data: bytes) -> Self:
        """Deserialize a rollout from pickle format (default)."""
        return cls.load_pickle(data)

    def dump_pickle(self) -> bytes:
        """Serialize the rollout to a pickle byte string."""
        import pickle
        return pickle.dumps(self, protocol=4)

    @classmethod
    def load_pickle(cls, data: bytes) -> Self:
        """Deserialize a rollout from a pickle byte string.

        Raises:
            TypeError: If the deserialized object is not a Rollout instance.
        """
        import pickle
        obj = pickle.loads(data)
        if not isinstance(obj, cls):
            raise TypeError(f"Expected Rollout, got {type(obj)}")
        return obj

    def dump_json(self) -> str:
        """Serialize the rollout to an indented JSON string.

        Raises:
            ImportError: If classifiedjson is not installed (install carbonshop[json]).
        """
        try:
            from classifiedjson import dumps
        except ImportError:
            raise ImportError("classifiedjson is not installed. Please re-install carbonshop with the json feature.")
        import json
        return json.dumps(json.loads(dumps(self)), indent=2)

    @classmethod
    def load_json(cls, data: str) -> Self:
        """Deserialize a rollout from a JSON string.

        Raises:
            ImportError: If classifiedjson is not installed (install carbonshop[json]).
        """
        try:
            from classifiedjson import loads
        except ImportError:
            raise ImportError("classifiedjson is not installed. Please re-install carbonshop with the json feature.")
        obj = loads(data)
        if not isinstance(obj, cls):
            raise TypeError(f"Expected Rollout, got {type(obj)}")
        return obj


def dump_rollouts(rollouts: list[Rollout]) -> bytes:
    """Serialize a list of rollouts to a pickle byte string."""
    import pickle
    return pickle.dumps(list(rollouts), protocol=4)


def load_rollouts(data: bytes) -> list[Rollout]:
    """Deserialize a list of rollouts written by `dump_rollouts`."""
    import pickle
    obj = pickle.loads(data)
    if not isinstance(obj, list) or not all(isinstance(r, Rollout) for r in obj):
        raise TypeError("Expected a list of Rollout records")
    return obj


@dataclass
class Episode:
    """Runs one scheduling episode, one decision at a time.

    Attributes:
        instance: The instance being scheduled.
        state: The current partial schedule.
        outcomes: The outcome of every step taken so far.
    """
    instance: Instance
    state: State = field(init=False)
    outcomes: list[StepOutcome] = field(default_factory=list, init=False)

    def __post_init__(self) -> None:
        self.state = env.reset(self.instance)

    def legal_actions(self) -> list[Action]:
        return env.legal_actions(self.state)

    def advance(self, action: Action) -> StepOutcome:
        """Apply one action to the current state.

        Raises:
            IllegalActionError: If the action is not legal.
        """
        self.state, outcome = env.step(self.state, action)
        self.outcomes.append(outcome)
        return outcome

    def is_finished(self) -> bool:
        return self.state.is_terminal()

    def run_to_completion(self, choose: Chooser, step_limit: Optional[int] = None) -> State:
        """Let a chooser take decisions until the schedule is complete or a step limit is reached.

        Args:
            choose: Returns the action to take in a given state.
            step_limit: Maximum number of steps to execute. If None, runs until done.

        Returns:
            The final state.
        """
        step_count = 0
        while not self.is_finished() and (step_limit is None or step_count < step_limit):
            self.advance(choose(self.state))
            step_count += 1
        return self.state

    def rollout(self, method: str = "") -> Rollout:
        return Rollout.from_state(self.state, method)


def run_episode(inst: Instance, choose: Chooser, method: str = "") -> Rollout:
    """Schedule an instance entirely with a chooser and return the rollout."""
    episode = Episode(inst)
    episode.run_to_completion(choose)
    return episode.rollout(method)
