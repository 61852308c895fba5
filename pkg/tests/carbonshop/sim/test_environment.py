# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the decision-step scheduling environment."""

import math

import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from carbonshop.core import GenConfig, generate_instance, Instance
from carbonshop.sim import (Action, earliest_finish, IllegalActionError, is_legal, legal_actions, State, StepOutcome,
                            lower_bound_makespan, makespan, reset, step, total_emission)


def play(inst: Instance, actions: list[Action]) -> tuple[State, list[StepOutcome]]:
    state, outcomes = reset(inst), []
    for action in actions:
        state, outcome = step(state, action)
        outcomes.append(outcome)
    return state, outcomes


class TestReset:
    """Test suite for the initial state."""

    def test_initial_state(self, tiny_instance: Instance) -> None:
        state = reset(tiny_instance)
        assert state.entries == ()
        assert state.next_op == (0, 0)
        assert state.machine_free_at == (0.0, 0.0)
        assert state.decision_step == 0
        assert makespan(state) == 0.0
        assert total_emission(state) == 0.0
        assert not state.is_terminal()

    def test_initial_actions(self, tiny_instance: Instance) -> None:
        """Actions are ordered by job, then machine."""
        assert legal_actions(reset(tiny_instance)) == [Action(0, 0, 0), Action(0, 0, 1), Action(1, 0, 0)]

    def test_initial_lower_bound(self, tiny_instance: Instance) -> None:
        assert lower_bound_makespan(reset(tiny_instance)) == 5.0


class TestStep:
    """Test suite for state transitions."""

    def test_trace(self, tiny_instance: Instance) -> None:
        """A full episode on the tiny instance, checked step by step."""
        actions = [Action(0, 0, 0), Action(1, 0, 0), Action(0, 1, 1), Action(1, 1, 1)]
        state, outcomes = play(tiny_instance, actions)
        assert [(e.start, e.end, e.emission) for e in state.entries] == [
            (0.0, 3.0, 6.0), (3.0, 7.0, 8.0), (3.0, 5.0, 2.0), (7.0, 9.0, 2.0),
        ]
        assert [o.delta_makespan_lb for o in outcomes] == [0.0, 3.0, 0.0, 1.0]
        assert [o.delta_emission for o in outcomes] == [6.0, 8.0, 2.0, 2.0]
        assert [o.done for o in outcomes] == [False, False, False, True]
        assert state.is_terminal()
        assert legal_actions(state) == []
        assert makespan(state) == 9.0
        assert state.emission_so_far == total_emission(state) == 18.0
        assert state.decision_step == 4

    def test_step_is_pure(self, tiny_instance: Instance) -> None:
        state = reset(tiny_instance)
        next_state, _ = step(state, Action(0, 0, 1))
        assert state == reset(tiny_instance)
        assert next_state.machine_free_at == (0.0, 5.0)
        assert next_state.job_ready == (5.0, 0.0)

    def test_illegal_actions(self, tiny_instance: Instance) -> None:
        """Wrong op index, ineligible machine and unknown job are rejected."""
        state = reset(tiny_instance)
        for action in (Action(0, 1, 1), Action(1, 0, 1), Action(2, 0, 0)):
            assert not is_legal(state, action)
            with pytest.raises(IllegalActionError):
                step(state, action)

    def test_finished_job(self, tiny_instance: Instance) -> None:
        state, _ = play(tiny_instance, [Action(0, 0, 0), Action(0, 1, 1)])
        assert all(a.job_id == 1 for a in legal_actions(state))
        with pytest.raises(IllegalActionError):
            step(state, Action(0, 2, 1))

    def test_earliest_finish(self, tiny_instance: Instance) -> None:
        state, _ = play(tiny_instance, [Action(0, 0, 0)])
        assert earliest_finish(state, 1, 0) == 7.0
        assert earliest_finish(state, 0, 1) == 5.0


@st.composite
def random_episode(draw: st.DrawFn) -> tuple[Instance, list[int]]:
    seed = draw(st.integers(0, 10_000))
    inst = generate_instance(seed, GenConfig(n_jobs=4, n_machines=3, ops_per_job_range=(1, 4), flexibility=0.6))
    choices = draw(st.lists(st.integers(0, 1000), min_size=inst.n_ops, max_size=inst.n_ops))
    return inst, choices


class TestInvariants:
    """Property tests over random episodes."""

    @settings(max_examples=60, deadline=None)
    @given(episode=random_episode())
    def test_episode_invariants(self, episode: tuple[Instance, list[int]]) -> None:
        """Episodes take one step per operation, respect precedence and never overlap on a machine."""
        inst, choices = episode
        state = reset(inst)
        lb_sum = 0.0
        lb0 = lower_bound_makespan(state)
        for choice in choices:
            actions = legal_actions(state)
            assert actions
            previous_lb = lower_bound_makespan(state)
            state, outcome = step(state, actions[choice % len(actions)])
            assert outcome.delta_emission > 0
            assert outcome.delta_makespan_lb >= -1e-9
            assert lower_bound_makespan(state) >= previous_lb - 1e-9
            lb_sum += outcome.delta_makespan_lb
        assert state.is_terminal()
        assert len(state.entries) == inst.n_ops
        assert lb0 + lb_sum == pytest.approx(makespan(state), abs=1e-9)
        assert state.emission_so_far == total_emission(state)

        by_job: dict[int, list] = {}
        by_machine: dict[int, list] = {}
        for e in state.entries:
            by_job.setdefault(e.job_id, []).append(e)
            by_machine.setdefault(e.machine_id, []).append(e)
            assert e.end == e.start + inst.jobs[e.job_id][e.op_index].time_on(e.machine_id)
        for entries in by_job.values():
            assert [e.op_index for e in entries] == list(range(len(entries)))
            assert all(a.end <= b.start for a, b in zip(entries, entries[1:]))
        for entries in by_machine.values():
            ordered = sorted(entries, key=lambda e: e.start)
            assert all(a.end <= b.start for a, b in zip(ordered, ordered[1:]))

    @settings(max_examples=30, deadline=None)
    @given(episode=random_episode())
    def test_emission_is_order_independent(self, episode: tuple[Instance, list[int]]) -> None:
        """The emission total only depends on the machine assignment."""
        inst, choices = episode
        state = reset(inst)
        for choice in choices:
            actions = legal_actions(state)
            state, _ = step(state, actions[choice % len(actions)])
        rates = inst.emission_rates
        expected = math.fsum(inst.jobs[e.job_id][e.op_index].time_on(e.machine_id) * rates[e.machine_id]
                             for e in reversed(state.entries))
        assert state.emission_so_far == expected
