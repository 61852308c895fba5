# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the dispatching rules."""

import statistics

from collections import Counter

import numpy as np
import pytest

from carbonshop.algo import (DETERMINISTIC_RULES, dispatch, earliest_finish_machine, random_policy_rollout,
                             rollout_heuristic, Rule, RuleKind, verify_schedule)
from carbonshop.core import GenConfig, generate_instance, Instance
from carbonshop.sim import Action, Episode, legal_actions, reset, State, step

# Upper 0.1% point of the chi-square distribution with 5 degrees of freedom.
CHI2_5DF_999 = 20.515


class TestRule:
    """Test suite for rule construction."""

    def test_parse(self) -> None:
        assert Rule.parse("mwkr") == Rule(RuleKind.MWKR)
        assert Rule.parse(" SPT ").kind is RuleKind.SPT
        assert Rule.parse("random", 7) == Rule(RuleKind.RANDOM, 7)
        assert Rule.parse("fifo").name == "FIFO"

    def test_parse_unknown(self) -> None:
        with pytest.raises(ValueError, match="Unknown rule"):
            Rule.parse("edd")

    def test_kind_from_string(self) -> None:
        assert Rule("mor").kind is RuleKind.MOR

    def test_deterministic_rules(self) -> None:
        assert [r.name for r in DETERMINISTIC_RULES] == ["FIFO", "SPT", "MOR", "MWKR"]


class TestDispatch:
    """Test suite for single dispatching decisions."""

    def test_spt_picks_shortest(self) -> None:
        inst = Instance.build("spt", [[{0: 7.0}], [{0: 3.0, 1: 4.0}]])
        assert dispatch(reset(inst), Rule(RuleKind.SPT)) == Action(1, 0, 0)

    def test_mwkr_picks_most_work(self) -> None:
        """Remaining work 9 against 12: the second job goes first."""
        inst = Instance.build("mwkr", [[{0: 4.0}, {0: 5.0}], [{1: 6.0}, {0: 6.0}]])
        assert dispatch(reset(inst), Rule(RuleKind.MWKR)) == Action(1, 0, 1)

    def test_mor_picks_most_operations(self) -> None:
        inst = Instance.build("mor", [[{0: 1.0}], [{0: 1.0}, {0: 1.0}, {1: 1.0}]])
        assert dispatch(reset(inst), Rule(RuleKind.MOR)) == Action(1, 0, 0)

    def test_fifo_picks_earliest_ready(self, tiny_instance: Instance) -> None:
        state, _ = step(reset(tiny_instance), Action(0, 0, 0))
        assert dispatch(state, Rule(RuleKind.FIFO)) == Action(1, 0, 0)

    def test_ties_go_to_lowest_ids(self) -> None:
        inst = Instance.build("ties", [[{0: 2.0, 1: 2.0}], [{0: 2.0, 1: 2.0}]])
        for rule in DETERMINISTIC_RULES:
            assert dispatch(reset(inst), rule) == Action(0, 0, 0)

    def test_earliest_finish_machine(self, tiny_instance: Instance) -> None:
        state = reset(tiny_instance)
        assert earliest_finish_machine(state, 0) == 0
        state, _ = step(state, Action(1, 0, 0))
        assert earliest_finish_machine(state, 0) == 1

    def test_random_is_uniform(self) -> None:
        """Over many seeds, the random rule picks each of the six legal actions equally often."""
        inst = Instance.build("uniform", [[{0: 2.0, 1: 3.0}], [{0: 1.0, 1: 4.0}], [{0: 5.0, 1: 2.0}]])
        state = reset(inst)
        actions = legal_actions(state)
        assert len(actions) == 6
        draws = 6000
        counts = Counter(dispatch(state, Rule(RuleKind.RANDOM, seed)) for seed in range(draws))
        assert set(counts) == set(actions)
        observed = np.array([counts[a] for a in actions], dtype=np.float64)
        expected = draws / len(actions)
        assert float(((observed - expected) ** 2 / expected).sum()) < CHI2_5DF_999

    def test_spt_holds_at_every_step(self, small_instances: list[Instance], medium_instance: Instance) -> None:
        """Every SPT decision takes a pending operation of minimal shortest processing time."""
        def checked_spt(state: State) -> Action:
            action = dispatch(state, Rule(RuleKind.SPT))
            pending = [state.instance.jobs[j][state.next_op[j]].min_time for j in state.unfinished_jobs()]
            assert state.instance.jobs[action.job_id][action.op_index].min_time == min(pending)
            return action

        for inst in (*small_instances, medium_instance):
            Episode(inst).run_to_completion(checked_spt)

    def test_terminal_state(self, tiny_instance: Instance) -> None:
        episode = Episode(tiny_instance)
        state = episode.run_to_completion(lambda s: dispatch(s, Rule(RuleKind.FIFO)))
        with pytest.raises(ValueError):
            dispatch(state, Rule(RuleKind.SPT))


class TestRollouts:
    """Test suite for complete heuristic schedules."""

    def test_fifo_on_tiny(self, tiny_instance: Instance) -> None:
        rollout = rollout_heuristic(tiny_instance, Rule(RuleKind.FIFO))
        assert rollout.method == "FIFO"
        assert rollout.makespan == 8.0
        assert rollout.emission == 18.0

    def test_schedules_are_valid(self, small_instances: list[Instance], medium_instance: Instance) -> None:
        """Every rule produces a complete, feasible schedule."""
        rules = (*DETERMINISTIC_RULES, Rule(RuleKind.RANDOM, 3))
        for inst in (*small_instances, medium_instance):
            for rule in rules:
                rollout = rollout_heuristic(inst, rule)
                assert len(rollout.entries) == inst.n_ops
                assert verify_schedule(inst, rollout.entries).passed

    def test_random_is_reproducible(self, medium_instance: Instance) -> None:
        first = rollout_heuristic(medium_instance, Rule(RuleKind.RANDOM, 5))
        assert rollout_heuristic(medium_instance, Rule(RuleKind.RANDOM, 5)) == first
        assert random_policy_rollout(medium_instance, 5) == (first.makespan, first.emission)
        others = {random_policy_rollout(medium_instance, seed) for seed in range(10)}
        assert len(others) > 1

    @pytest.mark.slow
    def test_rule_ordering(self) -> None:
        """On 10x5 instances the rules rank MWKR, then FIFO, then SPT by mean makespan."""
        instances = [generate_instance(seed, GenConfig()) for seed in range(100)]

        def mean_makespan(kind: RuleKind) -> float:
            return statistics.fmean(rollout_heuristic(inst, Rule(kind)).makespan for inst in instances)

        assert mean_makespan(RuleKind.MWKR) < mean_makespan(RuleKind.FIFO) < mean_makespan(RuleKind.SPT)
