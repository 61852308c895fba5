# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the exact solver and the schedule checker."""

import dataclasses

import pytest

from carbonshop.algo import (DETERMINISTIC_RULES, InstanceTooLargeError, Objective, rollout_heuristic,
                             SearchLimits, solve_exact, solve_exhaustive, verify_schedule)
from carbonshop.core import GenConfig, generate_instance, Instance

TINY_CONFIG = GenConfig(n_jobs=3, n_machines=2, ops_per_job_range=(1, 2), flexibility=0.7, e_min=1.0, e_max=4.0)


@pytest.fixture(scope="module")
def tiny_set() -> list[Instance]:
    """Fifty random instances of at most six operations."""
    return [generate_instance(seed, TINY_CONFIG) for seed in range(100, 150)]


class TestObjective:
    """Test suite for the scalarized objective."""

    def test_value(self) -> None:
        assert Objective(0.0).value(10.0, 50.0) == 10.0
        assert Objective(1.0).value(10.0, 50.0) == 50.0
        assert Objective(0.5).value(10.0, 50.0) == 30.0

    def test_invalid(self) -> None:
        with pytest.raises(ValueError):
            Objective(1.5)
        with pytest.raises(ValueError):
            SearchLimits(max_nodes=0)


class TestSolveExact:
    """Test suite for branch and bound."""

    def test_tiny_makespan(self, tiny_instance: Instance) -> None:
        result = solve_exact(tiny_instance, Objective(0.0))
        assert result.value == 7.0
        assert result.proven_optimal
        assert result.rollout.makespan == 7.0
        assert verify_schedule(tiny_instance, result.entries)

    def test_tiny_emission(self, tiny_instance: Instance) -> None:
        result = solve_exact(tiny_instance, Objective(1.0))
        assert result.value == 17.0 == tiny_instance.min_emission()
        assert result.rollout.emission == 17.0

    @pytest.mark.parametrize("lam", [0.0, 0.5, 1.0])
    def test_matches_exhaustive(self, tiny_set: list[Instance], lam: float) -> None:
        """Pruning never loses the optimum."""
        obj = Objective(lam)
        for inst in tiny_set:
            assert inst.n_ops <= 6
            result = solve_exact(inst, obj)
            value, rollout = solve_exhaustive(inst, obj)
            assert result.proven_optimal
            assert result.value == value
            assert obj.value(rollout.makespan, rollout.emission) == value

    def test_emission_closed_form(self) -> None:
        """With the full weight on emission the optimum puts every operation on its cleanest machine."""
        cfg = dataclasses.replace(TINY_CONFIG, n_jobs=4, n_machines=3, e_max=16.0)
        for seed in range(100):
            inst = generate_instance(seed, cfg)
            assert solve_exact(inst, Objective(1.0)).value == inst.min_emission()

    def test_heuristics_are_dominated(self, tiny_set: list[Instance]) -> None:
        for inst in tiny_set:
            optimum = solve_exact(inst, Objective(0.0)).value
            min_emission = solve_exact(inst, Objective(1.0)).value
            for rule in DETERMINISTIC_RULES:
                rollout = rollout_heuristic(inst, rule)
                assert verify_schedule(inst, rollout.entries).passed
                assert rollout.makespan >= optimum
                assert rollout.emission >= min_emission

    def test_node_limit(self, medium_instance: Instance) -> None:
        """A search stopped on its budget still returns a valid schedule."""
        result = solve_exact(medium_instance, Objective(0.0), SearchLimits(max_nodes=10), max_ops=20)
        assert not result.proven_optimal
        assert verify_schedule(medium_instance, result.entries)
        assert result.value <= rollout_heuristic(medium_instance, DETERMINISTIC_RULES[3]).makespan

    def test_too_large(self, medium_instance: Instance) -> None:
        with pytest.raises(InstanceTooLargeError):
            solve_exact(medium_instance, max_ops=5)
        with pytest.raises(InstanceTooLargeError):
            solve_exhaustive(medium_instance)


class TestVerifySchedule:
    """Test suite for the schedule checker."""

    def test_violations(self, tiny_instance: Instance) -> None:
        """Missing, overlapping, ineligible and mistimed operations are each reported."""
        entries = list(solve_exact(tiny_instance).entries)
        assert verify_schedule(tiny_instance, entries).violations == ()

        missing = verify_schedule(tiny_instance, entries[:-1])
        assert not missing
        assert any("not scheduled" in v for v in missing.violations)

        shifted = [dataclasses.replace(e, start=e.start + 0.5) if (e.job_id, e.op_index) == (0, 1) else e
                   for e in entries]
        assert any("spans" in v for v in verify_schedule(tiny_instance, shifted).violations)

        ineligible = [dataclasses.replace(e, machine_id=0) if (e.job_id, e.op_index) == (0, 1) else e
                      for e in entries]
        assert any("ineligible" in v for v in verify_schedule(tiny_instance, ineligible).violations)

        early = [dataclasses.replace(e, start=0.0, end=e.end - e.start) if (e.job_id, e.op_index) == (1, 1) else e
                 for e in entries]
        report = verify_schedule(tiny_instance, early)
        assert any("predecessor" in v for v in report.violations)
        assert any("overlap" in v for v in report.violations)

        assert any("more than once" in v for v in verify_schedule(tiny_instance, entries + entries[:1]).violations)
