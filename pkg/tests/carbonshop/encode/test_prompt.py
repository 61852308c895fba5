# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the state prompts."""

import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from carbonshop.core import GenConfig, generate_instance, Instance
from carbonshop.encode import (build_state_prompt, ImpactConfig, ImpactStore, op_key, parse_fragment,
                               PromptOptions, render_fragment, split_document)
from carbonshop.sim import Action, legal_actions, reset, step

FIRST_FRAGMENT = "{Job 0, Op 0, 5 ops left; est_start=0.0, dur=7.4; machines=0:7.0|1:6.0|2:9.0|3:9.0|4:6.0}"


class TestStatePrompt:
    """Test suite for prompt construction."""

    def test_initial_prompt(self, prompt_instance: Instance) -> None:
        record = build_state_prompt(reset(prompt_instance))
        assert record.fragments[0] == FIRST_FRAGMENT
        assert record.fragments[1] == "{Job 0, Op 1, 4 ops left; est_start=6.0, dur=4.0; machines=2:4.0}"
        assert record.fragments[5] == "{Job 1, Op 0, 2 ops left; est_start=0.0, dur=4.5; machines=1:5.0|2:4.0}"
        assert record.keys == ((0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 0), (1, 1))
        assert record.document.startswith(FIRST_FRAGMENT + ", {Job 0, Op 1,")

    def test_scheduled_operations_disappear(self, prompt_instance: Instance) -> None:
        state, _ = step(reset(prompt_instance), Action(0, 0, 1))
        record = build_state_prompt(state)
        assert (0, 0) not in record.keys
        assert record.fragments[0] == "{Job 0, Op 1, 4 ops left; est_start=6.0, dur=4.0; machines=2:4.0}"

    def test_terminal_prompt(self, tiny_instance: Instance) -> None:
        state = reset(tiny_instance)
        while not state.is_terminal():
            state, _ = step(state, legal_actions(state)[0])
        record = build_state_prompt(state)
        assert record.fragments == ()
        assert record.document == ""

    def test_emission_rates(self, prompt_instance: Instance) -> None:
        record = build_state_prompt(reset(prompt_instance), options=PromptOptions(show_emission_rates=True))
        assert record.fragments[0] == FIRST_FRAGMENT[:-1] + "; rates=0:1.0|1:1.5|2:2.0|3:1.2|4:1.8}"

    def test_hints(self, prompt_instance: Instance) -> None:
        store = ImpactStore(ImpactConfig(fixed_ms=1.0, fixed_ce=5.0))
        store.record_impact(op_key("prompt", 0, 0), 2.0, 9.0, 1)
        store.record_impact(op_key("prompt", 1, 1), 0.5, 9.0, 1)
        store.refresh_hints()
        record = build_state_prompt(reset(prompt_instance), store)
        assert record.fragments[0] == FIRST_FRAGMENT[:-1] + "; Hint: High Makespan Impact; Hint: High Emission Impact}"
        assert record.fragments[-1].endswith("; Hint: High Emission Impact}")
        assert "Hint" not in record.fragments[1]

    def test_hints_are_per_instance(self, prompt_instance: Instance) -> None:
        store = ImpactStore(ImpactConfig(fixed_ms=0.0, fixed_ce=0.0))
        store.record_impact(op_key("other", 0, 0), 2.0, 9.0, 1).refresh_hints()
        assert "Hint" not in build_state_prompt(reset(prompt_instance), store).document


class TestFragments:
    """Test suite for the fragment grammar."""

    def test_parse(self) -> None:
        fields = parse_fragment(FIRST_FRAGMENT)
        assert (fields.job_id, fields.op_index, fields.ops_left) == (0, 0, 5)
        assert (fields.est_start, fields.dur) == (0.0, 7.4)
        assert fields.machines == ((0, 7.0), (1, 6.0), (2, 9.0), (3, 9.0), (4, 6.0))
        assert fields.rates is None
        assert not fields.makespan_hint and not fields.emission_hint

    def test_render_parse(self) -> None:
        text = render_fragment(3, 1, 2, 12.25, 4.0, ((0, 1.0), (2, 3.5)), rates=((0, 1.0), (2, 2.0)),
                               emission_hint=True)
        assert text == ("{Job 3, Op 1, 2 ops left; est_start=12.2, dur=4.0; machines=0:1.0|2:3.5; "
                        "rates=0:1.0|2:2.0; Hint: High Emission Impact}")
        fields = parse_fragment(text)
        assert fields.rates == ((0, 1.0), (2, 2.0))
        assert fields.emission_hint and not fields.makespan_hint

    @pytest.mark.parametrize("text", [
        "Job 0, Op 0",
        "{Job 0, Op 0, 5 ops left; est_start=0, dur=7.4; machines=0:7.0}",
        "{Job 0, Op 0, 5 ops left; est_start=0.0, dur=7.4; machines=}",
        FIRST_FRAGMENT + " ",
    ])
    def test_parse_invalid(self, text: str) -> None:
        with pytest.raises(ValueError):
            parse_fragment(text)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), steps=st.integers(0, 8))
    def test_every_fragment_parses(self, seed: int, steps: int) -> None:
        """Prompts of arbitrary states split back into well-formed fragments."""
        inst = generate_instance(seed, GenConfig(n_jobs=4, n_machines=3, ops_per_job_range=(2, 4)))
        state = reset(inst)
        for _ in range(steps):
            state, _ = step(state, legal_actions(state)[-1])
        record = build_state_prompt(state, options=PromptOptions(show_emission_rates=seed % 2 == 0))
        assert split_document(record.document) == list(record.fragments)
        for key, fragment in zip(record.keys, record.fragments):
            fields = parse_fragment(fragment)
            assert (fields.job_id, fields.op_index) == key
            assert fields.ops_left == inst.job_lengths[key[0]] - key[1]
