# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the FJSP text format, emission sidecars and manifests."""

from pathlib import Path

import pytest

from hypothesis import given, settings
from hypothesis import strategies as st

from carbonshop.core import (FjspParseError, GenConfig, generate_instance, Instance, load_instance, load_manifest,
                             parse_emissions, parse_fjsp, read_manifest, save_instance, serialize_emissions,
                             serialize_fjsp, write_manifest)
from carbonshop.core.fjsp import sidecar_path

BRANDIMARTE_LIKE = """\
2 3 1.5
2 2 1 5 3 4 1 2 6
1 3 1 1 2 2 3 3
"""


class TestParse:
    """Test suite for parsing FJSP documents."""

    def test_parse_document(self) -> None:
        """Machine ids become 0-based and the flexibility token is ignored."""
        inst = parse_fjsp(BRANDIMARTE_LIKE, name="mk")
        assert inst.name == "mk"
        assert inst.n_jobs == 2 and inst.n_machines == 3
        assert inst.jobs[0][0].alternatives == ((0, 5.0), (2, 4.0))
        assert inst.jobs[0][1].alternatives == ((1, 6.0),)
        assert inst.jobs[1][0].alternatives == ((0, 1.0), (1, 2.0), (2, 3.0))
        assert inst.emission_rates == (1.0, 1.0, 1.0)

    def test_parse_minimal(self) -> None:
        inst = parse_fjsp("1 1\n1 1 1 3\n")
        assert inst.n_ops == 1
        assert inst.jobs[0][0].time_on(0) == 3.0

    @pytest.mark.parametrize("text, line", [
        ("", 1),
        ("2\n", 1),
        ("x 2\n", 1),
        ("1 2\n1 1 3 4\n", 2),
        ("1 2\n2 1 1 4\n", 2),
        ("2 2\n1 1 1 4\n", 3),
        ("1 2\n1 1 1 0\n", 2),
        ("1 2\n1 2 1 4 1 5\n", 2),
        ("1 2\n1 1 1 4 7\n", 2),
    ])
    def test_parse_errors(self, text: str, line: int) -> None:
        """Malformed documents report the offending line."""
        with pytest.raises(FjspParseError) as info:
            parse_fjsp(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_parse_error_is_value_error(self) -> None:
        with pytest.raises(ValueError):
            parse_fjsp("1 2\n1 1 9 4\n")


class TestSerialize:
    """Test suite for serialization and round trips."""

    def test_serialize(self, tiny_instance: Instance) -> None:
        assert serialize_fjsp(tiny_instance) == "2 2\n2 2 1 3.0 2 5.0 1 2 2.0\n2 1 1 4.0 2 1 1.0 2 2.0\n"
        assert serialize_emissions(tiny_instance) == "2.0 1.0\n"

    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_parse_serialize_identity(self, seed: int) -> None:
        """Serializing a generated instance and parsing it back gives the same instance."""
        inst = generate_instance(seed, GenConfig(n_jobs=4, n_machines=3, flexibility=0.6))
        text = serialize_fjsp(inst)
        parsed = parse_fjsp(text, name=inst.name).with_emission_rates(parse_emissions(serialize_emissions(inst)))
        assert parsed == inst
        assert serialize_fjsp(parsed) == text

    def test_parse_emissions_errors(self) -> None:
        with pytest.raises(FjspParseError):
            parse_emissions("1.0 -2.0\n")
        with pytest.raises(FjspParseError):
            parse_emissions("1.0 2.0\n", n_machines=3)
        with pytest.raises(FjspParseError):
            parse_emissions("1.0 abc\n")


class TestFiles:
    """Test suite for instance files, sidecars and manifests."""

    def test_save_and_load(self, tiny_instance: Instance, tmp_path: Path) -> None:
        path = save_instance(tiny_instance, tmp_path / "tiny.fjsp")
        assert sidecar_path(path).read_text() == "2.0 1.0\n"
        loaded = load_instance(path)
        assert loaded == tiny_instance
        assert loaded.provenance is not None

    def test_load_without_sidecar(self, tmp_path: Path) -> None:
        path = tmp_path / "mk01.fjsp"
        path.write_text(BRANDIMARTE_LIKE)
        assert load_instance(path).emission_rates == (1.0, 1.0, 1.0)

    def test_load_missing(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError):
            load_instance(tmp_path / "missing.fjsp")

    def test_manifest(self, small_instances: list[Instance], tmp_path: Path) -> None:
        """Manifest paths are relative to the manifest and resolve back to the instances."""
        paths = [save_instance(inst, tmp_path / "instances" / f"{inst.name}.fjsp") for inst in small_instances[:3]]
        manifest = write_manifest(paths, tmp_path / "test.txt")
        assert manifest.read_text().splitlines()[0] == f"instances/{small_instances[0].name}.fjsp"
        assert [p.resolve() for p in read_manifest(manifest)] == [p.resolve() for p in paths]
        assert load_manifest(manifest) == small_instances[:3]
        with pytest.raises(FileNotFoundError):
            read_manifest(tmp_path / "none.txt")
