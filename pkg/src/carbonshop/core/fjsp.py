# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Reading and writing the standard FJSP text format (Brandimarte / Hurink / Behnke-Geiger files).

Format:
  Line 1: `n_jobs n_machines [avg_flexibility]` (the optional third token is ignored)
  One line per job: `k` then, for each of the k operations, `a` followed by `a` pairs
  `machine_id processing_time`. Machine ids are 1-based in files and 0-based in memory.

The public benchmarks carry no emission rates. They live in a sidecar file `<name>.em` holding one
line of per-machine rates, machine 0 first.
"""

import logging
import os
import tempfile

from pathlib import Path
from typing import Iterable, Optional

from .instance import Instance, OperationSpec, Parsed

logger = logging.getLogger(__name__)

SIDECAR_SUFFIX = ".em"


class FjspParseError(ValueError):
    """Raised when an FJSP document is malformed.

    Attributes:
        line: The 1-based line number where the problem was detected.
    """
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


def format_number(value: float) -> str:
    """Canonical rendering of a number: the shortest text that reads back to the same float."""
    return repr(float(value))


def _number(token: str, line: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise FjspParseError(line, f"expected a number for {what}, got {token!r}") from None


def _integer(token: str, line: int, what: str) -> int:
    try:
        value = float(token)
    except ValueError:
        raise FjspParseError(line, f"expected an integer for {what}, got {token!r}") from None
    if not value.is_integer():
        raise FjspParseError(line, f"expected an integer for {what}, got {token!r}")
    return int(value)


def parse_fjsp(text: str, name: str = "instance", path: Optional[str] = None) -> Instance:
    """Parse an FJSP document.

    All machines get a unit emission rate; use `attach_emissions` or a sidecar to set real rates.

    Args:
        text: The document content.
        name: The instance name.
        path: The source path, recorded as provenance when given.

    Returns:
        The parsed instance.

    Raises:
        FjspParseError: If the header is malformed, a machine id is out of range, an operation list
            is truncated, or the body holds fewer jobs than the header declares.
    """
    lines = [(number, raw.split()) for number, raw in enumerate(text.splitlines(), start=1) if raw.strip()]
    if not lines:
        raise FjspParseError(1, "empty document, expected header 'n_jobs n_machines'")
    header_line, header = lines[0]
    if len(header) < 2:
        raise FjspParseError(header_line, "header must contain at least n_jobs and n_machines")
    n_jobs = _integer(header[0], header_line, "n_jobs")
    n_machines = _integer(header[1], header_line, "n_machines")
    if n_jobs < 1 or n_machines < 1:
        raise FjspParseError(header_line, "n_jobs and n_machines must be positive")

    body = lines[1:]
    jobs: list[tuple[OperationSpec, ...]] = []
    for j in range(n_jobs):
        if j >= len(body):
            last = body[-1][0] if body else header_line
            raise FjspParseError(last + 1, f"missing job {j}: header declares {n_jobs} jobs, found {len(body)}")
        line, tokens = body[j]
        n_ops = _integer(tokens[0], line, f"operation count of job {j}")
        if n_ops < 1:
            raise FjspParseError(line, f"job {j} must have at least one operation")
        cursor = 1
        ops = []
        for k in range(n_ops):
            if cursor >= len(tokens):
                raise FjspParseError(line, f"truncated operation list: job {j} stops before op {k}")
            n_alts = _integer(tokens[cursor], line, f"machine count of job {j}, op {k}")
            cursor += 1
            if n_alts < 1:
                raise FjspParseError(line, f"job {j}, op {k} has no eligible machine")
            if cursor + 2 * n_alts > len(tokens):
                raise FjspParseError(line, f"truncated operation list: job {j}, op {k} declares {n_alts} machines")
            alternatives = {}
            for _ in range(n_alts):
                machine = _integer(tokens[cursor], line, f"machine id of job {j}, op {k}")
                time = _number(tokens[cursor + 1], line, f"processing time of job {j}, op {k}")
                cursor += 2
                if not 1 <= machine <= n_machines:
                    raise FjspParseError(line, f"machine id {machine} out of range 1..{n_machines} in job {j}, op {k}")
                if time <= 0:
                    raise FjspParseError(line, f"processing time {time} of job {j}, op {k} must be positive")
                if machine - 1 in alternatives:
                    raise FjspParseError(line, f"machine id {machine} listed twice in job {j}, op {k}")
                alternatives[machine - 1] = time
            ops.append(OperationSpec(j, k, alternatives))
        if cursor != len(tokens):
            raise FjspParseError(line, f"{len(tokens) - cursor} unexpected trailing tokens after job {j}")
        jobs.append(tuple(ops))
    if len(body) > n_jobs:
        logger.warning("Ignoring %d lines after the %d declared jobs of %s", len(body) - n_jobs, n_jobs, name)

    return Instance.build(
        name=name,
        jobs=[[dict(op.alternatives) for op in ops] for ops in jobs],
        n_machines=n_machines,
        provenance=Parsed(path) if path is not None else None,
    )


def serialize_fjsp(inst: Instance) -> str:
    """Render an instance in the FJSP format, alternatives in ascending machine order.

    Emission rates are not part of the format; see `serialize_emissions`.
    """
    lines = [f"{inst.n_jobs} {inst.n_machines}"]
    for ops in inst.jobs:
        tokens = [str(len(ops))]
        for op in ops:
            tokens.append(str(len(op.alternatives)))
            for m, p in op.alternatives:
                tokens.extend((str(m + 1), format_number(p)))
        lines.append(" ".join(tokens))
    return "\n".join(lines) + "\n"


def serialize_emissions(inst: Instance) -> str:
    """Render the emission sidecar: one line of per-machine rates, machine 0 first."""
    return " ".join(format_number(e) for e in inst.emission_rates) + "\n"


def parse_emissions(text: str, n_machines: Optional[int] = None) -> tuple[float, ...]:
    """Parse an emission sidecar document.

    Raises:
        FjspParseError: If a value is not a positive number or the count does not match `n_machines`.
    """
    tokens = text.split()
    rates = tuple(_number(token, 1, "emission rate") for token in tokens)
    if any(rate <= 0 for rate in rates):
        raise FjspParseError(1, "emission rates must be positive")
    if n_machines is not None and len(rates) != n_machines:
        raise FjspParseError(1, f"expected {n_machines} emission rates, got {len(rates)}")
    return rates


def sidecar_path(path: Path) -> Path:
    return path.with_suffix(SIDECAR_SUFFIX)


def write_text_atomic(path: Path, content: str) -> None:
    """Write a file through a temporary sibling and an atomic rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def save_instance(inst: Instance, path: Path) -> Path:
    """Write the instance file and its emission sidecar. Returns the instance file path."""
    path = Path(path)
    write_text_atomic(path, serialize_fjsp(inst))
    write_text_atomic(sidecar_path(path), serialize_emissions(inst))
    return path


def load_instance(path: Path, name: Optional[str] = None) -> Instance:
    """Read an instance file, with emission rates from its sidecar when one exists.

    Raises:
        FileNotFoundError: If the instance file does not exist.
        FjspParseError: If the file or its sidecar is malformed.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"FJSP instance not found: {path}")
    inst = parse_fjsp(path.read_text(encoding="ascii"), name=name or path.stem, path=str(path))
    em = sidecar_path(path)
    if em.is_file():
        inst = inst.with_emission_rates(parse_emissions(em.read_text(encoding="ascii"), inst.n_machines))
    return inst


def write_manifest(paths: Iterable[Path], manifest: Path) -> Path:
    """Write a dataset manifest: one instance path per line, relative to the manifest directory."""
    manifest = Path(manifest)
    root = manifest.parent.resolve()
    lines = [Path(os.path.relpath(Path(p).resolve(), root)).as_posix() for p in paths]
    write_text_atomic(manifest, "".join(f"{line}\n" for line in lines))
    return manifest


def read_manifest(manifest: Path) -> list[Path]:
    """Read a dataset manifest and return the absolute instance paths it lists."""
    manifest = Path(manifest)
    if not manifest.is_file():
        raise FileNotFoundError(f"Dataset manifest not found: {manifest}")
    root = manifest.parent
    return [root / line.strip() for line in manifest.read_text(encoding="ascii").splitlines() if line.strip()]


def load_manifest(manifest: Path) -> list[Instance]:
    """Load every instance listed in a manifest."""
    return [load_instance(path) for path in read_manifest(manifest)]
