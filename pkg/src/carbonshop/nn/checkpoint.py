# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Versioned text checkpoints.

Layout:
  Line 1: `luca-ckpt v1`
  Metadata lines: `# key=value`
  For each array: a line `name rows cols`, then `rows` lines of `cols` space-separated values.

Values are written with `repr`, which reads back to the identical float. Vectors are stored as a
single row and take their shape back from a template when loading.
"""

import logging

from pathlib import Path
from typing import Mapping, Optional

import numpy as np

from ..core.fjsp import write_text_atomic
from .dense import Params
from .functional import ShapeError

logger = logging.getLogger(__name__)

HEADER = "luca-ckpt v1"


class CheckpointError(ValueError):
    """Raised when a checkpoint document is malformed."""


def format_checkpoint(params: Mapping[str, np.ndarray], meta: Optional[Mapping[str, str]] = None) -> str:
    lines = [HEADER]
    for key, value in (meta or {}).items():
        if '\n' in f"{key}{value}" or '=' in key:
            raise ValueError(f"Invalid metadata entry {key!r}")
        lines.append(f"# {key}={value}")
    for name, array in params.items():
        if not name or any(c.isspace() for c in name):
            raise ValueError(f"Invalid array name {name!r}")
        matrix = np.atleast_2d(np.asarray(array, dtype=np.float64))
        if matrix.ndim != 2:
            raise ShapeError(f"Array {name} has {matrix.ndim} dimensions, checkpoints hold matrices and vectors")
        rows, cols = matrix.shape
        lines.append(f"{name} {rows} {cols}")
        lines.extend(' '.join(repr(float(x)) for x in row) for row in matrix)
    return '\n'.join(lines) + '\n'


def parse_checkpoint(text: str) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Read a checkpoint document.

    Returns:
        The arrays, all two-dimensional, and the metadata.

    Raises:
        CheckpointError: If the header is missing, an array is truncated or a value is not a number.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise CheckpointError(f"Missing checkpoint header '{HEADER}'")
    meta: dict[str, str] = {}
    arrays: dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line:
            continue
        if line.startswith('#'):
            key, _, value = line[1:].strip().partition('=')
            meta[key] = value
            continue
        try:
            name, rows, cols = line.split()
            rows, cols = int(rows), int(cols)
        except ValueError:
            raise CheckpointError(f"line {i}: expected 'name rows cols', got {line!r}") from None
        if i + rows > len(lines):
            raise CheckpointError(f"Array {name} is truncated")
        values = []
        for r in range(rows):
            try:
                row = [float(x) for x in lines[i + r].split()]
            except ValueError:
                raise CheckpointError(f"line {i + r + 1}: array {name} holds a non-numeric value") from None
            if len(row) != cols:
                raise CheckpointError(f"line {i + r + 1}: array {name} expects {cols} values, got {len(row)}")
            values.append(row)
        i += rows
        arrays[name] = np.array(values, dtype=np.float64).reshape(rows, cols)
    return arrays, meta


def save_checkpoint(path: Path, params: Mapping[str, np.ndarray], meta: Optional[Mapping[str, str]] = None) -> Path:
    """Write a checkpoint atomically and return its path."""
    path = Path(path)
    write_text_atomic(path, format_checkpoint(params, meta))
    logger.info(f"Saved checkpoint {path}")
    return path


def load_checkpoint(path: Path, template: Optional[Params] = None) -> tuple[Params, dict[str, str]]:
    """Read a checkpoint file.

    Args:
        path: The checkpoint file.
        template: Parameters whose names and shapes the loaded arrays must match; vectors take
            their shape from it. Without a template every array is returned as a matrix.

    Raises:
        FileNotFoundError: If the file does not exist.
        CheckpointError: If the document is malformed.
        ShapeError: If the arrays do not match the template.
    """
    arrays, meta = parse_checkpoint(Path(path).read_text(encoding='utf-8'))
    if template is None:
        return arrays, meta
    if arrays.keys() != template.keys():
        raise ShapeError(f"Checkpoint arrays {sorted(arrays)} do not match expected {sorted(template)}")
    params = {}
    for name, expected in template.items():
        if arrays[name].size != expected.size:
            raise ShapeError(f"Array {name} has {arrays[name].size} values, expected shape {expected.shape}")
        params[name] = arrays[name].reshape(expected.shape)
    return params, meta
