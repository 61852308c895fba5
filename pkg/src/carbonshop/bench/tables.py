# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Result tables of the evaluation commands.

Every evaluated schedule is an `EvalRecord`. A `ResultTable` aggregates the records per method
into the mean and the (population) standard deviation of both objectives, and, when the oracle
proved the optimal makespan of every instance, the mean approximation ratio to that optimum.
"""

import csv
import io
import math

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Self, Sequence

import numpy as np

RECORD_COLUMNS = ('method', 'run', 'instance', 'makespan', 'emission')
TABLE_COLUMNS = ('method', 'mean_makespan', 'std_makespan', 'mean_emission', 'std_emission', 'approx')
IMPROVEMENT_COLUMNS = ('base', 'ours', 'makespan_improvement', 'emission_improvement')


@dataclass(frozen=True, order=True)
class EvalRecord:
    method: str
    run: int
    instance: str
    makespan: float
    emission: float


@dataclass(frozen=True)
class ResultRow:
    """Aggregated results of one method.

    Attributes:
        method: The method name.
        mean_makespan, std_makespan: Makespan statistics over all records of the method.
        mean_emission, std_emission: Emission statistics over all records of the method.
        approx: Mean ratio of the makespan to the proven optimal makespan, or None.
    """
    method: str
    mean_makespan: float
    std_makespan: float
    mean_emission: float
    std_emission: float
    approx: Optional[float] = None

    def __post_init__(self) -> None:
        if self.std_makespan < 0 or self.std_emission < 0:
            raise ValueError(f"Standard deviations of {self.method} must be non-negative")


def improvement(base: float, ours: float) -> float:
    """Relative improvement `(base - ours) / base`; positive when `ours` is lower.

    Raises:
        ValueError: If `base` is zero.
    """
    if base == 0:
        raise ValueError("The improvement over a zero baseline is undefined")
    return (base - ours) / base


@dataclass(frozen=True)
class ResultTable:
    """One row per method, in order of first appearance."""
    rows: tuple[ResultRow, ...]

    @classmethod
    def from_records(cls, records: Iterable[EvalRecord],
                     optimal_makespans: Optional[Mapping[str, float]] = None) -> Self:
        """Aggregate records per method.

        Args:
            records: The evaluated schedules.
            optimal_makespans: Proven optimal makespans by instance name. The approximation column is
                only filled when every record's instance has one.
        """
        by_method: dict[str, list[EvalRecord]] = {}
        for record in records:
            by_method.setdefault(record.method, []).append(record)
        rows = []
        for method, recs in by_method.items():
            makespans = np.array([r.makespan for r in recs])
            emissions = np.array([r.emission for r in recs])
            approx = None
            if optimal_makespans is not None and all(r.instance in optimal_makespans for r in recs):
                approx = math.fsum(r.makespan / optimal_makespans[r.instance] for r in recs) / len(recs)
            rows.append(ResultRow(method, float(makespans.mean()), float(makespans.std()),
                                  float(emissions.mean()), float(emissions.std()), approx))
        return cls(tuple(rows))

    def row(self, method: str) -> ResultRow:
        for row in self.rows:
            if row.method == method:
                return row
        raise KeyError(method)

    @property
    def methods(self) -> list[str]:
        return [row.method for row in self.rows]

    def improvements(self) -> list[tuple[str, str, float, float]]:
        """`(base, ours, makespan improvement, emission improvement)` for every ordered pair of methods."""
        return [(base.method, ours.method, improvement(base.mean_makespan, ours.mean_makespan),
                 improvement(base.mean_emission, ours.mean_emission))
                for base in self.rows for ours in self.rows]


def _csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def records_csv(records: Iterable[EvalRecord]) -> str:
    return _csv(RECORD_COLUMNS, ((r.method, r.run, r.instance, repr(r.makespan), repr(r.emission)) for r in records))


def parse_records_csv(text: str) -> list[EvalRecord]:
    """Read records written by `records_csv`.

    Raises:
        ValueError: If the header differs from the record columns.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != RECORD_COLUMNS:
        raise ValueError(f"Expected header {','.join(RECORD_COLUMNS)}, got {header}")
    return [EvalRecord(m, int(run), inst, float(ms), float(em)) for m, run, inst, ms, em in reader]


def table_csv(table: ResultTable) -> str:
    return _csv(TABLE_COLUMNS, ((r.method, repr(r.mean_makespan), repr(r.std_makespan), repr(r.mean_emission),
                                 repr(r.std_emission), '' if r.approx is None else repr(r.approx))
                                for r in table.rows))


def parse_table_csv(text: str) -> ResultTable:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != TABLE_COLUMNS:
        raise ValueError(f"Expected header {','.join(TABLE_COLUMNS)}, got {header}")
    return ResultTable(tuple(ResultRow(m, float(a), float(b), float(c), float(d), float(e) if e else None)
                             for m, a, b, c, d, e in reader))


def improvements_csv(table: ResultTable) -> str:
    return _csv(IMPROVEMENT_COLUMNS, ((b, o, repr(ms), repr(ce)) for b, o, ms, ce in table.improvements()))


def format_table(table: ResultTable) -> str:
    """Render a table as aligned text."""
    header = ("method", "makespan", "std", "emission", "std", "approx")
    lines = [header]
    for r in table.rows:
        approx = "-" if r.approx is None else f"{r.approx:.4f}"
        lines.append((r.method, f"{r.mean_makespan:.2f}", f"{r.std_makespan:.2f}", f"{r.mean_emission:.2f}",
                      f"{r.std_emission:.2f}", approx))
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return ''.join('  '.join(cell.ljust(w) if i == 0 else cell.rjust(w)
                             for i, (cell, w) in enumerate(zip(line, widths))).rstrip() + '\n'
                   for line in lines)


def markdown_table(table: ResultTable) -> str:
    lines = ["| method | makespan | std | emission | std | approx |", "|---|---:|---:|---:|---:|---:|"]
    for r in table.rows:
        approx = "-" if r.approx is None else f"{r.approx:.4f}"
        lines.append(f"| {r.method} | {r.mean_makespan:.2f} | {r.std_makespan:.2f} | {r.mean_emission:.2f} "
                     f"| {r.std_emission:.2f} | {approx} |")
    return '\n'.join(lines) + '\n'


def schedule_filename(method: str, run: int, instance: str) -> str:
    """File name of the schedule CSV of one evaluated record."""
    return f"{method}-r{run:02d}-{instance}.csv"
