# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Schedule exports: Gantt charts (SVG 1.1) and schedule CSV files.

Schedule CSV columns are `job,op,machine,start,end,emission`, one row per scheduled operation in
decision order. Numbers are written with `repr`, so reading a file back yields the same floats.
"""

import csv
import io

from pathlib import Path
from typing import Iterable, Sequence

from .state import ScheduleEntry, State
from .svg import nice_ticks, SvgCanvas

SCHEDULE_COLUMNS = ('job', 'op', 'machine', 'start', 'end', 'emission')

_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)

_LEFT = 60.0
_TOP = 30.0
_ROW = 28.0
_PLOT_WIDTH = 800.0


def job_color(job_id: int) -> str:
    return _PALETTE[job_id % len(_PALETTE)]


def gantt_svg(entries: Sequence[ScheduleEntry], n_machines: int, title: str = "") -> str:
    """Render scheduled operations as a Gantt chart.

    The chart has one row per machine, one labelled box per entry and a time axis. An empty
    schedule renders the axes only.

    Args:
        entries: The scheduled operations.
        n_machines: The number of machine rows.
        title: Optional caption drawn above the chart.

    Returns:
        The SVG document.
    """
    horizon = max((e.end for e in entries), default=0.0)
    scale = _PLOT_WIDTH / horizon if horizon > 0 else 1.0
    height = _TOP + n_machines * _ROW + 40.0
    canvas = SvgCanvas(_LEFT + _PLOT_WIDTH + 20.0, height)
    if title:
        canvas.text(_LEFT, 18.0, title, size=12)

    axis_y = _TOP + n_machines * _ROW
    canvas.group_start("axes")
    canvas.line(_LEFT, _TOP, _LEFT, axis_y)
    canvas.line(_LEFT, axis_y, _LEFT + _PLOT_WIDTH, axis_y)
    for m in range(n_machines):
        canvas.text(_LEFT - 8.0, _TOP + m * _ROW + _ROW * 0.6, f"M{m}", anchor="end")
    for tick in nice_ticks(horizon):
        x = _LEFT + tick * scale
        canvas.line(x, axis_y, x, axis_y + 4.0)
        canvas.text(x, axis_y + 16.0, f"{tick:g}", size=9, anchor="middle")
    canvas.group_end()

    canvas.group_start("operations")
    for e in entries:
        x = _LEFT + e.start * scale
        y = _TOP + e.machine_id * _ROW + 3.0
        width = (e.end - e.start) * scale
        canvas.rect(x, y, width, _ROW - 6.0, job_color(e.job_id), css_class="op")
        canvas.text(x + width / 2, y + _ROW / 2, f"{e.job_id}.{e.op_index}", size=9, anchor="middle")
    canvas.group_end()
    return canvas.document()


def export_gantt(state: State, title: str = "") -> str:
    """Render the (partial) schedule of a state as a Gantt chart."""
    return gantt_svg(state.entries, state.instance.n_machines, title or state.instance.name)


def schedule_csv(entries: Iterable[ScheduleEntry]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(SCHEDULE_COLUMNS)
    for e in entries:
        writer.writerow((e.job_id, e.op_index, e.machine_id, repr(e.start), repr(e.end), repr(e.emission)))
    return buffer.getvalue()


def parse_schedule_csv(text: str) -> list[ScheduleEntry]:
    """Read schedule entries back from `schedule_csv` output.

    Raises:
        ValueError: If the header does not match the schedule columns.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != SCHEDULE_COLUMNS:
        raise ValueError(f"Expected schedule header {','.join(SCHEDULE_COLUMNS)}, got {header}")
    return [
        ScheduleEntry(int(job), int(op), int(machine), float(start), float(end), float(emission))
        for job, op, machine, start, end, emission in reader
    ]


def read_schedule_csv(path: Path | str) -> list[ScheduleEntry]:
    return parse_schedule_csv(Path(path).read_text(encoding='utf-8'))
