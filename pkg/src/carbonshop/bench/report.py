# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Markdown report with SVG assets, assembled from the outputs of `eval` and `sweep-lambda`."""

import csv
import io
import logging

from pathlib import Path
from typing import Sequence

from ..core.fjsp import write_text_atomic
from ..sim import gantt_svg, nice_ticks, read_schedule_csv, ScheduleEntry, SvgCanvas
from .config import EFFECTIVE_CONFIG, format_config, RunConfig
from .tables import EvalRecord, markdown_table, parse_records_csv, parse_table_csv, schedule_filename

logger = logging.getLogger(__name__)

PARETO_COLUMNS = ('lambda', 'mean_makespan', 'mean_emission')

type ParetoPoint = tuple[float, float, float]


def pareto_csv(points: Sequence[ParetoPoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(PARETO_COLUMNS)
    writer.writerows((repr(lam), repr(ms), repr(em)) for lam, ms, em in points)
    return buffer.getvalue()


def parse_pareto_csv(text: str) -> list[ParetoPoint]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != PARETO_COLUMNS:
        raise ValueError(f"Expected header {','.join(PARETO_COLUMNS)}, got {header}")
    return [(float(lam), float(ms), float(em)) for lam, ms, em in reader]


def pareto_svg(points: Sequence[ParetoPoint], title: str = "Makespan against emission") -> str:
    """Scatter plot of mean makespan (x) against mean emission (y), one labelled point per weight."""
    width, height, margin = 640.0, 480.0, 60.0
    canvas = SvgCanvas(width, height)
    canvas.text(width / 2, 20, title, size=14, anchor="middle")
    if points:
        xs = [p[1] for p in points]
        ys = [p[2] for p in points]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        x_span = (x_hi - x_lo) or 1.0
        y_span = (y_hi - y_lo) or 1.0
        plot_w, plot_h = width - 2 * margin, height - 2 * margin

        def to_x(v: float) -> float:
            return margin + 0.1 * plot_w + 0.8 * plot_w * (v - x_lo) / x_span

        def to_y(v: float) -> float:
            return height - margin - 0.1 * plot_h - 0.8 * plot_h * (v - y_lo) / y_span

        canvas.group_start("axes")
        canvas.line(margin, height - margin, width - margin, height - margin)
        canvas.line(margin, margin, margin, height - margin)
        canvas.text(width / 2, height - 15, "mean makespan", anchor="middle")
        canvas.text(15, height / 2, "mean emission", anchor="middle")
        for tick in nice_ticks(x_span, 5):
            canvas.text(to_x(x_lo + tick), height - margin + 15, f"{x_lo + tick:.1f}", anchor="middle")
        for tick in nice_ticks(y_span, 5):
            canvas.text(margin - 5, to_y(y_lo + tick) + 4, f"{y_lo + tick:.1f}", anchor="end")
        canvas.group_end()
        canvas.group_start("points")
        for lam, ms, em in points:
            canvas.circle(to_x(ms), to_y(em), 5, "#1f77b4", css_class="point")
            canvas.text(to_x(ms) + 8, to_y(em) - 6, f"λ={lam:g}")
        canvas.group_end()
    return canvas.document()


def _machine_count(entries: Sequence[ScheduleEntry]) -> int:
    return max((e.machine_id for e in entries), default=0) + 1


def _by_makespan(record: EvalRecord) -> tuple[float, str, int]:
    return record.makespan, record.instance, record.run


def _extremes(records: Sequence[EvalRecord], method: str) -> tuple[EvalRecord, EvalRecord]:
    mine = [r for r in records if r.method == method]
    return min(mine, key=_by_makespan), max(mine, key=_by_makespan)


def build_report(cfg: RunConfig, dest: Path) -> Path:
    """Write `report.md` and its assets into `dest`.

    The result table, the schedules with the lowest and the highest makespan of the first method,
    and their Gantt charts come from `cfg.eval_dir`; the weight sweep and its scatter plot from
    `cfg.sweep_dir`. Either input may be omitted, not both.

    Raises:
        ValueError: If neither input directory is set.
        FileNotFoundError: If an expected input file is missing.
    """
    if not cfg.eval_dir and not cfg.sweep_dir:
        raise ValueError("The report needs eval_dir, sweep_dir, or both")
    assets = dest / "assets"
    sections = ["# carbonshop report\n"]

    if cfg.eval_dir:
        eval_dir = Path(cfg.eval_dir)
        table = parse_table_csv(_read(eval_dir / "results.csv"))
        records = parse_records_csv(_read(eval_dir / "records.csv"))
        sections.append("## Results\n\n" + markdown_table(table))
        if table.rows:
            method = table.rows[0].method
            lines = [f"## Schedules of {method}\n"]
            for label, record in zip(("best", "worst"), _extremes(records, method)):
                source = eval_dir / "schedules" / schedule_filename(record.method, record.run, record.instance)
                entries = read_schedule_csv(_existing(source))
                name = f"gantt-{label}.svg"
                title = f"{label}: {record.instance} (run {record.run}), makespan {record.makespan:.2f}"
                write_text_atomic(assets / name, gantt_svg(entries, _machine_count(entries), title))
                logger.info(f"Wrote {assets / name}")
                lines.append(f"![{label} schedule](assets/{name})\n")
            sections.append("\n".join(lines))
        if (eval_dir / EFFECTIVE_CONFIG).is_file():
            sections.append("## Evaluation configuration\n\n```\n" + _read(eval_dir / EFFECTIVE_CONFIG) + "```\n")

    if cfg.sweep_dir:
        points = parse_pareto_csv(_read(Path(cfg.sweep_dir) / "pareto.csv"))
        write_text_atomic(assets / "pareto.svg", pareto_svg(points))
        logger.info(f"Wrote {assets / 'pareto.svg'}")
        rows = "\n".join(f"| {lam:g} | {ms:.2f} | {em:.2f} |" for lam, ms, em in points)
        sections.append("## Weight sweep\n\n| λ | makespan | emission |\n|---:|---:|---:|\n" + rows + "\n\n"
                        "![Pareto scatter](assets/pareto.svg)\n")

    sections.append("## Report configuration\n\n```\n" + format_config(cfg) + "```\n")
    report = dest / "report.md"
    write_text_atomic(report, "\n".join(sections))
    return report


def _existing(path: Path) -> Path:
    if not path.is_file():
        raise FileNotFoundError(f"Report input not found: {path}")
    return path


def _read(path: Path) -> str:
    return _existing(path).read_text(encoding='utf-8')
