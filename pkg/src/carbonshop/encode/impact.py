# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Feedback memory of per-operation impacts.

During training every scheduled operation logs its makespan impact (the increase of the makespan
lower bound) and its emission impact (`p·e`). Every `n_l` iterations the logs of the window are
averaged per operation, compared with thresholds, and turned into the hints shown in the prompts.
"""

import math

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Optional, Self, Sequence


@dataclass(frozen=True)
class ImpactConfig:
    """How hints are derived.

    Attributes:
        n_l: Refresh period, in iterations. Defaults to 20.
        quantile: Percentile rule for both thresholds when no fixed value is given. Defaults to 0.75.
        fixed_ms: Fixed makespan threshold, or None for the percentile rule.
        fixed_ce: Fixed emission threshold, or None for the percentile rule.
    """
    n_l: int = 20
    quantile: float = 0.75
    fixed_ms: Optional[float] = None
    fixed_ce: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n_l < 1:
            raise ValueError("The refresh period must be at least 1")
        if not 0.0 <= self.quantile <= 1.0:
            raise ValueError("The quantile must lie in [0, 1]")


@dataclass(frozen=True)
class ImpactLog:
    """One logged impact of an operation."""
    iteration: int
    makespan_impact: float
    emission_impact: float


@dataclass(frozen=True)
class HintFlags:
    makespan: bool = False
    emission: bool = False


def percentile_threshold(values: Sequence[float], quantile: float) -> float:
    """Threshold above which exactly `ceil((1 - quantile) * n)` distinct values lie.

    The threshold is the largest value that is not flagged, or minus infinity when every value is.
    """
    n = len(values)
    if n == 0:
        return math.inf
    flagged = math.ceil(round((1.0 - quantile) * n, 9))
    index = n - flagged - 1
    return sorted(values)[index] if index >= 0 else -math.inf


@dataclass
class ImpactStore:
    """Per-operation impact logs, window averages and hint flags.

    Keys identify operations and can be any hashable value; the trainer uses
    `(instance name, job id, op index)`.

    Attributes:
        config: How thresholds and refreshes work.
        logs: The impacts logged since the last refresh.
        averages: The window averages `(δ_ms, δ_ce)` computed at the last refresh.
        flags: The hint flags computed at the last refresh.
        tau_ms: The makespan threshold of the last refresh.
        tau_ce: The emission threshold of the last refresh.
    """
    config: ImpactConfig = field(default_factory=ImpactConfig)
    logs: dict[Hashable, list[ImpactLog]] = field(default_factory=lambda: defaultdict(list))
    averages: dict[Hashable, tuple[float, float]] = field(default_factory=dict)
    flags: dict[Hashable, HintFlags] = field(default_factory=dict)
    tau_ms: float = math.inf
    tau_ce: float = math.inf
    refreshes: int = 0

    def record_impact(self, op_key: Hashable, d_ms: float, d_ce: float, iteration: int) -> Self:
        """Append an impact to the log of an operation."""
        self.logs[op_key].append(ImpactLog(iteration, float(d_ms), float(d_ce)))
        return self

    def entries(self, op_key: Hashable) -> list[ImpactLog]:
        return list(self.logs.get(op_key, ()))

    def window_averages(self) -> dict[Hashable, tuple[float, float]]:
        """Mean impacts of every operation logged in the current window."""
        return {
            key: (math.fsum(e.makespan_impact for e in logs) / len(logs),
                  math.fsum(e.emission_impact for e in logs) / len(logs))
            for key, logs in self.logs.items() if logs
        }

    def is_refresh_due(self, iteration: int) -> bool:
        return iteration % self.config.n_l == 0

    def refresh_hints(self) -> Self:
        """Recompute averages, thresholds and flags from the window, then start a new window.

        An operation is flagged when its average impact is strictly above the threshold.
        Operations absent from the window lose their flags.
        """
        averages = self.window_averages()
        ms = [a for a, _ in averages.values()]
        ce = [c for _, c in averages.values()]
        cfg = self.config
        self.tau_ms = cfg.fixed_ms if cfg.fixed_ms is not None else percentile_threshold(ms, cfg.quantile)
        self.tau_ce = cfg.fixed_ce if cfg.fixed_ce is not None else percentile_threshold(ce, cfg.quantile)
        self.averages = averages
        self.flags = {key: HintFlags(d_ms > self.tau_ms, d_ce > self.tau_ce) for key, (d_ms, d_ce) in averages.items()}
        self.logs = defaultdict(list)
        self.refreshes += 1
        return self

    def hints_for(self, op_key: Hashable) -> HintFlags:
        return self.flags.get(op_key, HintFlags())

    def feedback_lines(self, op_ids: Optional[dict[Hashable, int]] = None) -> list[str]:
        """Render the current window logs as feedback text, one line per entry.

        Args:
            op_ids: Optional mapping from keys to the numeric ids to print; keys are printed as is otherwise.
        """
        lines = []
        for key, logs in self.logs.items():
            label = op_ids[key] if op_ids is not None and key in op_ids else key
            lines.extend(f"op_id: {label}, makespan_impact: {e.makespan_impact:.1f}, "
                         f"emission_impact: {e.emission_impact:.1f}" for e in logs)
        return lines


def op_key(instance_name: str, job_id: int, op_index: int) -> tuple[str, int, int]:
    """The key under which the trainer logs the impacts of an operation."""
    return (instance_name, job_id, op_index)
