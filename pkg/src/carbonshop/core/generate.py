# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Synthetic instance generation and emission-rate assignment."""

import dataclasses

from dataclasses import dataclass
from typing import Optional, Self, Sequence

import numpy as np

from .instance import Instance, MachineProfile, OperationSpec, Synthetic


@dataclass(frozen=True)
class GenConfig:
    """Parameters of the synthetic instance generator.

    The default time and length ranges are a calibration choice: they put the mean makespan of
    10x5 instances under the dispatching rules roughly in the 95-130 band. They are not taken from
    any published generator.

    Attributes:
        n_jobs: Number of jobs. Defaults to 10.
        n_machines: Number of machines. Defaults to 5.
        ops_per_job_range: Inclusive range of the number of operations per job. Defaults to (4, 6).
        proc_time_range: Range of the processing times, sampled uniformly. Defaults to (1.0, 20.0).
        flexibility: Expected share of machines eligible for an operation, in (0, 1]. Defaults to 0.5.
        e_min: Lower bound of the emission rates. Defaults to 1.0.
        e_max: Upper bound of the emission rates. Defaults to 2.0.
    """
    n_jobs: int = 10
    n_machines: int = 5
    ops_per_job_range: tuple[int, int] = (4, 6)
    proc_time_range: tuple[float, float] = (1.0, 20.0)
    flexibility: float = 0.5
    e_min: float = 1.0
    e_max: float = 2.0

    def __post_init__(self) -> None:
        if self.n_jobs < 1 or self.n_machines < 1:
            raise ValueError("The generator needs at least one job and one machine.")
        lo, hi = self.ops_per_job_range
        if lo < 1 or hi < lo:
            raise ValueError(f"Invalid ops_per_job_range {self.ops_per_job_range}.")
        t_lo, t_hi = self.proc_time_range
        if t_lo <= 0 or t_hi < t_lo:
            raise ValueError(f"Invalid proc_time_range {self.proc_time_range}.")
        if not 0 < self.flexibility <= 1:
            raise ValueError("Flexibility must lie in (0, 1].")
        if self.e_min <= 0 or self.e_max < self.e_min:
            raise ValueError(f"Invalid emission range [{self.e_min}, {self.e_max}].")

    def cloned_with(self, **kwargs: object) -> Self:
        """Create a copy of this configuration with updated attributes."""
        return dataclasses.replace(self, **kwargs)


def _round_tenth(value: float, lo: float, hi: float) -> float:
    return float(min(max(round(value, 1), lo), hi))


def sample_emission_rates(seed: int, n_machines: int, e_min: float, e_max: float) -> tuple[float, ...]:
    """Draw per-machine emission rates uniformly in `[e_min, e_max]`, rounded to 0.1.

    Rounded values are clamped back into the range, so every rate stays within the bounds and
    `e_min == e_max` yields that exact value for every machine.
    """
    if e_min <= 0 or e_max < e_min:
        raise ValueError(f"Invalid emission range [{e_min}, {e_max}].")
    rng = np.random.default_rng(seed)
    return tuple(_round_tenth(float(x), e_min, e_max) for x in rng.uniform(e_min, e_max, size=n_machines))


def generate_instance(seed: int, cfg: GenConfig = GenConfig(), name: Optional[str] = None) -> Instance:
    """Generate a random instance, deterministically in `(seed, cfg)`.

    Every machine is eligible for an operation with probability `cfg.flexibility`; when the draw
    leaves an operation without any machine, one machine is picked uniformly instead.

    Args:
        seed: The random seed.
        cfg: The generator configuration.
        name: The instance name. Defaults to `syn-<n>x<m>-<seed>`.

    Returns:
        A new instance with synthetic provenance.
    """
    rng = np.random.default_rng(seed)
    t_lo, t_hi = cfg.proc_time_range
    jobs: list[tuple[OperationSpec, ...]] = []
    for j in range(cfg.n_jobs):
        n_ops = int(rng.integers(cfg.ops_per_job_range[0], cfg.ops_per_job_range[1] + 1))
        ops = []
        for k in range(n_ops):
            eligible = np.flatnonzero(rng.random(cfg.n_machines) < cfg.flexibility)
            if eligible.size == 0:
                eligible = np.array([rng.integers(cfg.n_machines)])
            times = rng.uniform(t_lo, t_hi, size=eligible.size)
            alternatives = {int(m): _round_tenth(float(p), t_lo, t_hi) for m, p in zip(eligible, times)}
            ops.append(OperationSpec(j, k, alternatives))
        jobs.append(tuple(ops))
    rates = rng.uniform(cfg.e_min, cfg.e_max, size=cfg.n_machines)
    machines = tuple(MachineProfile(i, _round_tenth(float(e), cfg.e_min, cfg.e_max)) for i, e in enumerate(rates))
    return Instance(
        name=name or f"syn-{cfg.n_jobs}x{cfg.n_machines}-{seed}",
        jobs=tuple(jobs),
        machines=machines,
        provenance=Synthetic(seed=seed, config=cfg),
    )


@dataclass(frozen=True)
class ExplicitRates:
    """Emission rates given explicitly, machine 0 first."""
    rates: tuple[float, ...]


@dataclass(frozen=True)
class SampledRates:
    """Emission rates drawn uniformly in `[e_min, e_max]` from a seed."""
    seed: int
    e_min: float = 1.0
    e_max: float = 2.0


type EmissionSource = ExplicitRates | SampledRates


def attach_emissions(inst: Instance, source: EmissionSource | Sequence[float]) -> Instance:
    """Return a copy of the instance with emission rates set from the given source.

    Args:
        inst: The instance, typically parsed from a public benchmark file.
        source: Explicit rates, or a seeded sampling scheme. A plain sequence is taken as explicit.

    Returns:
        A copy of the instance carrying the new rates.

    Raises:
        ValueError: If the number of rates differs from the number of machines, or a rate is not positive.
    """
    match source:
        case ExplicitRates(rates):
            return inst.with_emission_rates(rates)
        case SampledRates(seed, e_min, e_max):
            return inst.with_emission_rates(sample_emission_rates(seed, inst.n_machines, e_min, e_max))
        case _:
            return inst.with_emission_rates(source)
