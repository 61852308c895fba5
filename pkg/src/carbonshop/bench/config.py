# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
Run configuration of the command-line harness.

A configuration file is a flat list of `key=value` lines. Blank lines and lines starting with `#`
are ignored, list values are comma separated, and emission ratios may be written `1:16` or `16`.
Values from the file are overridden by `--set key=value` flags, then by the environment
(`CARBONSHOP_ENCODER_URL`), then by the global `--seed` and `--out` flags.
"""

import dataclasses
import math
import os

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Self, Sequence

from ..algo import Rule
from ..core import GenConfig
from ..encode import ImpactConfig, PromptOptions
from ..learn import AblationMode, Normalization, PpoHyper, RewardConfig, TrainConfig

ENCODER_URL_ENV = "CARBONSHOP_ENCODER_URL"
EFFECTIVE_CONFIG = "effective-config.txt"

METHOD_POLICY = "policy"
METHOD_ORACLE = "oracle"


def parse_ratio(token: str) -> float:
    """The upper emission rate of a ratio written `1:r` or `r`.

    Raises:
        ValueError: If the token is malformed or the ratio is below 1.
    """
    token = token.strip()
    if ':' in token:
        low, _, high = token.partition(':')
        if float(low) != 1.0:
            raise ValueError(f"Emission ratio {token!r} must be written 1:r")
        token = high
    ratio = float(token)
    if not (math.isfinite(ratio) and ratio >= 1.0):
        raise ValueError(f"Emission ratio {token!r} must be at least 1")
    return ratio


def format_ratio(ratio: float) -> str:
    return f"1:{ratio:g}"


@dataclass(frozen=True)
class RunConfig:
    """Every setting of the harness commands.

    Attributes:
        out: The output directory of the command.
        seed: The base seed; run seeds and per-instance seeds derive from it.
        runs: Number of independent training runs. Defaults to 10.
        workers: Number of concurrent evaluations. Defaults to 1.
        n_instances: Size of a generated dataset.
        n_jobs, n_machines, ops_min, ops_max, p_min, p_max, flexibility: Generator settings.
        emission_ratio: Emission rates are drawn in `[1, emission_ratio]`.
        train_fraction, val_fraction, test_fraction: Dataset split.
        train_manifest, val_manifest, test_manifest: Dataset manifests read by the commands.
        mode: The model variant to train.
        lam: Weight of the emission objective.
        gamma, normalize: Reward settings.
        iterations, batch_size, l_batch, l_check, epochs_per_update, lr: Training schedule.
        clip_ratio, coef_policy, coef_value, coef_entropy: Loss settings.
        n_l, quantile: Hint refresh period and flagging percentile.
        show_emission_rates: Whether prompts list machine emission rates.
        encoder, encoder_url, encoder_timeout, encoder_fallback: Text encoder settings.
        methods: The methods evaluated by `eval` and `sweep-ratio`.
        checkpoints: Policy checkpoints evaluated as the `policy` method.
        random_seed: Seed of the random dispatching rule.
        oracle_lam, oracle_max_ops, oracle_max_nodes, oracle_max_seconds: Oracle settings.
        lambdas: The weights of `sweep-lambda`.
        ratios: The emission ratios of `sweep-ratio`.
        eval_dir, sweep_dir: Inputs of `report`.
    """
    out: str = "out"
    seed: int = 0
    runs: int = 10
    workers: int = 1

    n_instances: int = 200
    n_jobs: int = 10
    n_machines: int = 5
    ops_min: int = 4
    ops_max: int = 6
    p_min: float = 1.0
    p_max: float = 20.0
    flexibility: float = 0.5
    emission_ratio: float = 2.0
    train_fraction: float = 0.8
    val_fraction: float = 0.1
    test_fraction: float = 0.1

    train_manifest: str = "data/train.txt"
    val_manifest: str = "data/val.txt"
    test_manifest: str = "data/test.txt"

    mode: str = AblationMode.LUCA.value
    lam: float = 0.5
    gamma: float = 1.0
    normalize: str = Normalization.RETURNS.value
    iterations: int = 1000
    batch_size: int = 20
    l_batch: int = 20
    l_check: int = 50
    epochs_per_update: int = 4
    lr: float = 2e-4
    clip_ratio: float = 0.2
    coef_policy: float = 1.0
    coef_value: float = 0.5
    coef_entropy: float = 0.01
    n_l: int = 20
    quantile: float = 0.75
    show_emission_rates: bool = False

    encoder: str = "hash"
    encoder_url: str = ""
    encoder_timeout: float = 10.0
    encoder_fallback: bool = True

    methods: tuple[str, ...] = (METHOD_POLICY, "fifo", "spt", "mor", "mwkr")
    checkpoints: tuple[str, ...] = ()
    random_seed: int = 0
    oracle_lam: float = 0.0
    oracle_max_ops: int = 12
    oracle_max_nodes: int = 5_000_000
    oracle_max_seconds: float = 60.0

    lambdas: tuple[float, ...] = (0.3, 0.4, 0.5, 0.6, 0.7)
    ratios: tuple[float, ...] = (2.0, 4.0, 8.0, 16.0)

    eval_dir: str = ""
    sweep_dir: str = ""

    def __post_init__(self) -> None:
        for name in ('runs', 'workers', 'n_instances', 'n_jobs', 'n_machines', 'ops_min', 'iterations', 'batch_size',
                     'l_batch', 'l_check', 'epochs_per_update', 'n_l', 'oracle_max_ops', 'oracle_max_nodes'):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.ops_max < self.ops_min:
            raise ValueError(f"ops_max ({self.ops_max}) must not be below ops_min ({self.ops_min})")
        if not 0 < self.p_min <= self.p_max:
            raise ValueError(f"Invalid processing time range [{self.p_min}, {self.p_max}]")
        if not 0 < self.flexibility <= 1:
            raise ValueError(f"flexibility must lie in (0, 1], got {self.flexibility}")
        for ratio in (self.emission_ratio, *self.ratios):
            if not ratio >= 1:
                raise ValueError(f"Emission ratios must be at least 1, got {ratio}")
        fractions = (self.train_fraction, self.val_fraction, self.test_fraction)
        if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
            raise ValueError(f"Split fractions must be non-negative and sum to 1, got {fractions}")
        for name in ('lam', 'gamma', 'oracle_lam'):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if any(not 0 <= lam <= 1 for lam in self.lambdas) or not self.lambdas:
            raise ValueError(f"lambdas must be a non-empty list of values in [0, 1], got {self.lambdas}")
        if not self.ratios:
            raise ValueError("ratios must not be empty")
        if not 0 < self.quantile < 1:
            raise ValueError(f"quantile must lie in (0, 1), got {self.quantile}")
        if not (self.lr > 0 and self.encoder_timeout > 0 and self.oracle_max_seconds > 0):
            raise ValueError("lr, encoder_timeout and oracle_max_seconds must be positive")
        if self.encoder not in ("hash", "remote"):
            raise ValueError(f"encoder must be 'hash' or 'remote', got {self.encoder!r}")
        if self.encoder == "remote" and not self.encoder_url:
            raise ValueError(f"The remote encoder needs encoder_url (or {ENCODER_URL_ENV})")
        AblationMode(self.mode)
        Normalization(self.normalize)
        for method in self.methods:
            if method not in (METHOD_POLICY, METHOD_ORACLE):
                Rule.parse(method)
        # validates the nested settings early
        self.train_config()

    def cloned_with(self, **kwargs: object) -> Self:
        return dataclasses.replace(self, **kwargs)

    @property
    def out_path(self) -> Path:
        return Path(self.out)

    def gen_config(self) -> GenConfig:
        return GenConfig(
            n_jobs=self.n_jobs,
            n_machines=self.n_machines,
            ops_per_job_range=(self.ops_min, self.ops_max),
            proc_time_range=(self.p_min, self.p_max),
            flexibility=self.flexibility,
            e_min=1.0,
            e_max=self.emission_ratio,
        )

    def train_config(self, seed: Optional[int] = None, checkpoint_dir: Optional[Path] = None) -> TrainConfig:
        return TrainConfig(
            reward=RewardConfig(lam=self.lam, gamma=self.gamma, normalize=Normalization(self.normalize)),
            ppo=PpoHyper(
                clip_ratio=self.clip_ratio,
                coef_policy=self.coef_policy,
                coef_value=self.coef_value,
                coef_entropy=self.coef_entropy,
                epochs_per_update=self.epochs_per_update,
                iterations=self.iterations,
                batch_size=self.batch_size,
                l_batch=self.l_batch,
                l_check=self.l_check,
                lr=self.lr,
            ),
            impact=ImpactConfig(n_l=self.n_l, quantile=self.quantile),
            prompt=PromptOptions(show_emission_rates=self.show_emission_rates),
            mode=AblationMode(self.mode),
            seed=self.seed if seed is None else seed,
            encoder_fallback=self.encoder_fallback,
            checkpoint_dir=str(checkpoint_dir) if checkpoint_dir is not None else None,
        )


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def _convert(key: str, raw: str) -> object:
    kind = _FIELDS[key].type
    raw = raw.strip()
    try:
        if kind is bool:
            lowered = raw.lower()
            if lowered not in ('true', 'false', '1', '0', 'yes', 'no'):
                raise ValueError(f"expected a boolean, got {raw!r}")
            return lowered in ('true', '1', 'yes')
        if kind is int:
            return int(raw.replace('_', ''))
        if kind is float:
            return parse_ratio(raw) if key == 'emission_ratio' else float(raw)
        if kind == tuple[float, ...]:
            items = [item for item in raw.split(',') if item.strip()]
            return tuple(parse_ratio(item) if key == 'ratios' else float(item) for item in items)
        if kind == tuple[str, ...]:
            return tuple(item.strip() for item in raw.split(',') if item.strip())
        return raw
    except ValueError as e:
        raise ValueError(f"Invalid value for {key}: {e}") from e


def parse_config_text(text: str) -> dict[str, str]:
    """Read `key=value` lines into a raw mapping.

    Raises:
        ValueError: If a line has no `=` or names an unknown key.
    """
    values = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition('=')
        key = key.strip()
        if not sep:
            raise ValueError(f"line {number}: expected key=value, got {line!r}")
        if key not in _FIELDS:
            raise ValueError(f"line {number}: unknown setting {key!r}")
        values[key] = value.strip()
    return values


def config_from_mapping(values: Mapping[str, str], base: RunConfig = RunConfig()) -> RunConfig:
    """Apply raw string settings over a configuration.

    Raises:
        ValueError: If a key is unknown, a value does not parse, or a value is out of range.
    """
    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise ValueError(f"Unknown settings: {', '.join(unknown)}")
    return base.cloned_with(**{key: _convert(key, value) for key, value in values.items()})


def parse_overrides(pairs: Sequence[str]) -> dict[str, str]:
    """Parse `--set key=value` flags."""
    values = {}
    for pair in pairs:
        key, sep, value = pair.partition('=')
        if not sep:
            raise ValueError(f"Expected key=value, got {pair!r}")
        values[key.strip()] = value
    return values


def load_run_config(path: Optional[Path] = None, overrides: Sequence[str] = (),
                    env: Optional[Mapping[str, str]] = None, seed: Optional[int] = None,
                    out: Optional[str] = None, flags: Optional[Mapping[str, str]] = None) -> RunConfig:
    """Assemble the effective configuration of a command.

    Args:
        path: The configuration file, if any.
        overrides: `key=value` overrides.
        env: The environment. Defaults to `os.environ`.
        seed: The global seed flag, if given.
        out: The global output flag, if given.
        flags: Values of command-specific flags, such as the oracle's `--lambda`.

    Raises:
        FileNotFoundError: If the configuration file does not exist.
        ValueError: If a setting is unknown, malformed or out of range.
    """
    values: dict[str, str] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"Configuration file not found: {path}")
        values.update(parse_config_text(path.read_text(encoding='utf-8')))
    values.update(parse_overrides(overrides))
    env = os.environ if env is None else env
    if env.get(ENCODER_URL_ENV):
        values['encoder_url'] = env[ENCODER_URL_ENV]
    values.update(flags or {})
    if seed is not None:
        values['seed'] = str(seed)
    if out is not None:
        values['out'] = out
    return config_from_mapping(values)


def _format_value(key: str, value: object) -> str:
    match value:
        case bool():
            return 'true' if value else 'false'
        case float() if key == 'emission_ratio':
            return format_ratio(value)
        case tuple() if key == 'ratios':
            return ','.join(format_ratio(v) for v in value)
        case tuple():
            return ','.join(repr(v) if isinstance(v, float) else str(v) for v in value)
        case float():
            return repr(value)
        case _:
            return str(value)


def format_config(cfg: RunConfig) -> str:
    """Render a configuration as a file that `parse_config_text` reads back to the same values."""
    return ''.join(f"{name}={_format_value(name, getattr(cfg, name))}\n" for name in _FIELDS)
