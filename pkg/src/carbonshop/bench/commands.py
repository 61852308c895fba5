# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
The harness commands.

Every command writes into a temporary sibling of its output directory and promotes it with a
rename once everything succeeded. Outputs depend only on the configuration and the seed; the
only timestamps are in `metadata.txt`.
"""

import logging
import os
import shutil
import tempfile

from concurrent.futures import ThreadPoolExecutor
from contextlib import AbstractContextManager, contextmanager, nullcontext
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from ..algo import (InstanceTooLargeError, Objective, rollout_heuristic, Rule, SearchLimits, solve_exact,
                    verify_schedule)
from ..core import (attach_emissions, derive_seeds, generate_instance, Instance, load_instance, read_manifest,
                    SampledRates, save_instance, split_dataset, write_manifest)
from ..core.fjsp import sidecar_path, write_text_atomic
from ..encode import HashEncoder, ImpactStore, RemoteEncoder, RemoteEncoderConfig, TextEncoder
from ..learn import ablation_mode, load_policy, PolicyParams, PolicyRunner, train
from ..sim import Rollout, schedule_csv
from .config import EFFECTIVE_CONFIG, format_config, format_ratio, METHOD_ORACLE, METHOD_POLICY, RunConfig
from .report import build_report, pareto_csv, pareto_svg, ParetoPoint
from .tables import (EvalRecord, format_table, improvements_csv, records_csv, ResultTable, schedule_filename,
                     table_csv)

logger = logging.getLogger(__name__)

ORACLE_COLUMNS = ('instance', 'lambda', 'value', 'makespan', 'emission', 'proven', 'nodes')


@contextmanager
def staged_output(out: Path, keep_on_error: bool = False) -> Iterator[Path]:
    """Yield a fresh staging directory that replaces `out` when the block completes.

    Args:
        out: The final output directory.
        keep_on_error: Leave the staging directory in place when the block fails.
    """
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(dir=out.parent, prefix=f".{out.name}.staging-"))
    try:
        yield staging
    except BaseException:
        if keep_on_error:
            logger.warning(f"Partial outputs kept in {staging}")
        else:
            shutil.rmtree(staging, ignore_errors=True)
        raise
    if out.exists():
        retired = Path(tempfile.mkdtemp(dir=out.parent, prefix=f".{out.name}.old-"))
        os.replace(out, retired / out.name)
        os.replace(staging, out)
        shutil.rmtree(retired, ignore_errors=True)
    else:
        os.replace(staging, out)
    logger.info(f"Outputs promoted to {out}")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec='seconds')


@contextmanager
def command_outputs(command: str, cfg: RunConfig, keep_on_error: bool = False) -> Iterator[Path]:
    """Staged output directory holding the effective configuration and the run metadata."""
    started = _now()
    with staged_output(cfg.out_path, keep_on_error) as staging:
        write_text_atomic(staging / EFFECTIVE_CONFIG, format_config(cfg))
        yield staging
        write_text_atomic(staging / "metadata.txt", f"command={command}\nstarted={started}\nfinished={_now()}\n")


def _parallel_map[T, R](fn: Callable[[T], R], items: Sequence[T], workers: int) -> list[R]:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def make_encoder(cfg: RunConfig) -> TextEncoder:
    """The configured text encoder; the caller closes it, typically in a `with` block."""
    if cfg.encoder == "remote":
        return RemoteEncoder(RemoteEncoderConfig(cfg.encoder_url, cfg.encoder_timeout, cfg.seed))
    return HashEncoder()


def encoder_scope(cfg: RunConfig, needed: bool = True) -> AbstractContextManager[Optional[TextEncoder]]:
    """A `with` block holding the configured encoder, or None when no policy runs."""
    return make_encoder(cfg) if needed else nullcontext()


def instance_seed(seed: int, ratio: float, index: int) -> int:
    """Seed of the emission rates of the `index`-th instance under an emission ratio."""
    return int(np.random.SeedSequence([seed, round(ratio * 1000), index]).generate_state(1)[0])


def load_instances(manifest: Path, cfg: RunConfig, ratio: Optional[float] = None) -> list[Instance]:
    """Load the instances of a manifest.

    Instances without an emission sidecar get rates sampled in `[1, cfg.emission_ratio]`. With
    `ratio`, the rates of every instance are resampled in `[1, ratio]`.

    Raises:
        FileNotFoundError: If the manifest or an instance file is missing.
        ValueError: If the manifest is empty.
    """
    paths = read_manifest(Path(manifest))
    if not paths:
        raise ValueError(f"Manifest {manifest} lists no instance")
    instances = []
    for index, path in enumerate(paths):
        inst = load_instance(path)
        if ratio is not None:
            inst = attach_emissions(inst, SampledRates(instance_seed(cfg.seed, ratio, index), 1.0, ratio))
        elif not sidecar_path(path).is_file():
            logger.info(f"No emission sidecar for {path}, sampling rates with ratio {format_ratio(cfg.emission_ratio)}")
            inst = attach_emissions(
                inst, SampledRates(instance_seed(cfg.seed, cfg.emission_ratio, index), 1.0, cfg.emission_ratio))
        instances.append(inst)
    return instances


def cmd_generate(cfg: RunConfig) -> Path:
    """Generate a synthetic dataset with emission sidecars and train/val/test manifests."""
    gen = cfg.gen_config()
    seeds = derive_seeds(cfg.seed, cfg.n_instances)
    with command_outputs("generate", cfg) as staging:
        paths = []
        for i, seed in enumerate(seeds):
            inst = generate_instance(seed, gen, name=f"inst{i:04d}")
            paths.append(save_instance(inst, staging / "instances" / f"{inst.name}.fjsp"))
        train_set, val_set, test_set = split_dataset(
            paths, (cfg.train_fraction, cfg.val_fraction, cfg.test_fraction), cfg.seed)
        for name, subset in (("train", train_set), ("val", val_set), ("test", test_set)):
            write_manifest(subset, staging / f"{name}.txt")
            logger.info(f"{name}: {len(subset)} instances")
    return cfg.out_path


@dataclass(frozen=True)
class _RunTask:
    index: int
    seed: int
    run_dir: Path


def train_runs(cfg: RunConfig, dest: Path, encoder: Optional[TextEncoder]) -> list[Path]:
    """Train `cfg.runs` policies with derived seeds; returns the final checkpoint of every run.

    The runs share `encoder`, which stays open.
    """
    train_set = load_instances(Path(cfg.train_manifest), cfg)
    val_set = load_instances(Path(cfg.val_manifest), cfg)
    tasks = [_RunTask(i, s, dest / f"run-{i:02d}") for i, s in enumerate(derive_seeds(cfg.seed, cfg.runs))]

    def run(task: _RunTask) -> Path:
        logger.info(f"Training run {task.index} (seed {task.seed}, mode {cfg.mode}, lambda {cfg.lam})")
        result = train(cfg.train_config(task.seed, task.run_dir), train_set, val_set, encoder)
        return result.checkpoints[-1]

    finals = _parallel_map(run, tasks, cfg.workers)
    write_manifest(finals, dest / "checkpoints.txt")
    return finals


def cmd_train(cfg: RunConfig) -> list[Path]:
    """Train policies; the final checkpoints are listed in `checkpoints.txt` of the output."""
    with command_outputs("train", cfg, keep_on_error=True) as staging, encoder_scope(cfg) as encoder:
        finals = train_runs(cfg, staging, encoder)
        relative = [path.relative_to(staging) for path in finals]
    return [cfg.out_path / path for path in relative]


def _checkpoint_paths(entries: Sequence[str]) -> list[Path]:
    paths = []
    for entry in entries:
        path = Path(entry)
        paths.extend(read_manifest(path) if path.suffix == ".txt" else [path])
    return paths


@dataclass(frozen=True)
class _Policy:
    params: PolicyParams
    mode: str


def load_policies(cfg: RunConfig, checkpoints: Optional[Sequence[Path]] = None) -> list[_Policy]:
    """Load the evaluated policies, from `checkpoints` or the configured ones.

    Raises:
        ValueError: If no checkpoint is given.
        FileNotFoundError: If a checkpoint is missing.
    """
    paths = list(checkpoints) if checkpoints is not None else _checkpoint_paths(cfg.checkpoints)
    if not paths:
        raise ValueError("Evaluating the policy needs at least one checkpoint (set checkpoints=...)")
    policies = []
    for path in paths:
        if not Path(path).is_file():
            raise FileNotFoundError(f"Checkpoint not found: {path}")
        params, meta = load_policy(Path(path))
        policies.append(_Policy(params, meta.get('mode', cfg.mode)))
    return policies


@dataclass(frozen=True)
class _EvalTask:
    method: str
    run: int
    inst: Instance


def _evaluate_task(task: _EvalTask, cfg: RunConfig, policies: Sequence[_Policy],
                   encoder: Optional[TextEncoder]) -> Rollout:
    match task.method:
        case "policy":
            policy = policies[task.run]
            variant = ablation_mode(cfg.train_config().cloned_with(mode=policy.mode))
            runner = PolicyRunner(policy.params, encoder or HashEncoder(), ImpactStore(), variant,
                                  cfg.train_config().prompt)
            return runner.greedy_rollout(task.inst, METHOD_POLICY)
        case "oracle":
            limits = SearchLimits(cfg.oracle_max_nodes, cfg.oracle_max_seconds)
            return solve_exact(task.inst, Objective(cfg.oracle_lam), limits, cfg.oracle_max_ops).rollout
        case _:
            return rollout_heuristic(task.inst, Rule.parse(task.method, cfg.random_seed))


def optimal_makespans(instances: Sequence[Instance], cfg: RunConfig) -> Optional[dict[str, float]]:
    """Proven optimal makespans of all instances, or None when one is too large or unproven."""
    if any(inst.n_ops > cfg.oracle_max_ops for inst in instances):
        return None
    limits = SearchLimits(cfg.oracle_max_nodes, cfg.oracle_max_seconds)
    results = _parallel_map(lambda inst: solve_exact(inst, Objective(0.0), limits, cfg.oracle_max_ops),
                            list(instances), cfg.workers)
    if not all(r.proven_optimal for r in results):
        logger.warning("The oracle did not prove every optimum, the approximation column is left out")
        return None
    return {inst.name: r.rollout.makespan for inst, r in zip(instances, results)}


def evaluate(cfg: RunConfig, instances: Sequence[Instance], dest: Path,
             checkpoints: Optional[Sequence[Path]] = None, encoder: Optional[TextEncoder] = None) -> ResultTable:
    """Evaluate the configured methods on instances and write the tables and schedules into `dest`.

    Policies encode their prompts with `encoder`, the builtin encoder when None. The caller owns it.

    Raises:
        ValueError: If a schedule is invalid, or the policy is evaluated without checkpoint.
        InstanceTooLargeError: If the oracle method is requested on a too large instance.
    """
    policies = load_policies(cfg, checkpoints) if METHOD_POLICY in cfg.methods else []
    tasks = []
    for method in cfg.methods:
        runs = len(policies) if method == METHOD_POLICY else 1
        tasks.extend(_EvalTask(method, run, inst) for run in range(runs) for inst in instances)
    rollouts = _parallel_map(lambda task: _evaluate_task(task, cfg, policies, encoder), tasks, cfg.workers)

    records = []
    for task, rollout in zip(tasks, rollouts):
        diagnostics = verify_schedule(task.inst, rollout.entries)
        if not diagnostics:
            raise ValueError(f"{task.method} produced an invalid schedule on {task.inst.name}: "
                             f"{'; '.join(diagnostics.violations)}")
        records.append(EvalRecord(task.method, task.run, task.inst.name, rollout.makespan, rollout.emission))
        write_text_atomic(dest / "schedules" / schedule_filename(task.method, task.run, task.inst.name),
                          schedule_csv(rollout.entries))

    table = ResultTable.from_records(records, optimal_makespans(instances, cfg))
    write_text_atomic(dest / "records.csv", records_csv(records))
    write_text_atomic(dest / "results.csv", table_csv(table))
    write_text_atomic(dest / "results.txt", format_table(table))
    write_text_atomic(dest / "improvements.csv", improvements_csv(table))
    logger.info(f"Wrote {len(records)} records and the result tables to {dest}")
    return table


def cmd_eval(cfg: RunConfig) -> ResultTable:
    """Evaluate methods on the test set."""
    instances = load_instances(Path(cfg.test_manifest), cfg)
    with command_outputs("eval", cfg) as staging, encoder_scope(cfg, METHOD_POLICY in cfg.methods) as encoder:
        return evaluate(cfg, instances, staging, encoder=encoder)


def cmd_sweep_lambda(cfg: RunConfig) -> list[ParetoPoint]:
    """Train and evaluate a policy per emission weight; returns `(lambda, makespan, emission)` points."""
    instances = load_instances(Path(cfg.test_manifest), cfg)
    points = []
    with command_outputs("sweep-lambda", cfg, keep_on_error=True) as staging, encoder_scope(cfg) as encoder:
        for lam in cfg.lambdas:
            sub = staging / f"lambda-{lam:g}"
            lam_cfg = cfg.cloned_with(lam=lam, methods=(METHOD_POLICY,))
            finals = train_runs(lam_cfg, sub / "train", encoder)
            row = evaluate(lam_cfg, instances, sub / "eval", finals, encoder).row(METHOD_POLICY)
            points.append((lam, row.mean_makespan, row.mean_emission))
            logger.info(f"lambda={lam:g}: makespan {row.mean_makespan:.2f}, emission {row.mean_emission:.2f}")
        write_text_atomic(staging / "pareto.csv", pareto_csv(points))
        write_text_atomic(staging / "pareto.svg", pareto_svg(points))
    return points


def cmd_sweep_ratio(cfg: RunConfig) -> dict[float, ResultTable]:
    """Evaluate the configured methods at the emission weight 0.5 under every emission ratio."""
    fixed = cfg.cloned_with(lam=0.5)
    tables = {}
    with (command_outputs("sweep-ratio", fixed) as staging,
          encoder_scope(fixed, METHOD_POLICY in fixed.methods) as encoder):
        for ratio in cfg.ratios:
            instances = load_instances(Path(cfg.test_manifest), fixed, ratio)
            tables[ratio] = evaluate(fixed, instances, staging / f"ratio-1x{ratio:g}", encoder=encoder)
        lines = ["ratio,method,mean_makespan,std_makespan,mean_emission,std_emission\n"]
        for ratio, table in tables.items():
            lines.extend(f"{format_ratio(ratio)},{r.method},{r.mean_makespan!r},{r.std_makespan!r},"
                         f"{r.mean_emission!r},{r.std_emission!r}\n" for r in table.rows)
        write_text_atomic(staging / "ratios.csv", "".join(lines))
    return tables


def cmd_oracle(cfg: RunConfig) -> Path:
    """Solve the test instances that fit the oracle and write their optimal schedules."""
    instances = load_instances(Path(cfg.test_manifest), cfg)
    limits = SearchLimits(cfg.oracle_max_nodes, cfg.oracle_max_seconds)
    fitting = []
    for inst in instances:
        if inst.n_ops > cfg.oracle_max_ops:
            logger.warning(f"Skipping {inst.name}: {inst.n_ops} operations exceed oracle_max_ops={cfg.oracle_max_ops}")
        else:
            fitting.append(inst)
    if not fitting:
        raise InstanceTooLargeError(f"No test instance has at most {cfg.oracle_max_ops} operations")
    with command_outputs("oracle", cfg) as staging:
        results = _parallel_map(lambda inst: solve_exact(inst, Objective(cfg.oracle_lam), limits, cfg.oracle_max_ops),
                                fitting, cfg.workers)
        lines = [",".join(ORACLE_COLUMNS) + "\n"]
        for inst, result in zip(fitting, results):
            r = result.rollout
            lines.append(f"{inst.name},{cfg.oracle_lam!r},{result.value!r},{r.makespan!r},{r.emission!r},"
                         f"{int(result.proven_optimal)},{result.nodes}\n")
            write_text_atomic(staging / "schedules" / schedule_filename(METHOD_ORACLE, 0, inst.name),
                              schedule_csv(r.entries))
        write_text_atomic(staging / "oracle.csv", "".join(lines))
    return cfg.out_path


def cmd_report(cfg: RunConfig) -> Path:
    """Assemble the Markdown report from evaluation and sweep outputs."""
    with command_outputs("report", cfg) as staging:
        build_report(cfg, staging)
    return cfg.out_path / "report.md"
