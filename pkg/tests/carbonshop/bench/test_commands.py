# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""Test suite for the harness commands, the report and the command-line entry point."""

import re

from pathlib import Path

import pytest

from carbonshop.bench import (build_report, cmd_eval, cmd_generate, cmd_oracle, cmd_report, cmd_sweep_lambda,
                              cmd_sweep_ratio, cmd_train, load_instances, pareto_svg, RunConfig, staged_output)
import carbonshop.bench.commands as commands

from carbonshop.bench.main import main
from carbonshop.bench.report import pareto_csv
from carbonshop.core import generate_instance, GenConfig, load_instance, read_manifest, write_manifest
from carbonshop.core.fjsp import serialize_fjsp, write_text_atomic
from carbonshop.encode import RemoteEncoder, RemoteEncoderConfig, TEXT_DIM
from carbonshop.learn import PolicyParams, save_policy

SMALL = dict(n_instances=20, n_jobs=3, n_machines=2, ops_min=1, ops_max=2, flexibility=0.7)


def snapshot(root: Path) -> dict[str, bytes]:
    """Every file under a directory except the timestamped metadata."""
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file() and p.name != "metadata.txt"}


@pytest.fixture(scope="module")
def dataset(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """A generated dataset of twenty 3x2 instances: 16 for training, 2 for validation, 2 for testing."""
    out = tmp_path_factory.mktemp("bench") / "data"
    cmd_generate(RunConfig(out=str(out), emission_ratio=16.0, **SMALL))
    return out


def data_config(dataset: Path, out: Path, **kwargs: object) -> RunConfig:
    return RunConfig(out=str(out), train_manifest=str(dataset / "train.txt"), val_manifest=str(dataset / "val.txt"),
                     test_manifest=str(dataset / "test.txt"), **{**SMALL, **kwargs})


class TestStagedOutput:
    """Test suite for the promotion of output directories."""

    def test_promotes(self, tmp_path: Path) -> None:
        out = tmp_path / "out"
        with staged_output(out) as staging:
            (staging / "a.txt").write_text("a")
            assert not out.exists()
        assert (out / "a.txt").read_text() == "a"
        with staged_output(out) as staging:
            (staging / "b.txt").write_text("b")
        assert sorted(p.name for p in out.iterdir()) == ["b.txt"]
        assert [p.name for p in tmp_path.iterdir()] == ["out"]

    def test_failure_keeps_previous_outputs(self, tmp_path: Path) -> None:
        out = tmp_path / "out"
        out.mkdir()
        (out / "keep.txt").write_text("keep")
        with pytest.raises(RuntimeError):
            with staged_output(out) as staging:
                (staging / "partial.txt").write_text("partial")
                raise RuntimeError("boom")
        assert sorted(p.name for p in out.iterdir()) == ["keep.txt"]
        assert [p.name for p in tmp_path.iterdir()] == ["out"]

    def test_failure_can_keep_partial_outputs(self, tmp_path: Path) -> None:
        with pytest.raises(RuntimeError):
            with staged_output(tmp_path / "out", keep_on_error=True) as staging:
                (staging / "partial.txt").write_text("partial")
                raise RuntimeError("boom")
        [kept] = list(tmp_path.glob(".out.staging-*"))
        assert (kept / "partial.txt").is_file()
        assert not (tmp_path / "out").exists()


class TestGenerate:
    """Test suite for dataset generation."""

    def test_dataset(self, dataset: Path) -> None:
        splits = {name: read_manifest(dataset / f"{name}.txt") for name in ("train", "val", "test")}
        assert [len(paths) for paths in splits.values()] == [16, 2, 2]
        every = [p.name for paths in splits.values() for p in paths]
        assert sorted(every) == [f"inst{i:04d}.fjsp" for i in range(20)]
        for path in splits["test"]:
            inst = load_instance(path)
            assert (inst.n_jobs, inst.n_machines) == (3, 2)
            assert all(1.0 <= e <= 16.0 for e in inst.emission_rates)
        assert "emission_ratio=1:16\n" in (dataset / "effective-config.txt").read_text()
        assert (dataset / "metadata.txt").read_text().startswith("command=generate\n")

    def test_rerun_is_byte_identical(self, tmp_path: Path) -> None:
        cfg = RunConfig(out=str(tmp_path / "data"), seed=3, **{**SMALL, "n_instances": 6})
        cmd_generate(cfg)
        first = snapshot(tmp_path / "data")
        cmd_generate(cfg)
        assert snapshot(tmp_path / "data") == first
        assert len([name for name in first if name.startswith("instances/")]) == 12

    def test_seed_changes_dataset(self, tmp_path: Path) -> None:
        cmd_generate(RunConfig(out=str(tmp_path / "a"), seed=1, **{**SMALL, "n_instances": 4}))
        cmd_generate(RunConfig(out=str(tmp_path / "b"), seed=2, **{**SMALL, "n_instances": 4}))
        a = (tmp_path / "a" / "instances" / "inst0000.fjsp").read_bytes()
        assert a != (tmp_path / "b" / "instances" / "inst0000.fjsp").read_bytes()


class TestLoadInstances:
    """Test suite for emission rates of loaded instances."""

    def test_missing_sidecar(self, tmp_path: Path) -> None:
        """Instances without a sidecar get reproducible rates within the configured ratio."""
        cfg = GenConfig(n_jobs=3, n_machines=4, ops_per_job_range=(1, 2))
        paths = []
        for i in range(3):
            path = tmp_path / f"bare{i}.fjsp"
            write_text_atomic(path, serialize_fjsp(generate_instance(i, cfg)))
            paths.append(path)
        manifest = write_manifest(paths, tmp_path / "bare.txt")
        run_cfg = RunConfig(emission_ratio=4.0)
        loaded = load_instances(manifest, run_cfg)
        assert all(1.0 <= e <= 4.0 for inst in loaded for e in inst.emission_rates)
        assert any(e != 1.0 for inst in loaded for e in inst.emission_rates)
        assert [i.emission_rates for i in load_instances(manifest, run_cfg)] == [i.emission_rates for i in loaded]

    def test_resampled_ratio(self, dataset: Path) -> None:
        loaded = load_instances(dataset / "test.txt", RunConfig(), ratio=2.0)
        assert all(1.0 <= e <= 2.0 for inst in loaded for e in inst.emission_rates)

    def test_empty_manifest(self, tmp_path: Path) -> None:
        (tmp_path / "empty.txt").write_text("")
        with pytest.raises(ValueError):
            load_instances(tmp_path / "empty.txt", RunConfig())


class TestEval:
    """Test suite for the evaluation commands."""

    def test_heuristics_and_oracle(self, dataset: Path, tmp_path: Path) -> None:
        out = tmp_path / "results"
        table = cmd_eval(data_config(dataset, out, methods=("fifo", "mwkr", "oracle")))
        assert table.methods == ["fifo", "mwkr", "oracle"]
        assert all(row.approx is not None and row.approx >= 1.0 - 1e-9 for row in table.rows)
        assert table.row("oracle").approx == pytest.approx(1.0)
        for name in ("records.csv", "results.csv", "results.txt", "improvements.csv", "effective-config.txt",
                     "metadata.txt"):
            assert (out / name).is_file(), name
        test_names = [p.stem for p in read_manifest(dataset / "test.txt")]
        assert sorted(p.name for p in (out / "schedules").iterdir()) == sorted(
            f"{m}-r00-{n}.csv" for m in ("fifo", "mwkr", "oracle") for n in test_names)

    def test_policy(self, dataset: Path, tmp_path: Path) -> None:
        checkpoints = [save_policy(tmp_path / f"p{i}.ckpt", PolicyParams.create(i), {"mode": "luca"}) for i in range(2)]
        write_manifest(checkpoints, tmp_path / "checkpoints.txt")
        cfg = data_config(dataset, tmp_path / "results", methods=("policy", "fifo"),
                          checkpoints=(str(tmp_path / "checkpoints.txt"),))
        table = cmd_eval(cfg)
        records = (tmp_path / "results" / "records.csv").read_text().splitlines()
        assert sum(line.startswith("policy,") for line in records) == 4
        assert {line.split(",")[1] for line in records[1:] if line.startswith("policy,")} == {"0", "1"}
        assert table.row("policy").mean_makespan > 0

    def test_policy_encoder_is_shared_and_closed(self, dataset: Path, tmp_path: Path,
                                                  monkeypatch: pytest.MonkeyPatch) -> None:
        """One embedding client serves every policy evaluation and is closed afterwards."""
        httpx = pytest.importorskip("httpx")
        created: list[RemoteEncoder] = []

        def remote_encoder(cfg: RunConfig) -> RemoteEncoder:
            transport = httpx.MockTransport(lambda request: httpx.Response(200, json={"embedding": [1.0] * TEXT_DIM}))
            created.append(RemoteEncoder(RemoteEncoderConfig("http://encoder.test/embed"), transport=transport))
            return created[-1]

        monkeypatch.setattr(commands, "make_encoder", remote_encoder)
        checkpoints = [save_policy(tmp_path / f"p{i}.ckpt", PolicyParams.create(i), {"mode": "luca"}) for i in range(2)]
        cfg = data_config(dataset, tmp_path / "results", methods=("policy",), workers=2,
                          checkpoints=tuple(str(path) for path in checkpoints))
        cmd_eval(cfg)
        assert len(created) == 1
        assert created[0].closed

        cmd_eval(cfg.cloned_with(methods=("fifo",)))
        assert len(created) == 1

    def test_policy_needs_checkpoint(self, dataset: Path, tmp_path: Path) -> None:
        """A failed evaluation leaves no output directory behind."""
        with pytest.raises(ValueError):
            cmd_eval(data_config(dataset, tmp_path / "results"))
        assert list(tmp_path.iterdir()) == []

    def test_sweep_ratio(self, dataset: Path, tmp_path: Path) -> None:
        out = tmp_path / "ratios"
        tables = cmd_sweep_ratio(data_config(dataset, out, methods=("fifo", "mwkr"), ratios=(2.0, 16.0), lam=0.2))
        assert list(tables) == [2.0, 16.0]
        assert (out / "ratio-1x2" / "results.csv").is_file()
        assert (out / "ratio-1x16" / "results.csv").is_file()
        lines = (out / "ratios.csv").read_text().splitlines()
        assert lines[0] == "ratio,method,mean_makespan,std_makespan,mean_emission,std_emission"
        assert [line.split(",")[:2] for line in lines[1:]] == [["1:2", "fifo"], ["1:2", "mwkr"], ["1:16", "fifo"],
                                                              ["1:16", "mwkr"]]
        assert "lam=0.5\n" in (out / "effective-config.txt").read_text()

    def test_oracle(self, dataset: Path, tmp_path: Path) -> None:
        out = tmp_path / "oracle"
        cmd_oracle(data_config(dataset, out))
        lines = (out / "oracle.csv").read_text().splitlines()
        assert lines[0] == "instance,lambda,value,makespan,emission,proven,nodes"
        assert len(lines) == 3
        assert all(line.split(",")[5] == "1" for line in lines[1:])
        assert len(list((out / "schedules").iterdir())) == 2

    def test_oracle_too_large(self, dataset: Path, tmp_path: Path) -> None:
        with pytest.raises(ValueError):
            cmd_oracle(data_config(dataset, tmp_path / "oracle", oracle_max_ops=1))


class TestTrain:
    """Test suite for the training commands."""

    def test_train(self, dataset: Path, tmp_path: Path) -> None:
        out = tmp_path / "runs"
        cfg = data_config(dataset, out, runs=2, iterations=2, batch_size=2, l_batch=1, l_check=1, n_l=1,
                          epochs_per_update=1)
        finals = cmd_train(cfg)
        assert [p.parent.name for p in finals] == ["run-00", "run-01"]
        assert all(p.name == "policy-final.ckpt" and p.is_file() for p in finals)
        assert [p.resolve() for p in read_manifest(out / "checkpoints.txt")] == [p.resolve() for p in finals]
        assert (out / "run-00" / "run-log.csv").is_file()

    def test_sweep_lambda(self, dataset: Path, tmp_path: Path) -> None:
        out = tmp_path / "sweep"
        cfg = data_config(dataset, out, runs=1, iterations=1, batch_size=2, l_batch=1, l_check=1, n_l=1,
                          epochs_per_update=1, lambdas=(0.3, 0.7))
        points = cmd_sweep_lambda(cfg)
        assert [lam for lam, _, _ in points] == [0.3, 0.7]
        assert (out / "lambda-0.3" / "eval" / "results.csv").is_file()
        assert (out / "pareto.csv").read_text().splitlines()[0] == "lambda,mean_makespan,mean_emission"
        assert (out / "pareto.svg").read_text(encoding="utf-8").rstrip().endswith("</svg>")


class TestReport:
    """Test suite for the Markdown report."""

    def test_report(self, dataset: Path, tmp_path: Path) -> None:
        cmd_eval(data_config(dataset, tmp_path / "results", methods=("mwkr", "fifo")))
        sweep = tmp_path / "sweep"
        sweep.mkdir()
        (sweep / "pareto.csv").write_text(pareto_csv([(0.3, 12.0, 40.0), (0.7, 14.0, 31.5)]))
        report = cmd_report(RunConfig(out=str(tmp_path / "report"), eval_dir=str(tmp_path / "results"),
                                      sweep_dir=str(sweep)))
        text = report.read_text(encoding="utf-8")
        assert "## Schedules of mwkr" in text
        assert "| 0.7 | 14.00 | 31.50 |" in text
        assets = re.findall(r"\]\((assets/[^)]+)\)", text)
        assert sorted(assets) == ["assets/gantt-best.svg", "assets/gantt-worst.svg", "assets/pareto.svg"]
        assert all((report.parent / asset).is_file() for asset in assets)

    def test_report_needs_inputs(self, tmp_path: Path) -> None:
        with pytest.raises(ValueError):
            build_report(RunConfig(), tmp_path)

    def test_pareto_svg(self) -> None:
        svg = pareto_svg([(0.5, 10.0, 20.0)])
        assert svg.count('class="point"') == 1
        assert "λ=0.5" in svg


class TestMain:
    """Test suite for the command-line entry point."""

    def test_generate(self, tmp_path: Path) -> None:
        assert main(["generate", "--out", str(tmp_path / "data"), "--seed", "4", "--set", "n_instances=3",
                     "--set", "n_jobs=2"]) == 0
        assert "seed=4\n" in (tmp_path / "data" / "effective-config.txt").read_text()
        assert len(list((tmp_path / "data" / "instances").glob("*.fjsp"))) == 3

    def test_eval_prints_table(self, dataset: Path, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        config = tmp_path / "eval.txt"
        config.write_text(f"test_manifest={dataset / 'test.txt'}\nmethods=fifo,spt\n", encoding="utf-8")
        assert main(["eval", "--config", str(config), "--out", str(tmp_path / "results")]) == 0
        assert capsys.readouterr().out.splitlines()[1].startswith("fifo")

    def test_errors_exit_with_one(self, tmp_path: Path) -> None:
        assert main(["eval", "--out", str(tmp_path / "results"), "--set", "test_manifest=missing.txt"]) == 1
        assert main(["generate", "--set", "bogus=1"]) == 1
        assert main(["generate", "--config", str(tmp_path / "missing.txt")]) == 1

    def test_usage_errors(self) -> None:
        with pytest.raises(SystemExit) as e:
            main(["unknown-command"])
        assert e.value.code == 2

    def test_oracle_flags(self, dataset: Path, tmp_path: Path) -> None:
        """At `--lambda 1` the oracle value is the minimum emission; the flags override `--set`."""
        out = tmp_path / "oracle"
        assert main(["oracle", "--out", str(out), "--set", f"test_manifest={dataset / 'test.txt'}",
                     "--set", "oracle_lam=0.0", "--lambda", "1", "--max-nodes", "100000"]) == 0
        effective = (out / "effective-config.txt").read_text()
        assert "oracle_lam=1.0\n" in effective
        assert "oracle_max_nodes=100000\n" in effective
        instances = {inst.name: inst for inst in map(load_instance, read_manifest(dataset / "test.txt"))}
        rows = [line.split(",") for line in (out / "oracle.csv").read_text().splitlines()[1:]]
        assert sorted(row[0] for row in rows) == sorted(instances)
        for name, lam, value, _, emission, proven, _ in rows:
            assert float(lam) == 1.0
            assert proven == "1"
            assert float(value) == pytest.approx(instances[name].min_emission())
            assert float(emission) == pytest.approx(instances[name].min_emission())

    @pytest.mark.parametrize("argv", [
        ["oracle", "--lambda", "1.5"],
        ["oracle", "--lambda", "x"],
        ["oracle", "--max-nodes", "0"],
        ["eval", "--lambda", "1"],
    ])
    def test_oracle_flag_usage_errors(self, argv: list[str]) -> None:
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2
