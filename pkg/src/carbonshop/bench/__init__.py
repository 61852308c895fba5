# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the experiment harness and the `carbonshop` command.

The components are defined in multiple files, and the main ones are re-exported here:
- `.config`: `RunConfig`, read from `key=value` files and `--set` overrides by `load_run_config`.
- `.commands`: one function per command (`cmd_generate`, `cmd_train`, `cmd_eval`, `cmd_sweep_lambda`,
    `cmd_sweep_ratio`, `cmd_oracle`, `cmd_report`), writing through `staged_output`.
- `.tables`: `EvalRecord`, `ResultTable` and the `improvement` convention.
- `.report`: the Markdown report with Gantt and Pareto SVG assets.
- `.main`: the argument parser and `main`.

The commands are also usable from Python:
```python
from carbonshop.bench import cmd_eval, RunConfig

table = cmd_eval(RunConfig(out="results", methods=("fifo", "mwkr"), test_manifest="data/test.txt"))
```
"""

# re-exports
from .commands import cmd_eval as cmd_eval
from .commands import cmd_generate as cmd_generate
from .commands import cmd_oracle as cmd_oracle
from .commands import cmd_report as cmd_report
from .commands import cmd_sweep_lambda as cmd_sweep_lambda
from .commands import cmd_sweep_ratio as cmd_sweep_ratio
from .commands import cmd_train as cmd_train
from .commands import evaluate as evaluate
from .commands import load_instances as load_instances
from .commands import staged_output as staged_output
from .config import format_config as format_config
from .config import load_run_config as load_run_config
from .config import parse_config_text as parse_config_text
from .config import parse_ratio as parse_ratio
from .config import RunConfig as RunConfig
from .report import build_report as build_report
from .report import pareto_svg as pareto_svg
from .settings import Settings as Settings
from .tables import EvalRecord as EvalRecord
from .tables import format_table as format_table
from .tables import improvement as improvement
from .tables import parse_records_csv as parse_records_csv
from .tables import ResultRow as ResultRow
from .tables import ResultTable as ResultTable
