# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the learned scheduler: an actor-critic policy over the fused state embedding,
trained with clipped-objective policy optimization on a dual-objective reward.

The components are defined in multiple files, and the main ones are re-exported here:
- `.config`: `RewardConfig`, `PpoHyper` and `TrainConfig`, with the `AblationMode` variants.
- `.rewards`: `immediate_rewards`, `discounted_returns`, `zscore`, `combine_rewards`, `advantages`.
- `.policy`: `PolicyParams`, `score_actions`, `policy_forward` and `policy_backward`.
- `.ppo`: `Trajectory`, `ppo_loss` and `ppo_update`.
- `.trainer`: `train`, `validate`, `ablation_mode` and the `PolicyRunner` used for evaluation.

A typical use looks like this:
```python
from carbonshop.core import GenConfig, generate_instance
from carbonshop.learn import PpoHyper, train, TrainConfig

cfg = GenConfig(n_jobs=3, n_machines=2)
train_set = [generate_instance(seed, cfg) for seed in range(10)]
val_set = [generate_instance(seed, cfg) for seed in range(100, 103)]
result = train(TrainConfig(ppo=PpoHyper(iterations=5, batch_size=4, l_check=5)), train_set, val_set)
```
"""

# re-exports
from .config import AblationMode as AblationMode
from .config import Normalization as Normalization
from .config import PpoHyper as PpoHyper
from .config import RewardConfig as RewardConfig
from .config import TrainConfig as TrainConfig
from .policy import action_features as action_features
from .policy import load_policy as load_policy
from .policy import policy_backward as policy_backward
from .policy import policy_forward as policy_forward
from .policy import PolicyParams as PolicyParams
from .policy import save_policy as save_policy
from .policy import score_actions as score_actions
from .policy import step_inputs as step_inputs
from .policy import StepForward as StepForward
from .policy import StepInputs as StepInputs
from .ppo import LossReport as LossReport
from .ppo import NonFiniteLossError as NonFiniteLossError
from .ppo import ppo_loss as ppo_loss
from .ppo import ppo_update as ppo_update
from .ppo import StepRecord as StepRecord
from .ppo import Trajectory as Trajectory
from .ppo import UpdateBatch as UpdateBatch
from .rewards import advantages as advantages
from .rewards import combine_rewards as combine_rewards
from .rewards import discounted_returns as discounted_returns
from .rewards import immediate_rewards as immediate_rewards
from .rewards import training_targets as training_targets
from .rewards import zscore as zscore
from .trainer import ablation_mode as ablation_mode
from .trainer import aggregate_validation as aggregate_validation
from .trainer import IterationLog as IterationLog
from .trainer import PolicyRunner as PolicyRunner
from .trainer import PolicyVariant as PolicyVariant
from .trainer import run_log_csv as run_log_csv
from .trainer import RUN_LOG_COLUMNS as RUN_LOG_COLUMNS
from .trainer import train as train
from .trainer import TrainResult as TrainResult
from .trainer import validate as validate
from .trainer import ValidationResult as ValidationResult
