# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the small numeric substrate of the learned scheduler: dense networks with
exact gradients, the masked softmax, the Adam optimizer and the text checkpoint format.

Everything works on float64 numpy arrays, and parameters are never modified in place.

The components are defined in multiple files, and the main ones are re-exported here:
- `.functional`: `softmax`, `sigmoid`, the `Activation` kinds and `ShapeError`.
- `.dense`: `DenseNet`, `forward` and `backward`.
- `.optim`: `OptState` and `adam_step`.
- `.checkpoint`: `save_checkpoint` and `load_checkpoint`.
"""

# re-exports
from .checkpoint import CheckpointError as CheckpointError
from .checkpoint import format_checkpoint as format_checkpoint
from .checkpoint import HEADER as CHECKPOINT_HEADER
from .checkpoint import load_checkpoint as load_checkpoint
from .checkpoint import parse_checkpoint as parse_checkpoint
from .checkpoint import save_checkpoint as save_checkpoint
from .dense import backward as backward
from .dense import DenseNet as DenseNet
from .dense import forward as forward
from .dense import init_layer as init_layer
from .dense import Layer as Layer
from .dense import Params as Params
from .functional import activate as activate
from .functional import Activation as Activation
from .functional import activation_grad as activation_grad
from .functional import log_softmax as log_softmax
from .functional import ShapeError as ShapeError
from .functional import sigmoid as sigmoid
from .functional import softmax as softmax
from .optim import adam_step as adam_step
from .optim import OptState as OptState
