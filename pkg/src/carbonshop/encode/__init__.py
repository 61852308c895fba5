# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the state representation of the learned scheduler.

A state is seen two ways. The graph view feeds a two-layer message-passing network that yields
one embedding per operation and a graph embedding `z_gnn`. The text view describes every pending
operation in a prompt, decorated with hints learned from logged impacts, and a text encoder turns
it into a 128-dimensional vector `z_llm`. A scalar gate fuses both into the state embedding `h`.

The components are defined in multiple files, and the main ones are re-exported here:
- `.graph`: `build_graph` and the `GraphSnapshot` it returns; the static `topology` of an instance.
- `.gnn`: `GnnParams`, `gnn_embed` and `gnn_backward`.
- `.prompt`: `build_state_prompt`, `PromptOptions`, `parse_fragment`.
- `.impact`: `ImpactStore` with `record_impact` and `refresh_hints`.
- `.text`: the `TextEncoder` interface, the builtin `HashEncoder` and the HTTP `RemoteEncoder`.
- `.fusion`: `FusionParams`, `fuse` and `fuse_backward`.
"""

# re-exports
from .fusion import fuse as fuse
from .fusion import fuse_backward as fuse_backward
from .fusion import FusionOutput as FusionOutput
from .fusion import FusionParams as FusionParams
from .gnn import GNN_HIDDEN as GNN_HIDDEN
from .gnn import gnn_backward as gnn_backward
from .gnn import gnn_embed as gnn_embed
from .gnn import GnnOutput as GnnOutput
from .gnn import GnnParams as GnnParams
from .graph import build_graph as build_graph
from .graph import GraphSnapshot as GraphSnapshot
from .graph import NODE_FEATURES as NODE_FEATURES
from .graph import OpStatus as OpStatus
from .graph import precedence_is_chains as precedence_is_chains
from .graph import topology as topology
from .impact import HintFlags as HintFlags
from .impact import ImpactConfig as ImpactConfig
from .impact import ImpactLog as ImpactLog
from .impact import ImpactStore as ImpactStore
from .impact import op_key as op_key
from .impact import percentile_threshold as percentile_threshold
from .prompt import build_state_prompt as build_state_prompt
from .prompt import FragmentFields as FragmentFields
from .prompt import parse_fragment as parse_fragment
from .prompt import PromptOptions as PromptOptions
from .prompt import PromptRecord as PromptRecord
from .prompt import render_fragment as render_fragment
from .prompt import split_document as split_document
from .text import encode_text as encode_text
from .text import EncoderError as EncoderError
from .text import HASH_CACHE_SIZE as HASH_CACHE_SIZE
from .text import HashEncoder as HashEncoder
from .text import RemoteEncoder as RemoteEncoder
from .text import RemoteEncoderConfig as RemoteEncoderConfig
from .text import TEXT_DIM as TEXT_DIM
from .text import TextEncoder as TextEncoder
from .text import tokenize as tokenize
