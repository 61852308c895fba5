# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the instance model of the carbonshop library: what a carbon-aware flexible
job-shop scheduling problem is, and how instances are generated, read, written and split.

The components are defined in multiple files, and the main ones are re-exported here:
- `.instance`:
    - `.instance.MachineProfile`: A machine and its carbon emission rate.
    - `.instance.OperationSpec`: An operation with its eligible machines and processing times.
    - `.instance.Instance`: An immutable instance (jobs as precedence chains, machines).
    - `.instance.Synthetic`, `.instance.Parsed`: Provenance records.
- `.generate`:
    - `.generate.GenConfig`: Parameters of the synthetic generator.
    - `.generate.generate_instance`: Deterministic instance generation from a seed.
    - `.generate.attach_emissions`: Set emission rates explicitly or by seeded sampling.
- `.fjsp`:
    - `.fjsp.parse_fjsp`, `.fjsp.serialize_fjsp`: The standard FJSP text format.
    - `.fjsp.load_instance`, `.fjsp.save_instance`: Files with their `.em` emission sidecars.
    - `.fjsp.read_manifest`, `.fjsp.write_manifest`: Dataset manifests.
- `.dataset`:
    - `.dataset.split_dataset`: Deterministic train/validation/test split.

A typical use looks like this:
```python
from carbonshop.core import GenConfig, generate_instance, serialize_fjsp

inst = generate_instance(seed=7, cfg=GenConfig(n_jobs=10, n_machines=5, flexibility=1.0))
print(serialize_fjsp(inst))
```
"""

# re-exports
from .dataset import derive_seeds as derive_seeds
from .dataset import split_dataset as split_dataset
from .fjsp import FjspParseError as FjspParseError
from .fjsp import load_instance as load_instance
from .fjsp import load_manifest as load_manifest
from .fjsp import parse_emissions as parse_emissions
from .fjsp import parse_fjsp as parse_fjsp
from .fjsp import read_manifest as read_manifest
from .fjsp import save_instance as save_instance
from .fjsp import serialize_emissions as serialize_emissions
from .fjsp import serialize_fjsp as serialize_fjsp
from .fjsp import write_manifest as write_manifest
from .generate import attach_emissions as attach_emissions
from .generate import ExplicitRates as ExplicitRates
from .generate import GenConfig as GenConfig
from .generate import generate_instance as generate_instance
from .generate import SampledRates as SampledRates
from .generate import sample_emission_rates as sample_emission_rates
from .instance import Instance as Instance
from .instance import MachineProfile as MachineProfile
from .instance import OperationSpec as OperationSpec
from .instance import Parsed as Parsed
from .instance import Synthetic as Synthetic
