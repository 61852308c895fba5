# Copyright (c) 2026 carbonshop contributors
# SPDX-License-Identifier: MIT

"""
This module contains the scheduling environment of the carbonshop library.

A schedule is built one decision at a time: each decision assigns the next operation of an
unfinished job to one of its eligible machines, where it starts as early as possible. States are
immutable values, so rollouts over the same instance can run side by side.

The components are defined in multiple files, and the main ones are re-exported here:
- `.state`:
    - `.state.Action`: An (operation, machine) assignment.
    - `.state.ScheduleEntry`: A scheduled operation with its start, end and emission.
    - `.state.State`: A partial schedule.
    - `.state.StepOutcome`: What a decision changed (lower-bound and emission increments).
- `.environment`:
    - `.environment.reset`, `.environment.legal_actions`, `.environment.step`: The transition functions.
    - `.environment.makespan`, `.environment.total_emission`: The two objectives.
    - `.environment.lower_bound_makespan`: An admissible estimate of the final makespan.
- `.episode`:
    - `.episode.Episode`: A stateful runner taking one decision at a time.
    - `.episode.Rollout`: The record of a completed schedule, serializable to pickle or JSON.
- `.gantt`:
    - `.gantt.export_gantt`, `.gantt.gantt_svg`: Gantt charts in SVG.
    - `.gantt.schedule_csv`, `.gantt.read_schedule_csv`: Schedule CSV files.

For instance, scheduling every operation on its first eligible machine looks like this:
```python
from carbonshop.core import generate_instance
from carbonshop.sim import Episode

episode = Episode(generate_instance(seed=1))
episode.run_to_completion(lambda state: episode.legal_actions()[0])
print(episode.rollout("first-legal"))
```
"""

# re-exports
from .environment import earliest_finish as earliest_finish
from .environment import IllegalActionError as IllegalActionError
from .environment import is_legal as is_legal
from .environment import legal_actions as legal_actions
from .environment import lower_bound_makespan as lower_bound_makespan
from .environment import makespan as makespan
from .environment import reset as reset
from .environment import step as step
from .environment import total_emission as total_emission
from .episode import Chooser as Chooser
from .episode import dump_rollouts as dump_rollouts
from .episode import Episode as Episode
from .episode import load_rollouts as load_rollouts
from .episode import Rollout as Rollout
from .episode import run_episode as run_episode
from .gantt import export_gantt as export_gantt
from .gantt import gantt_svg as gantt_svg
from .gantt import parse_schedule_csv as parse_schedule_csv
from .gantt import read_schedule_csv as read_schedule_csv
from .gantt import schedule_csv as schedule_csv
from .state import Action as Action
from .state import ScheduleEntry as ScheduleEntry
from .state import State as State
from .state import StepOutcome as StepOutcome
from .svg import nice_ticks as nice_ticks
from .svg import SvgCanvas as SvgCanvas
