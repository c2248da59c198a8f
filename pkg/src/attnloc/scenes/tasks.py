"""Task definitions and object vocabulary for the synthetic benchmark.

Four localization tasks over a 60x60 cm planar workspace with up to
three distinguishable object kinds. Conditions, where a task has them,
are one-hot vectors.
"""

from dataclasses import dataclass
from enum import IntEnum

WORKSPACE_CM = 60.0
OBJECT_WIDTH_CM = 10.0
# Rejection sampling keeps object centers at least this far apart, which
# together with the footprint radii below guarantees disjoint footprints.
MIN_SEPARATION_CM = 1.2 * OBJECT_WIDTH_CM
POSITION_MARGIN_CM = OBJECT_WIDTH_CM / 2
POSITION_LIMIT_CM = WORKSPACE_CM / 2 - POSITION_MARGIN_CM


class ObjectKind(IntEnum):
    DISC = 0
    SQUARE = 1
    TRIANGLE = 2


class ConditionKind(IntEnum):
    NONE = 0
    OBJECT_TYPE = 1
    LEFT_RIGHT = 2


class Task(IntEnum):
    SINGLE = 0
    MULTI = 1
    TYPE = 2
    POSITION = 3


@dataclass(frozen=True)
class TaskConfig:
    task: Task
    presented: int
    targets: int
    condition_kind: ConditionKind

    @property
    def condition_dim(self):
        if self.condition_kind == ConditionKind.OBJECT_TYPE:
            return 3
        if self.condition_kind == ConditionKind.LEFT_RIGHT:
            return 2
        return 0


TASK_CONFIGS = {
    Task.SINGLE: TaskConfig(Task.SINGLE, 1, 1, ConditionKind.NONE),
    Task.MULTI: TaskConfig(Task.MULTI, 3, 3, ConditionKind.NONE),
    Task.TYPE: TaskConfig(Task.TYPE, 3, 1, ConditionKind.OBJECT_TYPE),
    Task.POSITION: TaskConfig(Task.POSITION, 2, 1, ConditionKind.LEFT_RIGHT),
}

TASK_NAMES = {
    "single": Task.SINGLE,
    "multiple": Task.MULTI,
    "type": Task.TYPE,
    "position": Task.POSITION,
}


def task_config(task):
    """Resolve a Task, TaskConfig, or CLI name to its TaskConfig."""
    if isinstance(task, TaskConfig):
        return task
    if isinstance(task, str):
        task = TASK_NAMES[task]
    return TASK_CONFIGS[Task(task)]


def task_name(task):
    for name, t in TASK_NAMES.items():
        if t == task:
            return name
    raise KeyError(task)
