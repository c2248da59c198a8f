from .dataset import (
    Dataset,
    SceneSample,
    coverage_fraction,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from .render import (
    DEFAULT_CANVAS,
    OBJECT_COLORS,
    ObjectSpec,
    color_mask,
    footprint_mask,
    mask_centroid,
    normalized_to_workspace,
    pixel_to_workspace,
    render_scene,
    workspace_to_normalized,
    workspace_to_pixel,
)
from .tasks import (
    MIN_SEPARATION_CM,
    OBJECT_WIDTH_CM,
    POSITION_LIMIT_CM,
    TASK_CONFIGS,
    TASK_NAMES,
    WORKSPACE_CM,
    ConditionKind,
    ObjectKind,
    Task,
    TaskConfig,
    task_config,
    task_name,
)

__all__ = [
    "Dataset",
    "SceneSample",
    "ObjectSpec",
    "ObjectKind",
    "ConditionKind",
    "Task",
    "TaskConfig",
    "TASK_CONFIGS",
    "TASK_NAMES",
    "task_config",
    "task_name",
    "generate_dataset",
    "save_dataset",
    "load_dataset",
    "coverage_fraction",
    "render_scene",
    "footprint_mask",
    "color_mask",
    "mask_centroid",
    "workspace_to_pixel",
    "pixel_to_workspace",
    "normalized_to_workspace",
    "workspace_to_normalized",
    "OBJECT_COLORS",
    "DEFAULT_CANVAS",
    "WORKSPACE_CM",
    "OBJECT_WIDTH_CM",
    "MIN_SEPARATION_CM",
    "POSITION_LIMIT_CM",
]
