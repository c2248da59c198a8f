from .metrics import (
    SUCCESS_CM,
    EvalReport,
    condition_control_fraction,
    disc_mass,
    evaluate,
)
from .overlay import (
    MARKER_COLORS,
    marker_color,
    read_ppm,
    render_attention_overlay,
    write_ppm,
)
from .table import SIZE_ORDER, TASK_ORDER, emit_table

__all__ = [
    "EvalReport",
    "evaluate",
    "disc_mass",
    "condition_control_fraction",
    "SUCCESS_CM",
    "render_attention_overlay",
    "write_ppm",
    "read_ppm",
    "marker_color",
    "MARKER_COLORS",
    "emit_table",
    "TASK_ORDER",
    "SIZE_ORDER",
]
