"""Benchmark results as a CSV grid: rows are models, columns task x size."""

import csv

from ..scenes import Task, task_name

TASK_ORDER = (Task.SINGLE, Task.MULTI, Task.TYPE, Task.POSITION)
SIZE_ORDER = (4, 20, 100)


def _columns():
    return [f"{task_name(t)}_{s}" for t in TASK_ORDER for s in SIZE_ORDER]


def emit_table(reports, out_path, threshold_cm=5.0):
    """CSV with one row per model; cells are mean errors to 2 decimals.

    The trailing ``below_{threshold}cm`` column lists the cells beating
    the threshold, mirroring how benchmark tables bold their winners.
    """
    columns = _columns()
    by_model = {}
    order = []
    for r in reports:
        if r.model_id not in by_model:
            by_model[r.model_id] = {}
            order.append(r.model_id)
        by_model[r.model_id][f"{task_name(r.task)}_{r.dataset_size}"] = \
            r.mean_error_cm

    flag_col = f"below_{threshold_cm:g}cm"
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["model", *columns, flag_col])
        for model_id in order:
            cells = by_model[model_id]
            row = [model_id]
            good = []
            for col in columns:
                if col in cells:
                    row.append(f"{cells[col]:.2f}")
                    if cells[col] < threshold_cm:
                        good.append(col)
                else:
                    row.append("")
            row.append(";".join(good))
            writer.writerow(row)
