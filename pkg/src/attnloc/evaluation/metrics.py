"""Held-out evaluation: mean error distance in centimeters.

Evaluation scenes are generated fresh from their own seed, never drawn
from training data. Conditioned tasks are scored under every possible
condition per scene; a sample's error is the mean over conditions, and
each condition's error is the mean distance over its targets.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractError
from ..scenes import (
    ConditionKind,
    ObjectKind,
    Task,
    generate_dataset,
    task_config,
)

SUCCESS_CM = 5.0
_CHUNK = 20


@dataclass
class EvalReport:
    model_id: str
    task: Task
    dataset_size: int
    mean_error_cm: float
    errors: list = field(default_factory=list)  # one per scene

    @property
    def success_fraction(self):
        if not self.errors:
            return 0.0
        return sum(1 for e in self.errors if e < SUCCESS_CM) / len(self.errors)


def _target_for_condition(sample, kind, cond_index):
    if kind == ConditionKind.OBJECT_TYPE:
        for obj in sample.objects:
            if obj.kind == ObjectKind(cond_index):
                return obj.position
        raise ContractError(f"scene lacks an object of kind {cond_index}")
    if kind == ConditionKind.LEFT_RIGHT:
        for obj in sample.objects:
            if (obj.position[0] < 0) == (cond_index == 0):
                return obj.position
        raise ContractError("scene lacks an object on the requested side")
    raise ContractError(f"task has no conditions ({kind})")


def _predict_chunked(model, images, conditions):
    outs = []
    for start in range(0, len(images), _CHUNK):
        sl = slice(start, start + _CHUNK)
        cond = None if conditions is None else conditions[sl]
        outs.append(np.asarray(model.predict(images[sl], cond)))
    return np.concatenate(outs, axis=0)


def _distance(pred, gt):
    """Mean Euclidean distance over targets; pred/gt are [targets, 2]."""
    d = np.asarray(pred, dtype=np.float64) - np.asarray(gt, dtype=np.float64)
    return float(np.sqrt((d * d).sum(axis=-1)).mean())


def evaluate(model, task, n_scenes=100, seed=9000, model_id="model",
             dataset_size=0):
    """Score a model on freshly generated scenes; returns an EvalReport."""
    if n_scenes < 1:
        raise ContractError(f"n_scenes must be >= 1, got {n_scenes}")
    config = task_config(task)
    expected_dim = config.condition_dim
    model_dim = getattr(getattr(model, "config", None), "condition_dim", None)
    if model_dim is not None and model_dim != expected_dim:
        raise ContractError(
            f"model expects condition dim {model_dim}, task "
            f"{config.task.name} supplies {expected_dim}")

    ds = generate_dataset(config, n_scenes, seed)
    images = ds.images()

    if config.condition_kind == ConditionKind.NONE:
        preds = _predict_chunked(model, images, None)
        errors = [
            _distance(preds[i], ds.samples[i].targets)
            for i in range(n_scenes)
        ]
    else:
        dim = config.condition_dim
        per_condition = []
        for c in range(dim):
            conds = np.zeros((n_scenes, dim), dtype=images.dtype)
            conds[:, c] = 1.0
            preds = _predict_chunked(model, images, conds)
            per_condition.append(preds)
        errors = []
        for i, sample in enumerate(ds.samples):
            errs = [
                _distance(per_condition[c][i],
                          [_target_for_condition(sample,
                                                 config.condition_kind, c)])
                for c in range(dim)
            ]
            errors.append(float(np.mean(errs)))

    return EvalReport(model_id=model_id, task=config.task,
                      dataset_size=dataset_size,
                      mean_error_cm=float(np.mean(errors)), errors=errors)


def disc_mass(heatmap, center_cm, radius_cm, workspace_cm=60.0):
    """Heatmap mass within a disc around a workspace point."""
    h, w = heatmap.shape
    us = np.arange(w)
    vs = np.arange(h)
    xs = (us / (w - 1) - 0.5) * workspace_cm
    ys = (vs / (h - 1) - 0.5) * workspace_cm
    gx, gy = np.meshgrid(xs, ys)
    mask = (gx - center_cm[0]) ** 2 + (gy - center_cm[1]) ** 2 \
        <= radius_cm ** 2
    return float(heatmap[mask].sum())


def condition_control_fraction(model, n_scenes=100, seed=9100,
                               radius_cm=10.0, min_mass=0.5):
    """Fraction of scenes where each type condition steers the heatmap.

    For every scene and every object-type condition, at least
    ``min_mass`` of the head's heatmap must fall within ``radius_cm`` of
    the requested object for the scene to count.
    """
    ds = generate_dataset(Task.TYPE, n_scenes, seed)
    images = ds.images()
    hits = 0
    for i, sample in enumerate(ds.samples):
        ok = True
        for c in range(3):
            cond = np.zeros((1, 3), dtype=images.dtype)
            cond[0, c] = 1.0
            state = model.attend(images[i:i + 1], cond)
            target = _target_for_condition(sample,
                                           ConditionKind.OBJECT_TYPE, c)
            mass = disc_mass(state.heatmaps[0, 0], target, radius_cm)
            if mass < min_mass:
                ok = False
                break
        hits += int(ok)
    return hits / n_scenes
