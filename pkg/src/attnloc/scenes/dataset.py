"""Scene sampling, ground-truth bookkeeping, and the dataset file format.

Generation is deterministic: every sample draws from its own RNG stream
seeded by (dataset seed, sample index), so regeneration is bit-identical
and samples could be produced in parallel.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import DatasetFormatError, SceneGenerationError
from .render import DEFAULT_CANVAS, ObjectSpec, render_scene
from .tasks import (
    MIN_SEPARATION_CM,
    POSITION_LIMIT_CM,
    WORKSPACE_CM,
    ConditionKind,
    ObjectKind,
    Task,
    TaskConfig,
    task_config,
)

_MAX_PLACEMENT_ATTEMPTS = 10_000

_MAGIC = b"GALD"
_VERSION = 1


@dataclass
class SceneSample:
    image: np.ndarray  # [3,H,W] float32 in [0,1]
    objects: list  # of ObjectSpec
    condition: np.ndarray | None  # one-hot float32, None for plain tasks
    targets: np.ndarray  # [n_targets, 2] cm


@dataclass
class Dataset:
    samples: list
    seed: int
    task: TaskConfig
    size: int
    canvas: tuple = DEFAULT_CANVAS

    def images(self):
        return np.stack([s.image for s in self.samples])

    def conditions(self):
        if self.task.condition_kind == ConditionKind.NONE:
            return None
        return np.stack([s.condition for s in self.samples])

    def targets(self):
        return np.stack([s.targets for s in self.samples])


def _one_hot(index, dim):
    v = np.zeros(dim, dtype=np.float32)
    v[index] = 1.0
    return v


def _sample_positions(rng, count, x_ranges=None):
    """Rejection-sample `count` centers with the minimum separation.

    ``x_ranges`` optionally pins each object's x interval (used to force
    one object per table side).
    """
    lim = POSITION_LIMIT_CM
    positions = []
    attempts = 0
    while len(positions) < count:
        if attempts >= _MAX_PLACEMENT_ATTEMPTS:
            raise SceneGenerationError(
                f"could not place {count} objects after {attempts} attempts")
        attempts += 1
        if x_ranges is not None:
            lo, hi = x_ranges[len(positions)]
            x = rng.uniform(lo, hi)
        else:
            x = rng.uniform(-lim, lim)
        y = rng.uniform(-lim, lim)
        ok = all(np.hypot(x - px, y - py) >= MIN_SEPARATION_CM
                 for px, py in positions)
        if ok:
            positions.append((x, y))
    return positions


def _make_sample(config, index, rng, canvas):
    task = config.task
    if task == Task.SINGLE:
        kind = ObjectKind(int(rng.integers(3)))
        (pos,) = _sample_positions(rng, 1)
        objects = [ObjectSpec(kind, pos)]
        condition = None
        targets = [pos]
    elif task == Task.MULTI:
        positions = _sample_positions(rng, 3)
        objects = [ObjectSpec(ObjectKind(i), positions[i]) for i in range(3)]
        condition = None
        targets = positions
    elif task == Task.TYPE:
        positions = _sample_positions(rng, 3)
        objects = [ObjectSpec(ObjectKind(i), positions[i]) for i in range(3)]
        wanted = index % 3  # cycle so every type is targeted equally often
        condition = _one_hot(wanted, 3)
        targets = [positions[wanted]]
    elif task == Task.POSITION:
        kind = ObjectKind(int(rng.integers(3)))
        lim = POSITION_LIMIT_CM
        left, right = _sample_positions(
            rng, 2, x_ranges=[(-lim, 0.0), (0.0, lim)])
        objects = [ObjectSpec(kind, left), ObjectSpec(kind, right)]
        side = index % 2  # alternate left/right for exact balance
        condition = _one_hot(side, 2)
        targets = [left if side == 0 else right]
    else:
        raise SceneGenerationError(f"unknown task {task!r}")

    image = render_scene(objects, canvas)
    return SceneSample(
        image=image,
        objects=objects,
        condition=condition,
        targets=np.array(targets, dtype=np.float32),
    )


def generate_dataset(task, size, seed, canvas=DEFAULT_CANVAS):
    """Render ``size`` scenes for a task; fully determined by ``seed``."""
    config = task_config(task)
    if size < 1:
        raise SceneGenerationError(f"size must be >= 1, got {size}")
    samples = [
        _make_sample(config, i, np.random.default_rng((seed, i)), canvas)
        for i in range(size)
    ]
    return Dataset(samples=samples, seed=seed, task=config, size=size,
                   canvas=canvas)


def coverage_fraction(dataset, grid=10):
    """Fraction of workspace grid cells touched by any object center."""
    occupied = np.zeros((grid, grid), dtype=bool)
    for sample in dataset.samples:
        for obj in sample.objects:
            x, y = obj.position
            i = min(int((y / WORKSPACE_CM + 0.5) * grid), grid - 1)
            j = min(int((x / WORKSPACE_CM + 0.5) * grid), grid - 1)
            occupied[i, j] = True
    return occupied.mean()


# -- file format -------------------------------------------------------------


def save_dataset(dataset, path):
    """Write the binary container; ``load_dataset`` round-trips it."""
    parts = [_MAGIC, struct.pack("<B", _VERSION)]
    h, w = dataset.canvas
    parts.append(struct.pack("<BIQHH", int(dataset.task.task), dataset.size,
                             dataset.seed, h, w))
    for sample in dataset.samples:
        hwc = np.ascontiguousarray(
            sample.image.transpose(1, 2, 0), dtype="<f4")
        parts.append(hwc.tobytes())
        parts.append(struct.pack("<B", len(sample.objects)))
        for obj in sample.objects:
            x, y = obj.position
            parts.append(struct.pack("<Bff", int(obj.kind), x, y))
        cond = sample.condition
        if cond is None:
            parts.append(struct.pack("<B", 0))
        else:
            parts.append(struct.pack("<B", len(cond)))
            parts.append(np.asarray(cond, dtype="<f4").tobytes())
        parts.append(struct.pack("<B", len(sample.targets)))
        for x, y in sample.targets:
            parts.append(struct.pack("<ff", x, y))
    with open(path, "wb") as f:
        f.write(b"".join(parts))


class _Reader:
    """Byte cursor that reports its offset on truncation."""

    def __init__(self, blob):
        self.blob = blob
        self.pos = 0

    def take(self, n, what):
        if self.pos + n > len(self.blob):
            raise DatasetFormatError(
                f"truncated file while reading {what}", offset=self.pos)
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_dataset(path):
    with open(path, "rb") as f:
        blob = f.read()
    r = _Reader(blob)
    if r.take(4, "magic") != _MAGIC:
        raise DatasetFormatError("not a dataset file (bad magic)", offset=0)
    (version,) = r.unpack("<B", "version")
    if version != _VERSION:
        raise DatasetFormatError(
            f"unsupported dataset version {version}", offset=4)
    task_id, size, seed, h, w = r.unpack("<BIQHH", "header")
    try:
        config = task_config(Task(task_id))
    except ValueError:
        raise DatasetFormatError(f"unknown task id {task_id}", offset=5)

    samples = []
    for _ in range(size):
        img = np.frombuffer(
            r.take(h * w * 3 * 4, "image"), dtype="<f4").reshape(h, w, 3)
        image = np.ascontiguousarray(img.transpose(2, 0, 1))
        (n_objects,) = r.unpack("<B", "object count")
        objects = []
        for _ in range(n_objects):
            kind, x, y = r.unpack("<Bff", "object record")
            objects.append(ObjectSpec(ObjectKind(kind), (x, y)))
        (cond_len,) = r.unpack("<B", "condition length")
        condition = None
        if cond_len:
            condition = np.frombuffer(
                r.take(cond_len * 4, "condition"), dtype="<f4").copy()
        (n_targets,) = r.unpack("<B", "target count")
        targets = np.zeros((n_targets, 2), dtype=np.float32)
        for i in range(n_targets):
            targets[i] = r.unpack("<ff", "target")
        samples.append(SceneSample(image=image, objects=objects,
                                   condition=condition, targets=targets))
    if r.pos != len(blob):
        raise DatasetFormatError(
            f"{len(blob) - r.pos} trailing bytes after last sample",
            offset=r.pos)
    return Dataset(samples=samples, seed=seed, task=config, size=size,
                   canvas=(h, w))
