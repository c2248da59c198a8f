"""Training loop shared by every model.

Deterministic end to end: batch shuffling draws from a stream keyed by
(seed, epoch), so an interrupted run resumed from a checkpoint replays
the exact remaining schedule. Divergence (non-finite loss) aborts with
the last good checkpoint retained.
"""

import csv
import struct
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .._precision import get_dtype
from ..autodiff import Tensor
from ..autodiff._convkernels import clear_buffers
from ..errors import ParameterError, TrainingDivergedError
from ..models.checkpoint import save_model
from .adam import Adam
from .losses import training_loss

_STATE_MAGIC = b"GATS"
_STATE_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 2000
    batch_size: int | None = None  # None: full batch up to 20, else 20
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    recon_weight: float = 0.1
    checkpoint_every: int = 500

    def __post_init__(self):
        if self.epochs < 0:
            raise ParameterError(f"epochs must be >= 0, got {self.epochs}")
        for name in ("lr", "beta1", "beta2", "eps", "recon_weight",
                     "checkpoint_every"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")

    def resolve_batch_size(self, n):
        if self.batch_size is not None:
            return min(self.batch_size, n)
        return n if n <= 20 else 20


@dataclass
class TrainLog:
    rows: list = field(default_factory=list)  # (epoch, loss, eval_cm, secs)

    def append(self, epoch, loss, eval_cm, seconds):
        self.rows.append((epoch, loss, eval_cm, seconds))

    @property
    def losses(self):
        return [r[1] for r in self.rows]

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["epoch", "loss", "eval_cm", "seconds"])
            for epoch, loss, eval_cm, seconds in self.rows:
                writer.writerow([epoch, repr(loss), repr(eval_cm),
                                 f"{seconds:.3f}"])


def _coord_error_cm(pred, targets):
    d = pred - targets
    return float(np.sqrt((d * d).sum(axis=-1)).mean())


def save_train_state(optimizer, epoch, path):
    parts = [_STATE_MAGIC, struct.pack("<BIQ", _STATE_VERSION, epoch,
                                       optimizer.t)]
    for m, v in zip(optimizer.m, optimizer.v):
        for arr in (m, v):
            parts.append(struct.pack("<I", arr.size))
            parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_train_state(optimizer, path):
    """Restore optimizer state; returns the epoch it was saved at."""
    blob = Path(path).read_bytes()
    if blob[:4] != _STATE_MAGIC:
        raise ParameterError(f"{path} is not a training state file")
    version, epoch, t = struct.unpack_from("<BIQ", blob, 4)
    if version != _STATE_VERSION:
        raise ParameterError(f"unsupported training state version {version}")
    pos = 4 + struct.calcsize("<BIQ")
    m_list, v_list = [], []
    for _ in optimizer.params:
        for dest in (m_list, v_list):
            (size,) = struct.unpack_from("<I", blob, pos)
            pos += 4
            arr = np.frombuffer(blob, dtype="<f8", count=size, offset=pos)
            pos += size * 8
            dest.append(arr)
    shaped_m = [a.reshape(p.data.shape)
                for a, p in zip(m_list, optimizer.params)]
    shaped_v = [a.reshape(p.data.shape)
                for a, p in zip(v_list, optimizer.params)]
    optimizer.load_state_arrays(t, shaped_m, shaped_v)
    return epoch


def train(model, dataset, config, ckpt_dir=None, task=None,
          resume_from=None, log_cb=None):
    """Fit ``model`` on ``dataset``; returns (model, TrainLog).

    The logged ``eval_cm`` column is the mean coordinate error over the
    epoch's own training predictions (an in-sample figure; held-out
    evaluation is a separate step).

    ``ckpt_dir`` enables periodic checkpoints (model + optimizer state);
    ``resume_from`` names a checkpoint stem written that way and
    continues the run from the epoch after it.
    """
    clear_buffers()  # do not inherit conv scratch space from other runs
    dtype = get_dtype()
    images = dataset.images().astype(dtype)
    targets = dataset.targets().astype(dtype)
    conditions = dataset.conditions()
    if conditions is not None:
        conditions = conditions.astype(dtype)

    n = len(dataset.samples)
    batch_size = config.resolve_batch_size(n)
    optimizer = Adam(model.parameters(), lr=config.lr,
                     betas=(config.beta1, config.beta2), eps=config.eps)

    start_epoch = 0
    if resume_from is not None:
        start_epoch = load_train_state(optimizer, resume_from) + 1

    ckpt_dir = Path(ckpt_dir) if ckpt_dir is not None else None
    if ckpt_dir is not None:
        ckpt_dir.mkdir(parents=True, exist_ok=True)
    last_good = None  # (epoch, checkpoint path or in-memory params)
    last_good_params = [p.data.copy() for p in model.parameters()]

    log = TrainLog()
    t0 = time.perf_counter()
    for epoch in range(start_epoch, config.epochs):
        order = np.random.default_rng(
            (config.seed, epoch)).permutation(n)
        total_loss = 0.0
        total_err = 0.0
        for start in range(0, n, batch_size):
            idx = order[start:start + batch_size]
            batch_images = Tensor(images[idx])
            batch_cond = (None if conditions is None
                          else Tensor(conditions[idx]))
            model.zero_grad()
            loss, pred = training_loss(
                model, batch_images, targets[idx], batch_cond,
                recon_weight=config.recon_weight)
            loss_val = loss.item()
            if not np.isfinite(loss_val):
                for p, good in zip(model.parameters(), last_good_params):
                    p.data = good
                raise TrainingDivergedError(
                    f"non-finite loss {loss_val} at epoch {epoch}; "
                    f"parameters restored to "
                    f"{'checkpoint ' + str(last_good) if last_good else 'init'}",
                    last_checkpoint=last_good)
            loss.backward()
            optimizer.step()
            total_loss += loss_val * len(idx)
            total_err += _coord_error_cm(pred, targets[idx]) * len(idx)

        log.append(epoch, total_loss / n, total_err / n,
                   time.perf_counter() - t0)
        if log_cb is not None:
            log_cb(epoch, log.rows[-1])

        if (epoch + 1) % config.checkpoint_every == 0 or \
                epoch == config.epochs - 1:
            last_good_params = [p.data.copy() for p in model.parameters()]
            if ckpt_dir is not None:
                stem = ckpt_dir / f"epoch_{epoch:06d}"
                save_model(model, stem.with_suffix(".gamc"), task=task)
                save_train_state(optimizer, epoch,
                                 stem.with_suffix(".gats"))
                last_good = stem

    return model, log
