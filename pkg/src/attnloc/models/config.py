"""Architecture configuration shared by all six models.

One config type covers every architecture so that benchmark runs can
diff configs and verify that only architecture fields vary between the
compared models.
"""

from dataclasses import dataclass, field, replace
from enum import IntEnum

from ..errors import ParameterError
from ..scenes import Task, task_config


class ModelKind(IntEnum):
    ATTENTION = 0
    KEYPOINT_MIN = 1
    KEYPOINT_16 = 2
    SPATIAL_AE = 3
    CONV_AE = 4
    PLAIN_FCN = 5


class QueryMode(IntEnum):
    BASE = 0
    CONDITIONED = 1
    COMBINED = 2


MODEL_NAMES = {
    "ours": ModelKind.ATTENTION,
    "keypoint-min": ModelKind.KEYPOINT_MIN,
    "keypoint-16": ModelKind.KEYPOINT_16,
    "dsae": ModelKind.SPATIAL_AE,
    "convae": ModelKind.CONV_AE,
    "fcn": ModelKind.PLAIN_FCN,
}


def model_name(kind):
    for name, k in MODEL_NAMES.items():
        if k == kind:
            return name
    raise KeyError(kind)


@dataclass(frozen=True)
class ModelConfig:
    kind: ModelKind = ModelKind.ATTENTION
    n_targets: int = 1
    heads: int = 1
    condition_dim: int = 0
    query_mode: QueryMode = QueryMode.BASE
    key_dim: int = 8
    value_dim: int = 8
    # Sharpening constant for the attention softmax; fixed, not learned.
    temperature: float = 0.1
    canvas: tuple = (64, 64)
    encoder_channels: tuple = (16, 16)
    value_channels: tuple = (16,)
    readout_hidden: tuple = (64,)
    query_hidden: tuple = (16,)
    decoder_hidden: tuple = (128,)
    ae_channels: tuple = (8, 16, 32)
    latent_dim: int = 32
    recon_size: int = 32

    def __post_init__(self):
        if self.temperature <= 0:
            raise ParameterError(
                f"temperature must be > 0, got {self.temperature}")
        if self.heads < 1:
            raise ParameterError(f"heads must be >= 1, got {self.heads}")
        if self.n_targets < 1:
            raise ParameterError(
                f"n_targets must be >= 1, got {self.n_targets}")

    def architecture_fields(self):
        """Fields that define the architecture (vs. the task binding)."""
        skip = {"n_targets", "condition_dim"}
        return {k: v for k, v in vars(self).items() if k not in skip}


def config_for(kind, task, **overrides):
    """ModelConfig for a (model kind, task) pairing.

    Head counts follow the benchmark convention: one head per target for
    the attention model and the minimal keypoint variant, a redundant 16
    for the q=16 variants. Conditioned queries are used whenever the task
    supplies a condition.
    """
    if isinstance(kind, str):
        kind = MODEL_NAMES[kind]
    tc = task_config(task)
    if kind in (ModelKind.KEYPOINT_16, ModelKind.SPATIAL_AE):
        heads = 16
    elif kind in (ModelKind.ATTENTION, ModelKind.KEYPOINT_MIN):
        heads = tc.targets
    else:
        heads = 1
    query_mode = (QueryMode.CONDITIONED if tc.condition_dim
                  else QueryMode.BASE)
    cfg = ModelConfig(kind=kind, n_targets=tc.targets, heads=heads,
                      condition_dim=tc.condition_dim, query_mode=query_mode)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg
