from .attention import (
    AttentionNet,
    AttentionState,
    attention_heatmap,
    coordinate_value,
    extract,
    soft_extract,
)
from .baselines import (
    ConvAENet,
    KeypointNet,
    PlainFCNNet,
    SpatialAENet,
    downsample_gray,
)
from .checkpoint import build_model, load_model, save_model
from .config import (
    MODEL_NAMES,
    ModelConfig,
    ModelKind,
    QueryMode,
    config_for,
    model_name,
)
from .layers import MLP, Conv2d, ConvStack, Dense, Module

__all__ = [
    "AttentionNet",
    "AttentionState",
    "attention_heatmap",
    "coordinate_value",
    "extract",
    "soft_extract",
    "KeypointNet",
    "SpatialAENet",
    "ConvAENet",
    "PlainFCNNet",
    "downsample_gray",
    "ModelConfig",
    "ModelKind",
    "QueryMode",
    "MODEL_NAMES",
    "config_for",
    "model_name",
    "build_model",
    "save_model",
    "load_model",
    "Module",
    "Conv2d",
    "Dense",
    "MLP",
    "ConvStack",
]
