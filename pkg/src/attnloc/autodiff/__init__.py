from .gradcheck import grad_check
from .ops import (
    concat,
    concat_coords,
    conv2d,
    coordinate_channels,
    dense,
    softmax2d,
)
from .tensor import Tensor

__all__ = [
    "Tensor",
    "concat",
    "concat_coords",
    "conv2d",
    "coordinate_channels",
    "dense",
    "softmax2d",
    "grad_check",
]
