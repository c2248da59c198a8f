"""Training losses.

Coordinates are normalized by the workspace half-extent before squaring
so the loss scale is independent of the metric units; AE models add a
weighted image reconstruction term on a downsampled grayscale target.
"""

import numpy as np

from ..autodiff import Tensor
from ..models.baselines import downsample_gray
from ..scenes import WORKSPACE_CM

_SCALE = WORKSPACE_CM / 2


def mse_loss(pred, targets):
    """Mean squared normalized error over all heads and both axes.

    ``pred`` is a Tensor [..., 2] in cm; ``targets`` matches its shape.
    """
    t = targets if isinstance(targets, Tensor) else Tensor(targets)
    diff = (pred - t) * (1.0 / _SCALE)
    return (diff * diff).mean()


def training_loss(model, images, targets, conditions=None, recon_weight=0.1):
    """(scalar loss Tensor, predicted coords ndarray) for one batch.

    Dispatch is uniform across architectures: models exposing
    ``forward_with_recon`` contribute a reconstruction term; everyone
    else trains on the coordinate error alone.
    """
    if hasattr(model, "forward_with_recon"):
        coords, recon = model.forward_with_recon(images, conditions)
        loss = mse_loss(coords, targets)
        target_img = downsample_gray(images.data, recon.shape[-1])
        diff = recon - Tensor(target_img)
        loss = loss + recon_weight * (diff * diff).mean()
    else:
        coords = model.forward(images, conditions)
        loss = mse_loss(coords, targets)
    return loss, coords.data
