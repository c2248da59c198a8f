"""The four comparison architectures.

All share the autodiff engine, the training loop, and (where they
localize via heatmaps) the same soft-argmax extraction code as the
attention model, so benchmark differences come from architecture alone.
The convolutional trunks here deliberately omit coordinate channels:
these baselines measure what plain convolutions learn about position.
"""

import numpy as np

from ..autodiff import Tensor, concat, softmax2d
from ..errors import ShapeError
from .attention import OUTPUT_SCALE_CM, coordinate_value, soft_extract
from .config import ModelConfig
from .layers import MLP, Conv2d, ConvStack, Module

# Spatial softmax in the baselines uses no sharpening; the score maps
# are taken as-is.
_SPATIAL_SOFTMAX_T = 1.0


def _append_condition(x, conditions):
    if conditions is None:
        return x
    return concat([x, conditions], axis=-1)


def downsample_gray(images, size):
    """[N,3,H,W] -> [N,1,size,size] grayscale average-pool target."""
    n, _, h, w = images.shape
    if h % size or w % size:
        raise ShapeError(f"canvas {h}x{w} not divisible by {size}")
    gray = images.mean(axis=1)
    fh, fw = h // size, w // size
    pooled = gray.reshape(n, size, fh, size, fw).mean(axis=(2, 4))
    return pooled.reshape(n, 1, size, size)


class SpatialSoftArgmax(Module):
    """Conv trunk -> per-channel spatial softmax -> expected coordinates.

    Output points are [N,q,2] in [-1,1] image units; extraction reuses
    the attention model's soft_extract, so the two paths are identical
    given identical heatmaps.
    """

    def __init__(self, config: ModelConfig, rng):
        q = config.heads
        self.trunk = ConvStack((3, *config.encoder_channels, q), rng,
                               with_coords=False, final_relu=False)
        h, w = config.canvas
        self.v_coord = coordinate_value(h, w)

    def heatmaps(self, images):
        return softmax2d(self.trunk(images), _SPATIAL_SOFTMAX_T)

    def __call__(self, images):
        m = self.heatmaps(images)  # [N,q,H,W]
        v = self.v_coord.reshape(1, 1, 2, *self.v_coord.shape[-2:])
        return soft_extract(m, v), m  # points [N,q,2], heatmaps


class KeypointNet(Module):
    """Soft-argmax keypoints fed (with any condition) to a coordinate MLP."""

    def __init__(self, config: ModelConfig, rng):
        self.config = config
        self.encoder = SpatialSoftArgmax(config, rng)
        in_dim = config.heads * 2 + config.condition_dim
        self.readout = MLP((in_dim, *config.readout_hidden,
                            config.n_targets * 2), rng)

    def forward(self, images, conditions=None):
        n = images.shape[0]
        points, _ = self.encoder(images)
        flat = _append_condition(points.reshape(n, -1), conditions)
        out = self.readout(flat) * OUTPUT_SCALE_CM
        return out.reshape(n, self.config.n_targets, 2)

    def keypoints(self, images):
        points, heatmaps = self.encoder(Tensor(np.asarray(images)))
        return points.data, heatmaps.data

    def predict(self, images, conditions=None):
        images_t = Tensor(np.asarray(images))
        cond_t = None if conditions is None else Tensor(np.asarray(conditions))
        return self.forward(images_t, cond_t).data


class SpatialAENet(Module):
    """Soft-argmax encoder whose keypoints must also reconstruct the scene.

    The decoder regenerates a low-resolution grayscale view from the
    keypoints; coordinates are predicted from the same keypoints. The
    training loss adds the reconstruction error to the coordinate error.
    """

    def __init__(self, config: ModelConfig, rng):
        self.config = config
        self.encoder = SpatialSoftArgmax(config, rng)
        points_dim = config.heads * 2
        r = config.recon_size
        self.decoder = MLP((points_dim, *config.decoder_hidden, r * r), rng)
        self.readout = MLP((points_dim + config.condition_dim,
                            *config.readout_hidden,
                            config.n_targets * 2), rng)

    def forward(self, images, conditions=None):
        coords, recon = self.forward_with_recon(images, conditions)
        return coords

    def forward_with_recon(self, images, conditions=None):
        n = images.shape[0]
        points, _ = self.encoder(images)
        flat = points.reshape(n, -1)
        r = self.config.recon_size
        recon = self.decoder(flat).reshape(n, 1, r, r)
        coords_in = _append_condition(flat, conditions)
        coords = (self.readout(coords_in) * OUTPUT_SCALE_CM).reshape(
            n, self.config.n_targets, 2)
        return coords, recon

    def predict(self, images, conditions=None):
        images_t = Tensor(np.asarray(images))
        cond_t = None if conditions is None else Tensor(np.asarray(conditions))
        return self.forward(images_t, cond_t).data


class ConvAENet(Module):
    """Strided conv encoder to one latent vector, MLP decoder and head."""

    def __init__(self, config: ModelConfig, rng):
        self.config = config
        h, w = config.canvas
        widths = (3, *config.ae_channels)
        self.encoder_convs = [
            Conv2d(a, b, rng, stride=2, padding=1)
            for a, b in zip(widths, widths[1:])
        ]
        down = 2 ** len(self.encoder_convs)
        if h % down or w % down:
            raise ShapeError(
                f"canvas {h}x{w} not divisible by encoder downsampling "
                f"factor {down}")
        feat = config.ae_channels[-1] * (h // down) * (w // down)
        self.to_latent = MLP((feat, config.latent_dim), rng)
        r = config.recon_size
        self.decoder = MLP((config.latent_dim, *config.decoder_hidden,
                            r * r), rng)
        self.readout = MLP((config.latent_dim + config.condition_dim,
                            *config.readout_hidden,
                            config.n_targets * 2), rng)

    def latent(self, images):
        x = images
        for conv in self.encoder_convs:
            x = conv(x).relu()
        n = x.shape[0]
        return self.to_latent(x.reshape(n, -1))

    def forward(self, images, conditions=None):
        coords, recon = self.forward_with_recon(images, conditions)
        return coords

    def forward_with_recon(self, images, conditions=None):
        n = images.shape[0]
        z = self.latent(images)
        r = self.config.recon_size
        recon = self.decoder(z).reshape(n, 1, r, r)
        coords_in = _append_condition(z, conditions)
        coords = (self.readout(coords_in) * OUTPUT_SCALE_CM).reshape(
            n, self.config.n_targets, 2)
        return coords, recon

    def predict(self, images, conditions=None):
        images_t = Tensor(np.asarray(images))
        cond_t = None if conditions is None else Tensor(np.asarray(conditions))
        return self.forward(images_t, cond_t).data


class PlainFCNNet(Module):
    """Conv trunk, global average pool, coordinate MLP. No tricks."""

    def __init__(self, config: ModelConfig, rng):
        self.config = config
        out = config.encoder_channels[-1]
        self.trunk = ConvStack((3, *config.encoder_channels, out), rng,
                               with_coords=False)
        self.readout = MLP((out + config.condition_dim,
                            *config.readout_hidden,
                            config.n_targets * 2), rng)

    def forward(self, images, conditions=None):
        n = images.shape[0]
        pooled = self.trunk(images).mean(axis=(-2, -1))
        flat = _append_condition(pooled, conditions)
        out = self.readout(flat) * OUTPUT_SCALE_CM
        return out.reshape(n, self.config.n_targets, 2)

    def predict(self, images, conditions=None):
        images_t = Tensor(np.asarray(images))
        cond_t = None if conditions is None else Tensor(np.asarray(conditions))
        return self.forward(images_t, cond_t).data
