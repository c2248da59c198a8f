"""The query-controlled spatial attention model.

An image encoder produces a per-pixel key map; a query vector (learned
freely, computed from an input condition, or their sum) is dotted
against every pixel and softmax-sharpened into a heatmap. The heatmap
then takes expectations over a learned per-pixel feature map and over a
fixed coordinate map, yielding a feature vector and a differentiable
image-space location per attention head. A small MLP maps both to
workspace coordinates.

Note on score scaling: pixel scores are divided by sqrt(H*W) of the key
map, i.e. by the square root of the pixel count rather than of the
feature dimension used elsewhere in attention literature. This is
intentional; see the README.
"""

from dataclasses import dataclass

import numpy as np

from ..autodiff import Tensor, concat, coordinate_channels, softmax2d
from ..errors import ContractError, ShapeError
from ..scenes import WORKSPACE_CM
from .config import ModelConfig, QueryMode
from .layers import MLP, ConvStack, Module

_NORMALIZATION_TOL = 1e-6

# Readout MLPs emit coordinates in workspace half-extent units; scaling
# to cm here keeps the learnable weights near their init magnitude.
OUTPUT_SCALE_CM = WORKSPACE_CM / 2


def attention_heatmap(key, query, temperature):
    """Heatmap from per-pixel scaled dot products of key and query.

    ``key`` is [D,H,W] or [N,D,H,W]; ``query`` is [D] or [N,D]. Scores
    are <key(u,v), query> / sqrt(H*W), softmaxed over the pixels with
    the given temperature.
    """
    d = key.shape[-3]
    h, w = key.shape[-2:]
    if query.shape[-1] != d:
        raise ShapeError(
            f"query {query.shape} does not match key depth {key.shape}")
    q = query.reshape(query.shape[:-1] + (d, 1, 1))
    scores = (key * q).sum(axis=-3) / np.sqrt(h * w)
    return softmax2d(scores, temperature)


def coordinate_value(height, width):
    """Fixed [2,H,W] tensor of normalized pixel coordinates."""
    return Tensor(coordinate_channels(height, width))


def _check_normalized(heatmap):
    sums = heatmap.data.sum(axis=(-2, -1), dtype=np.float64)
    if not np.all(np.abs(sums - 1.0) <= _NORMALIZATION_TOL):
        worst = float(np.abs(sums - 1.0).max())
        raise ContractError(
            f"heatmap mass deviates from 1 by {worst:.3e}; refusing to "
            "extract from an unnormalized heatmap")


def soft_extract(heatmap, values):
    """Expectation of per-pixel values under a normalized heatmap.

    ``heatmap`` carries any leading shape over [H,W]; ``values`` must
    broadcast against it with one extra channel axis before the spatial
    axes. Raises rather than renormalizing when the heatmap mass is off.
    """
    _check_normalized(heatmap)
    m = heatmap.reshape(heatmap.shape[:-2] + (1,) + heatmap.shape[-2:])
    return (m * values).sum(axis=(-2, -1))


def extract(heatmap, v_feat, v_coord):
    """(feature vector, coordinate) expectations under one heatmap."""
    return soft_extract(heatmap, v_feat), soft_extract(heatmap, v_coord)


@dataclass
class AttentionState:
    """Per-head attention internals for one batch, detached from the graph.

    heatmaps: [N,heads,H,W]; features: [N,heads,value_dim];
    coords: [N,heads,2] in [-1,1] image-normalized units.
    """

    heatmaps: np.ndarray
    features: np.ndarray
    coords: np.ndarray

    @property
    def heads(self):
        return self.heatmaps.shape[1]


class QueryBank(Module):
    """Produces one query vector per attention head.

    Base queries are free learnable vectors. Conditioned queries pass a
    one-hot task condition through an MLP. Combined mode sums the two,
    letting the learned vector carry appearance and the condition shift
    it.
    """

    def __init__(self, config: ModelConfig, rng):
        self.mode = config.query_mode
        self.base_queries = [
            Tensor(rng.normal(0.0, 1.0, config.key_dim), requires_grad=True)
            for _ in range(config.heads)
        ]
        self.condition_mlp = None
        if self.mode != QueryMode.BASE:
            if config.condition_dim < 1:
                raise ContractError(
                    "conditioned query modes require condition_dim >= 1")
            widths = (config.condition_dim, *config.query_hidden,
                      config.key_dim)
            self.condition_mlp = MLP(widths, rng)

    def __call__(self, head, condition=None):
        if self.mode == QueryMode.BASE:
            return self.base_queries[head]
        if condition is None:
            raise ContractError(
                f"query mode {self.mode.name} requires a condition")
        projected = self.condition_mlp(condition)
        if self.mode == QueryMode.CONDITIONED:
            return projected
        return self.base_queries[head] + projected


class AttentionNet(Module):
    """Full model: key/value encoders, query bank, and readout."""

    def __init__(self, config: ModelConfig, rng):
        self.config = config
        d, dv = config.key_dim, config.value_dim
        # Key encoder: coordinate channels feed every conv so the key map
        # can express position; the value encoder sees appearance only.
        self.key_encoder = ConvStack(
            (3, *config.encoder_channels, d), rng, with_coords=True)
        self.value_encoder = ConvStack(
            (3, *config.value_channels, dv), rng, with_coords=False)
        self.queries = QueryBank(config, rng)
        self.readout = MLP((2 + dv, *config.readout_hidden, 2), rng)
        h, w = config.canvas
        self.v_coord = coordinate_value(h, w)

    def compute_key(self, images):
        return self.key_encoder(images)

    def _head_outputs(self, images, conditions=None):
        """Graph-connected per-head (heatmap, feature, coord) tensors."""
        if images.ndim != 4:
            raise ShapeError(f"expected [N,3,H,W] images, got {images.shape}")
        key = self.compute_key(images)
        v_feat = self.value_encoder(images)
        outputs = []
        for head in range(self.config.heads):
            q = self.queries(head, conditions)
            m = attention_heatmap(key, q, self.config.temperature)
            a_feat, a_coord = extract(m, v_feat, self.v_coord)
            outputs.append((m, a_feat, a_coord))
        return outputs

    def forward(self, images, conditions=None):
        """Predicted workspace coordinates, [N,heads,2] in cm."""
        n = images.shape[0]
        preds = []
        for m, a_feat, a_coord in self._head_outputs(images, conditions):
            readout_in = concat([a_coord, a_feat], axis=-1)
            out = self.readout(readout_in) * OUTPUT_SCALE_CM
            preds.append(out.reshape(n, 1, 2))
        return concat(preds, axis=1)

    def attend(self, images, conditions=None):
        """AttentionState for a numpy image batch (no gradients kept)."""
        images_t = Tensor(np.asarray(images))
        cond_t = None if conditions is None else Tensor(np.asarray(conditions))
        outs = self._head_outputs(images_t, cond_t)
        return AttentionState(
            heatmaps=np.stack([m.data for m, _, _ in outs], axis=1),
            features=np.stack([f.data for _, f, _ in outs], axis=1),
            coords=np.stack([c.data for _, _, c in outs], axis=1),
        )

    def predict(self, images, conditions=None):
        images_t = Tensor(np.asarray(images))
        cond_t = None if conditions is None else Tensor(np.asarray(conditions))
        return self.forward(images_t, cond_t).data
