"""Binary model checkpoints.

Layout: magic "GAMC", version byte, model kind, task tag, a fixed-layout
config block, then every parameter tensor in declaration order as
little-endian float32 with a shape prefix. Parameters are stored at
float32 regardless of the active arithmetic width, so a save->load->save
cycle is byte-stable.
"""

import struct

import numpy as np

from ..errors import CheckpointFormatError
from ..scenes import Task
from .attention import AttentionNet
from .baselines import ConvAENet, KeypointNet, PlainFCNNet, SpatialAENet
from .config import ModelConfig, ModelKind, QueryMode

_MAGIC = b"GAMC"
_VERSION = 1
_NO_TASK = 255

_BUILDERS = {
    ModelKind.ATTENTION: AttentionNet,
    ModelKind.KEYPOINT_MIN: KeypointNet,
    ModelKind.KEYPOINT_16: KeypointNet,
    ModelKind.SPATIAL_AE: SpatialAENet,
    ModelKind.CONV_AE: ConvAENet,
    ModelKind.PLAIN_FCN: PlainFCNNet,
}


def build_model(config, seed=0):
    """Instantiate the architecture for a config with seeded init."""
    rng = np.random.default_rng((seed, int(config.kind)))
    return _BUILDERS[config.kind](config, rng)


def _pack_widths(widths):
    return struct.pack("<B", len(widths)) + b"".join(
        struct.pack("<H", w) for w in widths)


def _config_blob(config):
    parts = [struct.pack(
        "<HHHHHBf", config.heads, config.key_dim, config.value_dim,
        config.n_targets, config.condition_dim, int(config.query_mode),
        config.temperature)]
    parts.append(struct.pack("<HH", *config.canvas))
    parts.append(struct.pack("<HH", config.latent_dim, config.recon_size))
    for widths in (config.encoder_channels, config.value_channels,
                   config.readout_hidden, config.query_hidden,
                   config.decoder_hidden, config.ae_channels):
        parts.append(_pack_widths(widths))
    return b"".join(parts)


def save_model(model, path, task=None):
    config = model.config
    task_tag = _NO_TASK if task is None else int(task)
    parts = [_MAGIC, struct.pack("<BBB", _VERSION, int(config.kind),
                                 task_tag)]
    parts.append(_config_blob(config))
    params = model.parameters()
    parts.append(struct.pack("<I", len(params)))
    for p in params:
        shape = p.data.shape
        parts.append(struct.pack("<B", len(shape)))
        parts.append(b"".join(struct.pack("<I", d) for d in shape))
        parts.append(np.ascontiguousarray(p.data, dtype="<f4").tobytes())
    with open(path, "wb") as f:
        f.write(b"".join(parts))


class _Reader:
    def __init__(self, blob):
        self.blob = blob
        self.pos = 0

    def take(self, n, what):
        if self.pos + n > len(self.blob):
            raise CheckpointFormatError(
                f"truncated checkpoint while reading {what} "
                f"(byte offset {self.pos})")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt, what):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))

    def widths(self, what):
        (count,) = self.unpack("<B", what)
        return tuple(self.unpack("<H", what)[0] for _ in range(count))


def load_model(path, seed=0):
    """Rebuild the model from a checkpoint; returns (model, task)."""
    with open(path, "rb") as f:
        blob = f.read()
    r = _Reader(blob)
    if r.take(4, "magic") != _MAGIC:
        raise CheckpointFormatError("not a model checkpoint (bad magic)")
    version, kind_id, task_tag = r.unpack("<BBB", "header")
    if version != _VERSION:
        raise CheckpointFormatError(
            f"unsupported checkpoint version {version}")
    try:
        kind = ModelKind(kind_id)
    except ValueError:
        raise CheckpointFormatError(f"unknown model kind {kind_id}")
    heads, key_dim, value_dim, n_targets, condition_dim, qmode, temp = (
        r.unpack("<HHHHHBf", "config"))
    canvas = r.unpack("<HH", "canvas")
    latent_dim, recon_size = r.unpack("<HH", "ae dims")
    encoder_channels = r.widths("encoder widths")
    value_channels = r.widths("value widths")
    readout_hidden = r.widths("readout widths")
    query_hidden = r.widths("query widths")
    decoder_hidden = r.widths("decoder widths")
    ae_channels = r.widths("ae widths")
    config = ModelConfig(
        kind=kind, n_targets=n_targets, heads=heads,
        condition_dim=condition_dim, query_mode=QueryMode(qmode),
        key_dim=key_dim, value_dim=value_dim, temperature=temp,
        canvas=canvas, encoder_channels=encoder_channels,
        value_channels=value_channels, readout_hidden=readout_hidden,
        query_hidden=query_hidden, decoder_hidden=decoder_hidden,
        ae_channels=ae_channels, latent_dim=latent_dim,
        recon_size=recon_size)

    model = build_model(config, seed=seed)
    params = model.parameters()
    (count,) = r.unpack("<I", "parameter count")
    if count != len(params):
        raise CheckpointFormatError(
            f"checkpoint holds {count} parameters, architecture needs "
            f"{len(params)}")
    for p in params:
        (ndim,) = r.unpack("<B", "parameter rank")
        shape = tuple(r.unpack("<I", "parameter dim")[0]
                      for _ in range(ndim))
        if shape != p.data.shape:
            raise CheckpointFormatError(
                f"parameter shape {shape} does not match architecture "
                f"shape {p.data.shape}")
        n_bytes = int(np.prod(shape)) * 4
        data = np.frombuffer(r.take(n_bytes, "parameter data"),
                             dtype="<f4").reshape(shape)
        p.data = data.astype(p.data.dtype)
    if r.pos != len(blob):
        raise CheckpointFormatError(
            f"{len(blob) - r.pos} trailing bytes in checkpoint")
    task = None if task_tag == _NO_TASK else Task(task_tag)
    return model, task
