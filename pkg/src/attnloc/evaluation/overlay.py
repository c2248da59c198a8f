"""Attention overlays written as binary PPM (P6) images.

Per-head markers land on the head's extracted coordinate; heatmaps are
alpha-blended in the marker color. Output bytes are a pure function of
the inputs.
"""

import numpy as np

from ..errors import AttnlocError

# Marker palette; chosen to never collide with scene colors.
MARKER_COLORS = (
    (0, 255, 0),
    (255, 0, 255),
    (0, 255, 255),
    (255, 128, 0),
    (128, 0, 255),
    (255, 255, 255),
    (0, 0, 0),
    (255, 0, 0),
)

_MARKER_ARMS = 2  # plus-shaped marker, this many pixels per arm


def write_ppm(path, image_u8):
    h, w, c = image_u8.shape
    if c != 3:
        raise AttnlocError(f"PPM needs 3 channels, got {c}")
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    try:
        with open(path, "wb") as f:
            f.write(header)
            f.write(np.ascontiguousarray(image_u8, dtype=np.uint8).tobytes())
    except OSError as exc:
        raise AttnlocError(f"cannot write overlay to {path}: {exc}") from exc


def read_ppm(path):
    with open(path, "rb") as f:
        blob = f.read()
    parts = blob.split(b"\n", 3)
    if parts[0] != b"P6" or len(parts) < 4:
        raise AttnlocError(f"{path} is not a P6 pixmap")
    w, h = (int(v) for v in parts[1].split())
    data = np.frombuffer(parts[3], dtype=np.uint8, count=h * w * 3)
    return data.reshape(h, w, 3).copy()


def marker_color(head):
    return MARKER_COLORS[head % len(MARKER_COLORS)]


def _coord_to_pixel(xy_norm, h, w):
    u = int(round((xy_norm[0] + 1.0) / 2.0 * (w - 1)))
    v = int(round((xy_norm[1] + 1.0) / 2.0 * (h - 1)))
    return u, v


def _draw_marker(canvas, u, v, color):
    h, w, _ = canvas.shape
    for d in range(-_MARKER_ARMS, _MARKER_ARMS + 1):
        if 0 <= v + d < h and 0 <= u < w:
            canvas[v + d, u] = color
        if 0 <= v < h and 0 <= u + d < w:
            canvas[v, u + d] = color


def render_attention_overlay(image, state, out_path, sample=0,
                             heatmap_alpha=0.45):
    """Write one scene's overlay: markers (and heatmap tint) per head.

    ``image`` is [3,H,W] in [0,1]; ``state`` is an AttentionState whose
    ``sample`` index selects the scene. ``heatmap_alpha`` 0 disables the
    heatmap tint.
    """
    img = np.asarray(image)
    h, w = img.shape[1:]
    canvas = (np.clip(img, 0.0, 1.0) * 255.0).round().astype(
        np.uint8).transpose(1, 2, 0).copy()

    heads = state.heads
    if heatmap_alpha > 0:
        blended = canvas.astype(np.float64)
        for head in range(heads):
            m = state.heatmaps[sample, head].astype(np.float64)
            peak = m.max()
            if peak <= 0:
                continue
            weight = (heatmap_alpha * m / peak)[..., None]
            color = np.array(marker_color(head), dtype=np.float64)
            blended = (1.0 - weight) * blended + weight * color
        canvas = blended.round().astype(np.uint8)

    for head in range(heads):
        u, v = _coord_to_pixel(state.coords[sample, head], h, w)
        _draw_marker(canvas, u, v, marker_color(head))
    write_ppm(out_path, canvas)
    return canvas
