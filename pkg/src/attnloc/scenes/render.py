"""Deterministic 2-d rasterizer for tabletop-like scenes.

The 60x60 cm workspace maps to the full canvas; object footprints are
hard-edged color fills over a light checkerboard, so ground-truth
positions are recoverable from color masks. Apparent object size varies
+-10% with distance from the canvas center, mimicking how a real
camera's perspective changes object appearance across the table.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import SceneGenerationError
from .tasks import (
    OBJECT_WIDTH_CM,
    POSITION_LIMIT_CM,
    WORKSPACE_CM,
    ObjectKind,
)

DEFAULT_CANVAS = (64, 64)

OBJECT_COLORS = {
    ObjectKind.DISC: (0.85, 0.20, 0.15),
    ObjectKind.SQUARE: (0.15, 0.35, 0.85),
    ObjectKind.TRIANGLE: (0.95, 0.75, 0.10),
}

_CHECKER_LIGHT = (0.92, 0.92, 0.90)
_CHECKER_DARK = (0.82, 0.82, 0.80)
_CHECKER_CELL_PX = 8

# Footprint geometry in cm, before the distance-dependent scale factor.
# Sized so the worst-case scaled footprint stays on-canvas at the
# position margin and stays disjoint at the minimum center separation.
_DISC_RADIUS_CM = 0.45 * OBJECT_WIDTH_CM
_SQUARE_HALF_CM = 0.38 * OBJECT_WIDTH_CM
_TRIANGLE_RADIUS_CM = 0.45 * OBJECT_WIDTH_CM

_MAX_CENTER_DIST_CM = POSITION_LIMIT_CM * np.sqrt(2.0)


@dataclass(frozen=True)
class ObjectSpec:
    """One object: its kind and center position in the workspace frame."""

    kind: ObjectKind
    position: tuple  # (x_cm, y_cm)
    width_cm: float = OBJECT_WIDTH_CM

    def validate(self):
        if self.width_cm != OBJECT_WIDTH_CM:
            raise SceneGenerationError(
                f"object width is fixed at {OBJECT_WIDTH_CM} cm, "
                f"got {self.width_cm}")
        x, y = self.position
        if abs(x) > POSITION_LIMIT_CM or abs(y) > POSITION_LIMIT_CM:
            raise SceneGenerationError(
                f"position ({x:.2f}, {y:.2f}) violates the "
                f"{POSITION_LIMIT_CM:.1f} cm placement margin")


def workspace_to_pixel(x_cm, y_cm, height, width):
    """Project workspace cm to fractional pixel (u, v) = (col, row)."""
    u = (x_cm / WORKSPACE_CM + 0.5) * (width - 1)
    v = (y_cm / WORKSPACE_CM + 0.5) * (height - 1)
    return u, v


def pixel_to_workspace(u, v, height, width):
    x = (u / (width - 1) - 0.5) * WORKSPACE_CM
    y = (v / (height - 1) - 0.5) * WORKSPACE_CM
    return x, y


def normalized_to_workspace(xy):
    """Map [-1,1]-normalized image coordinates to workspace cm."""
    return np.asarray(xy) * (WORKSPACE_CM / 2)


def workspace_to_normalized(xy):
    return np.asarray(xy) / (WORKSPACE_CM / 2)


def apparent_scale(x_cm, y_cm):
    """Distance-dependent footprint scale in [0.9, 1.1]: objects render
    largest at the canvas center and shrink toward the edges."""
    t = min(np.hypot(x_cm, y_cm) / _MAX_CENTER_DIST_CM, 1.0)
    return 1.1 - 0.2 * t


def _pixel_grid_cm(height, width):
    us = np.arange(width, dtype=np.float64)
    vs = np.arange(height, dtype=np.float64)
    xs = (us / (width - 1) - 0.5) * WORKSPACE_CM
    ys = (vs / (height - 1) - 0.5) * WORKSPACE_CM
    return np.meshgrid(xs, ys)  # each [H,W]


def _checkerboard(height, width):
    img = np.empty((3, height, width), dtype=np.float32)
    rows = (np.arange(height) // _CHECKER_CELL_PX)[:, None]
    cols = (np.arange(width) // _CHECKER_CELL_PX)[None, :]
    dark = (rows + cols) % 2 == 1
    for ch in range(3):
        img[ch] = np.where(dark, _CHECKER_DARK[ch], _CHECKER_LIGHT[ch])
    return img


def footprint_mask(spec, height, width):
    """Boolean [H,W] mask of the pixels the object covers."""
    x0, y0 = spec.position
    s = apparent_scale(x0, y0)
    gx, gy = _pixel_grid_cm(height, width)
    dx, dy = gx - x0, gy - y0
    if spec.kind == ObjectKind.DISC:
        r = _DISC_RADIUS_CM * s
        return dx * dx + dy * dy <= r * r
    if spec.kind == ObjectKind.SQUARE:
        h = _SQUARE_HALF_CM * s
        return (np.abs(dx) <= h) & (np.abs(dy) <= h)
    # Triangle: equilateral, apex toward -y, centered on its area centroid.
    rc = _TRIANGLE_RADIUS_CM * s
    verts = [(0.0, -rc),
             (rc * np.cos(np.pi / 6), rc * np.sin(np.pi / 6)),
             (-rc * np.cos(np.pi / 6), rc * np.sin(np.pi / 6))]
    mask = np.ones_like(dx, dtype=bool)
    for (ax, ay), (bx, by) in zip(verts, verts[1:] + verts[:1]):
        cross = (bx - ax) * (dy - ay) - (by - ay) * (dx - ax)
        mask &= cross >= 0
    return mask


def render_scene(specs, canvas=DEFAULT_CANVAS):
    """Rasterize objects onto the checkerboard; returns [3,H,W] in [0,1]."""
    height, width = canvas
    for spec in specs:
        spec.validate()
    img = _checkerboard(height, width)
    for spec in specs:
        mask = footprint_mask(spec, height, width)
        color = OBJECT_COLORS[spec.kind]
        for ch in range(3):
            img[ch][mask] = color[ch]
    return img


def color_mask(image, kind, tol=1e-3):
    """Pixels matching an object kind's fill color; inverse of the fill."""
    color = OBJECT_COLORS[kind]
    mask = np.ones(image.shape[1:], dtype=bool)
    for ch in range(3):
        mask &= np.abs(image[ch] - color[ch]) < tol
    return mask


def mask_centroid(mask):
    """(u, v) centroid of a boolean mask; None when the mask is empty."""
    vs, us = np.nonzero(mask)
    if us.size == 0:
        return None
    return us.mean(), vs.mean()
