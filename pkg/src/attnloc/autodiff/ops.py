"""Differentiable array ops built on :class:`Tensor`.

Everything here accepts either the documented unbatched shapes or the
same shapes with one leading batch axis; the batched forms are what the
training loop actually exercises.
"""

import numpy as np

from .._precision import get_dtype
from ..errors import ParameterError, ShapeError
from .tensor import Tensor


def concat(tensors, axis):
    """Concatenate tensors along ``axis``; gradient splits back."""
    tensors = list(tensors)
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.data.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(grad, parts=tensors, offsets=offsets, axis=axis):
        index = [slice(None)] * grad.ndim
        for part, start, stop in zip(parts, offsets[:-1], offsets[1:]):
            if part.requires_grad:
                index[axis] = slice(start, stop)
                part._accumulate(grad[tuple(index)])

    return Tensor._from_op(out_data, tuple(tensors), backward)


def coordinate_channels(height, width):
    """Constant [2,H,W] array of pixel coordinates, normalized to [-1, 1].

    Channel 0 holds x (varies along width), channel 1 holds y (varies
    along height). A single-pixel axis maps to -1, the start of the
    normalized range.
    """
    if height < 1 or width < 1:
        raise ShapeError(f"extents must be >= 1, got {height}x{width}")
    dtype = get_dtype()
    if width > 1:
        xs = 2.0 * np.arange(width, dtype=dtype) / (width - 1) - 1.0
    else:
        xs = np.full(1, -1.0, dtype=dtype)
    if height > 1:
        ys = 2.0 * np.arange(height, dtype=dtype) / (height - 1) - 1.0
    else:
        ys = np.full(1, -1.0, dtype=dtype)
    grid = np.empty((2, height, width), dtype=dtype)
    grid[0] = xs[None, :]
    grid[1] = ys[:, None]
    return grid


def concat_coords(x):
    """Append normalized x/y coordinate channels to a [C,H,W] or
    [N,C,H,W] tensor. Gradient flows only through the original channels."""
    if x.ndim == 3:
        _, h, w = x.shape
        coords = Tensor(coordinate_channels(h, w))
    elif x.ndim == 4:
        n, _, h, w = x.shape
        grid = coordinate_channels(h, w)
        coords = Tensor(np.broadcast_to(grid[None], (n, 2, h, w)).copy())
    else:
        raise ShapeError(f"expected a 3-d or 4-d tensor, got shape {x.shape}")
    return concat([x, coords], axis=-3)


def softmax2d(scores, temperature):
    """Temperature softmax over the trailing two (spatial) axes.

    Max-shifted for stability: entries stay in [0,1] and sum to 1 per
    score map even for extreme inputs.
    """
    if temperature <= 0:
        raise ParameterError(f"temperature must be > 0, got {temperature}")
    z = scores.data / temperature
    z = z - z.max(axis=(-2, -1), keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=(-2, -1), keepdims=True)

    def backward(grad, a=scores, y=y, t=temperature):
        inner = (grad * y).sum(axis=(-2, -1), keepdims=True)
        a._accumulate(y * (grad - inner) / t)

    return Tensor._from_op(y, (scores,), backward)


def dense(x, weights, bias=None):
    """Affine map over the last axis: ``x @ weights.T + bias``.

    ``x`` may carry any leading shape; ``weights`` is [M,N], ``bias`` [M].
    """
    n_in = x.shape[-1]
    if weights.ndim != 2 or weights.shape[1] != n_in:
        raise ShapeError(
            f"weights {weights.shape} do not match input feature dim {n_in}")
    lead = x.shape[:-1]
    x2 = x.reshape((int(np.prod(lead)) if lead else 1, n_in))
    wt = _transpose2d(weights)
    y = x2 @ wt
    if bias is not None:
        if bias.shape != (weights.shape[0],):
            raise ShapeError(
                f"bias {bias.shape} does not match output dim "
                f"{weights.shape[0]}")
        y = y + bias
    return y.reshape(lead + (weights.shape[0],))


def _transpose2d(t):
    out_data = t.data.T

    def backward(grad, a=t):
        a._accumulate(grad.T)

    return Tensor._from_op(out_data, (t,), backward)


from ._convkernels import col2im as _col2im
from ._convkernels import give_buffer as _give_buffer
from ._convkernels import im2col as _im2col


def conv2d(x, kernel, bias, stride=1, padding=0):
    """2-d cross-correlation of [C,H,W] or [N,C,H,W] input with an
    [O,C,kh,kw] kernel and [O] bias.

    Output extent per axis is floor((extent + 2*padding - k) / stride) + 1.
    Differentiable w.r.t. input, kernel, and bias.
    """
    squeeze = x.ndim == 3
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 4:
        raise ShapeError(f"expected [C,H,W] or [N,C,H,W] input, got {x.shape}")
    if kernel.ndim != 4:
        raise ShapeError(f"expected [O,C,kh,kw] kernel, got {kernel.shape}")
    n, c, h, w = xd.shape
    o, kc, kh, kw = kernel.shape
    if kc != c:
        raise ShapeError(
            f"kernel input channels {kernel.shape} do not match input "
            f"channels {x.shape}")
    if kh > h + 2 * padding or kw > w + 2 * padding:
        raise ShapeError(
            f"kernel {kernel.shape} larger than padded input {x.shape} "
            f"with padding {padding}")
    if bias.shape != (o,):
        raise ShapeError(f"bias {bias.shape} does not match {o} out channels")
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    if padding < 0:
        raise ParameterError(f"padding must be >= 0, got {padding}")

    cols, ho, wo = _im2col(xd, kh, kw, stride, padding)
    wmat = kernel.data.reshape(o, c * kh * kw)
    out = cols @ wmat.T + bias.data
    out = out.reshape(n, ho, wo, o).transpose(0, 3, 1, 2)
    if squeeze:
        out = out[0]

    def backward(grad, x=x, kernel=kernel, bias=bias, cols=cols,
                 wmat=wmat, x_shape=xd.shape, dims=(kh, kw, stride, padding),
                 squeeze=squeeze):
        kh, kw, stride, padding = dims
        g = grad[None] if squeeze else grad
        gcols = g.transpose(0, 2, 3, 1).reshape(-1, wmat.shape[0])
        if bias.requires_grad:
            bias._accumulate(gcols.sum(axis=0))
        if kernel.requires_grad:
            kernel._accumulate((gcols.T @ cols).reshape(kernel.data.shape))
        if x.requires_grad:
            dx, dx_buf = _col2im(gcols @ wmat, x_shape, kh, kw, stride,
                                 padding)
            x._accumulate(dx[0] if squeeze else dx)
            _give_buffer(dx_buf)
        # the patch matrix is only needed until this point; recycle it
        _give_buffer(cols)

    return Tensor._from_op(out, (x, kernel, bias), backward)
