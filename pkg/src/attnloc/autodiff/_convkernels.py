"""Patch gather/scatter kernels for conv2d.

Pure data movement: numba-compiled loops when numba is importable,
numpy strided copies otherwise. Both paths produce identical values.
"""

import numpy as np

try:
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the fallback flag
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA


# Reusing the large patch/scatter buffers across steps avoids repeated
# page-fault costs on fresh allocations; callers return buffers once the
# backward pass has consumed them.
_POOL = {}
_POOL_CAP = 4


def take_buffer(shape, dtype):
    key = (shape, np.dtype(dtype).str)
    stack = _POOL.get(key)
    if stack:
        return stack.pop()
    return np.empty(shape, dtype=dtype)


def give_buffer(arr):
    key = (arr.shape, arr.dtype.str)
    stack = _POOL.setdefault(key, [])
    if len(stack) < _POOL_CAP:
        stack.append(arr)


def clear_buffers():
    _POOL.clear()


def _pad(x, padding):
    if padding:
        return np.pad(x, ((0, 0), (0, 0), (padding, padding),
                          (padding, padding)))
    return x


def _out_extents(hp, wp, kh, kw, stride):
    return (hp - kh) // stride + 1, (wp - kw) // stride + 1


if HAVE_NUMBA:

    @njit(parallel=True, cache=True)
    def _gather(xp, kh, kw, stride, cols):
        n, c, hp, wp = xp.shape
        ho = (hp - kh) // stride + 1
        wo = (wp - kw) // stride + 1
        for b in prange(n):
            for i in range(ho):
                for j in range(wo):
                    row = (b * ho + i) * wo + j
                    col = 0
                    for ch in range(c):
                        for di in range(kh):
                            for dj in range(kw):
                                cols[row, col] = xp[
                                    b, ch, i * stride + di, j * stride + dj]
                                col += 1

    @njit(parallel=True, cache=True)
    def _scatter(cols, kh, kw, stride, out):
        n, c, hp, wp = out.shape
        ho = (hp - kh) // stride + 1
        wo = (wp - kw) // stride + 1
        for b in prange(n):
            for i in range(ho):
                for j in range(wo):
                    row = (b * ho + i) * wo + j
                    col = 0
                    for ch in range(c):
                        for di in range(kh):
                            for dj in range(kw):
                                out[b, ch, i * stride + di,
                                    j * stride + dj] += cols[row, col]
                                col += 1


def _gather_numpy(xp, kh, kw, stride, cols):
    n, c, hp, wp = xp.shape
    ho, wo = _out_extents(hp, wp, kh, kw, stride)
    sn, sc, sh, sw = xp.strides
    view = np.lib.stride_tricks.as_strided(
        xp, (n, ho, wo, c, kh, kw),
        (sn, sh * stride, sw * stride, sc, sh, sw))
    cols[:] = view.reshape(n * ho * wo, c * kh * kw)


def _scatter_numpy(cols, kh, kw, stride, out):
    n, c, hp, wp = out.shape
    ho, wo = _out_extents(hp, wp, kh, kw, stride)
    grads = cols.reshape(n, ho, wo, c, kh, kw).transpose(0, 3, 4, 5, 1, 2)
    for i in range(kh):
        for j in range(kw):
            out[:, :, i:i + ho * stride:stride,
                j:j + wo * stride:stride] += grads[:, :, i, j]


def im2col(x, kh, kw, stride, padding):
    """[N,C,H,W] -> patch matrix [N*Ho*Wo, C*kh*kw] (pooled buffer)."""
    xp = np.ascontiguousarray(_pad(x, padding))
    n, c, hp, wp = xp.shape
    ho, wo = _out_extents(hp, wp, kh, kw, stride)
    cols = take_buffer((n * ho * wo, c * kh * kw), x.dtype)
    if USE_NUMBA:
        _gather(xp, kh, kw, stride, cols)
    else:
        _gather_numpy(xp, kh, kw, stride, cols)
    return cols, ho, wo


def col2im(cols, x_shape, kh, kw, stride, padding):
    """Scatter-add patch gradients back to the input layout."""
    n, c, h, w = x_shape
    hp, wp = h + 2 * padding, w + 2 * padding
    out = take_buffer((n, c, hp, wp), cols.dtype)
    out[:] = 0.0
    if USE_NUMBA:
        _scatter(np.ascontiguousarray(cols), kh, kw, stride, out)
    else:
        _scatter_numpy(cols, kh, kw, stride, out)
    if padding:
        return out[:, :, padding:hp - padding, padding:wp - padding], out
    return out, out
