"""Independent reference implementations used to freeze expected values.

Everything here is deliberately naive (explicit loops, scalar math) and
shares no code with the package under test.
"""

import math

import numpy as np


def conv2d_loops(x, kernel, bias, stride=1, padding=0):
    """Six-nested-loop cross-correlation. x:[C,H,W], kernel:[O,C,kh,kw]."""
    c_in, h, w = x.shape
    o, _, kh, kw = kernel.shape
    xp = np.zeros((c_in, h + 2 * padding, w + 2 * padding), dtype=x.dtype)
    xp[:, padding:padding + h, padding:padding + w] = x
    ho = (h + 2 * padding - kh) // stride + 1
    wo = (w + 2 * padding - kw) // stride + 1
    out = np.zeros((o, ho, wo), dtype=x.dtype)
    for oc in range(o):
        for i in range(ho):
            for j in range(wo):
                acc = 0.0
                for ic in range(c_in):
                    for di in range(kh):
                        for dj in range(kw):
                            acc += (xp[ic, i * stride + di, j * stride + dj]
                                    * kernel[oc, ic, di, dj])
                out[oc, i, j] = acc + bias[oc]
    return out


def dense_loops(x, weights, bias):
    """Dot-product loop oracle for the affine map."""
    m, n = weights.shape
    out = np.zeros(m, dtype=x.dtype)
    for i in range(m):
        acc = 0.0
        for j in range(n):
            acc += weights[i, j] * x[j]
        out[i] = acc + bias[i]
    return out


def softmax2d_scalar(scores, temperature):
    """Scalar exp-normalize reference over a 2-d score map."""
    h, w = scores.shape
    m = max(scores[i, j] / temperature for i in range(h) for j in range(w))
    e = [[math.exp(scores[i, j] / temperature - m) for j in range(w)]
         for i in range(h)]
    total = sum(sum(row) for row in e)
    return np.array([[v / total for v in row] for row in e])


def pixel_scores_loops(key, query, temperature):
    """Per-pixel dot product + exp-normalize heatmap reference."""
    d, h, w = key.shape
    scores = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            acc = 0.0
            for c in range(d):
                acc += key[c, i, j] * query[c]
            scores[i, j] = acc / math.sqrt(h * w)
    return softmax2d_scalar(scores, temperature)


def extract_loops(heatmap, values):
    """Double-loop weighted average of values:[D,H,W] under heatmap:[H,W]."""
    d, h, w = values.shape
    out = np.zeros(d)
    for c in range(d):
        acc = 0.0
        for i in range(h):
            for j in range(w):
                acc += heatmap[i, j] * values[c, i, j]
        out[c] = acc
    return out


def mse_loops(pred, gt, scale):
    """Scalar-loop mean of squared normalized component errors."""
    total = 0.0
    count = 0
    for p, g in zip(pred, gt):
        for pc, gc in zip(p, g):
            total += ((pc - gc) / scale) ** 2
            count += 1
    return total / count


def numeric_gradient(f, x, step=1e-5):
    """Central-difference gradient of scalar f at array x."""
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gf = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        fp = f()
        flat[i] = orig - step
        fm = f()
        flat[i] = orig
        gf[i] = (fp - fm) / (2 * step)
    return g
