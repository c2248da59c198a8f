"""Finite-difference verification of analytic gradients.

Central differences against a scalar-valued tensor program. Must be run
in 64-bit precision; the step/tolerance budget assumes it.
"""

import numpy as np

from ..errors import ContractError


def grad_check(fn, inputs, step=1e-5):
    """Max relative error between analytic and numeric gradients.

    ``fn`` maps the given tensors to a scalar Tensor. Every input with
    ``requires_grad`` is checked element by element:
    |analytic - numeric| / max(|analytic|, |numeric|, 1e-8), numeric via
    central differences of size ``step``.
    """
    out = fn(*inputs)
    if out.size != 1:
        raise ContractError(f"fn must return a scalar, got shape {out.shape}")
    for t in inputs:
        t.grad = None
    out.backward()

    worst = 0.0
    for t in inputs:
        if not t.requires_grad:
            continue
        analytic = np.zeros_like(t.data) if t.grad is None else t.grad
        flat = t.data.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            f_plus = fn(*inputs).item()
            flat[i] = orig - step
            f_minus = fn(*inputs).item()
            flat[i] = orig
            numeric = (f_plus - f_minus) / (2.0 * step)
            a = analytic.reshape(-1)[i]
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
            worst = max(worst, err)
    return worst
