"""Global arithmetic precision switch.

All tensors created by the engine use the active dtype. 64-bit is the
default (and required for gradient checking); 32-bit roughly halves
training time. Selectable via the GAL_PRECISION environment variable
(``f32`` or ``f64``) or programmatically.
"""

import os
from contextlib import contextmanager

import numpy as np

from .errors import ParameterError

_NAMES = {"f32": np.float32, "f64": np.float64}
_active = None


def _from_env():
    name = os.environ.get("GAL_PRECISION", "f64").strip().lower()
    if name not in _NAMES:
        raise ParameterError(
            f"GAL_PRECISION must be 'f32' or 'f64', got {name!r}"
        )
    return _NAMES[name]


def get_dtype():
    """Active numpy dtype for newly created tensors."""
    global _active
    if _active is None:
        _active = _from_env()
    return _active


def set_precision(name):
    """Set the active precision ('f32' or 'f64')."""
    global _active
    if name not in _NAMES:
        raise ParameterError(f"precision must be 'f32' or 'f64', got {name!r}")
    _active = _NAMES[name]


@contextmanager
def precision(name):
    """Temporarily switch precision within a block."""
    global _active
    prev = get_dtype()
    set_precision(name)
    try:
        yield
    finally:
        _active = prev
