import numpy as np
import pytest

from attnloc import _precision


@pytest.fixture(autouse=True)
def f64_default():
    """Gradient checks and oracle comparisons assume 64-bit arithmetic."""
    prev = _precision.get_dtype()
    _precision.set_precision("f64")
    yield
    _precision._active = prev


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
