"""Query-controlled spatial attention for object localization.

A small numpy autodiff engine, a deterministic synthetic scene
generator, the attention model plus four comparison architectures, a
shared training loop, and evaluation/visualization tooling. The
estimator classes in :mod:`attnloc.estimators` expose everything
through a scikit-learn style fit/predict API.
"""

from ._precision import get_dtype, precision, set_precision
from .autodiff import Tensor

__version__ = "0.1.0"

__all__ = ["Tensor", "get_dtype", "set_precision", "precision", "__version__"]
