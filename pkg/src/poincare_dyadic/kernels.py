"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Set ``POINCARE_DYADIC_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("POINCARE_DYADIC_PURE", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

neumaier_sum = _impl.neumaier_sum
weighted_power_rows = _impl.weighted_power_rows
laplacian_1d = _impl.laplacian_1d
laplacian_2d = _impl.laplacian_2d

__all__ = [
    "BACKEND",
    "neumaier_sum",
    "weighted_power_rows",
    "laplacian_1d",
    "laplacian_2d",
]
