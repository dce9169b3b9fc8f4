"""Backend selection for the counting and log-gamma kernels.

The compiled extension is used when it imports; otherwise the numpy
versions take over. Set ``BNSCORE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("BNSCORE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

config_counts = _impl.config_counts
lgamma_shift_sum = _impl.lgamma_shift_sum
bde_family = _impl.bde_family
