"""Hot numeric kernels: compiled extension when built, numpy fallback otherwise.

Set ``CARLAB_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
for debugging); ``BACKEND`` reports which implementation is active.
"""

import os

from ._dpref import dp_forward as dp_forward_reference

if os.environ.get("CARLAB_PURE_PYTHON", "") not in ("", "0"):
    dp_forward = dp_forward_reference
    BACKEND = "python"
else:
    try:
        from ._dpcore import dp_forward
        BACKEND = "compiled"
    except ImportError:
        dp_forward = dp_forward_reference
        BACKEND = "python"

__all__ = ["dp_forward", "dp_forward_reference", "BACKEND"]
