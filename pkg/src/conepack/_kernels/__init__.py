"""Hot-loop kernels: compiled core with a pure-NumPy fallback.

Set ``CONEPACK_PURE=1`` to force the fallback; ``BACKEND`` reports which
implementation is active.
"""

import os

if os.environ.get("CONEPACK_PURE", "") not in ("", "0"):
    from . import _fallback as _impl
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as _impl
        BACKEND = "python"

penalty_value_grad = _impl.penalty_value_grad
count_detection_errors = _impl.count_detection_errors

__all__ = ["BACKEND", "penalty_value_grad", "count_detection_errors"]
