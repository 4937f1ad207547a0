"""Kernel backend selection.

Imports the compiled extension when present, otherwise the pure-Python
fallback.  EXPU_PURE=1 forces the fallback.  Both backends implement the
same operation order and are bit-identical, so the choice affects speed
only, never results.
"""

from __future__ import annotations

import os

if os.environ.get("EXPU_PURE", "") not in ("", "0"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
ub_sums = _impl.ub_sums
ub_sum_one = _impl.ub_sum_one
ml_error_probs = _impl.ml_error_probs
