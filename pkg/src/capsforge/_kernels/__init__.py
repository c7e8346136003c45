"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when it was built; set
``CAPSFORGE_PURE=1`` to force the fallback (used by the parity tests
and the benchmark). ``KERNEL_BACKEND`` reports which one is active.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("CAPSFORGE_PURE"):
    _impl = _pure
    KERNEL_BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        KERNEL_BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        KERNEL_BACKEND = "pure"

lcs_substring_len = _impl.lcs_substring_len
edit_distance = _impl.edit_distance
hll_update = _impl.hll_update

__all__ = ["KERNEL_BACKEND", "lcs_substring_len", "edit_distance", "hll_update"]
