"""Kernel backend selection.

The compiled extension is preferred when available; set the environment
variable ``COINWALK_PURE_PYTHON=1`` to force the NumPy fallback.
"""

import os

if os.environ.get("COINWALK_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels_c as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND_NAME
