"""Kernel backend selection.

The compiled extension is used when it imports; ``LATINLAB_BACKEND=python``
forces the pure-Python kernels.
"""

import os

from latinlab import _pykernels

if os.environ.get("LATINLAB_BACKEND", "").lower() == "python":
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from latinlab import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        kernels = _pykernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
