"""Kernel backend selection.

The compiled extension (`tcim._kernels`, Cython) and the pure-Python
twin (`tcim._kernels_py`) expose identical functions and consume
randomness identically.  The compiled one is preferred; set
``TCIM_BACKEND=python`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _select():
    choice = os.environ.get("TCIM_BACKEND", "").lower()
    if choice == "python":
        return _kernels_py
    try:
        from . import _kernels  # noqa: PLC0415
        return _kernels
    except ImportError:
        if choice in ("c", "compiled", "cython"):
            raise
        return _kernels_py


kernels = _select()
BACKEND_NAME: str = kernels.BACKEND_NAME
