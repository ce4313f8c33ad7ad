"""Select the compiled kernels when available, else the numpy fallback.

Set ``HYQUBO_PURE_PYTHON=1`` to force the fallback even when the extension
is built.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HYQUBO_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

IMPLEMENTATION = "python" if _impl is _kernels_py else "cython"

tabu_kernel = _impl.tabu_kernel
sa_kernel = _impl.sa_kernel
exact_kernel = _impl.exact_kernel

__all__ = ["IMPLEMENTATION", "tabu_kernel", "sa_kernel", "exact_kernel"]
