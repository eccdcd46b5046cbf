"""Backend selection for the search kernels.

The compiled extension ``adjopt._kernels`` is used when importable; setting
``ADJOPT_PURE_PYTHON=1`` forces the pure-Python twin. Both expose the same
four functions.
"""

import os

from adjopt import _kernels_py

if os.environ.get("ADJOPT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from adjopt import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

forward_states = _impl.forward_states
backward_states = _impl.backward_states
directed_reach = _impl.directed_reach
open_walk = _impl.open_walk

__all__ = ["BACKEND", "forward_states", "backward_states", "directed_reach", "open_walk"]
