"""Backend selection for the inner loops.

The compiled extension is used when it imports cleanly; set
``CUTMATCH_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

if os.environ.get("CUTMATCH_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

center = _impl.center
alternate_direction = _impl.alternate_direction
bregman_zero_diag = _impl.bregman_zero_diag
newton_direction = _impl.newton_direction
repair_sums = _kernels_py.repair_sums


def get_backend(name):
    """Return the kernel module for ``"python"`` or ``"cython"``."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
