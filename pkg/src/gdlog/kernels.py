"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting ``GDLOG_PURE_PYTHON=1``
forces the pure-Python implementation.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

if os.environ.get("GDLOG_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

Rng = _impl.Rng
match_rule = _impl.match_rule
OP_CONST = _pykernels.OP_CONST
OP_BIND = _pykernels.OP_BIND
OP_CHECK = _pykernels.OP_CHECK


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
