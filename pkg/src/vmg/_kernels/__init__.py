"""Kernel backend selection.

The compiled Cython core is used when importable; set VMG_PURE_PYTHON=1 to
force the pure-numpy fallback. Both expose the same three functions:
greedy_merge, classify_batch, value_sweeps.
"""

import os

from . import fallback

if os.environ.get("VMG_PURE_PYTHON", "") not in ("", "0"):
    _impl = fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = fallback
        BACKEND = "python"

greedy_merge = _impl.greedy_merge
classify_batch = _impl.classify_batch
value_sweeps = _impl.value_sweeps


def backend_name():
    return BACKEND


def _core_backends():
    """Every importable backend, keyed by name. Used by tests and benchmarks."""
    out = {"python": fallback}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
