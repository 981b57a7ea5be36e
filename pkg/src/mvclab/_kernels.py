"""Picks the kernel implementation at import time.

The compiled ``_core`` extension is used when it was built; otherwise the
numpy fallback ``_pure``.  ``MVCLAB_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os


def _select():
    if os.environ.get("MVCLAB_PURE", "") not in ("", "0"):
        from . import _pure

        return _pure, "python"
    try:
        from . import _core
    except ImportError:
        from . import _pure

        return _pure, "python"
    return _core, "cython"


KERNELS, BACKEND = _select()


def available() -> dict:
    """All importable kernel modules keyed by backend name."""
    from . import _pure

    found = {"python": _pure}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        found["cython"] = _core
    return found
