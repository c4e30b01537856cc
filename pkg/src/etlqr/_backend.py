"""Selects the simulation kernel at import time.

The compiled extension is preferred; the pure-Python kernel is the
fallback. Set ETLQR_BACKEND=pure (or =compiled) to force a choice, e.g.
for benchmarking or debugging.
"""
from __future__ import annotations

import os

_forced = os.environ.get("ETLQR_BACKEND", "").strip().lower()

if _forced in ("pure", "python", "py"):
    from . import _loop_py as _kernel
    BACKEND = "pure-python"
elif _forced in ("", "compiled", "c"):
    try:
        from . import _loop_c as _kernel  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        if _forced:
            raise ImportError(
                "ETLQR_BACKEND=compiled but the extension etlqr._loop_c is not built"
            ) from None
        from . import _loop_py as _kernel  # type: ignore[no-redef]
        BACKEND = "pure-python"
else:
    raise ImportError(f"unknown ETLQR_BACKEND value {_forced!r}; use 'compiled' or 'pure'")

simulate = _kernel.simulate
KIND_TIME = 0
KIND_ETM = 1


def backend() -> str:
    """Name of the active simulation kernel."""
    return BACKEND
