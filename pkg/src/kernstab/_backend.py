"""Selects the compiled core when importable, else the numpy fallback.

Set ``KERNSTAB_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import logging
import os

log = logging.getLogger(__name__)

if os.environ.get("KERNSTAB_PURE", "") not in ("", "0"):
    from . import _core_py as core

    COMPILED = False
else:
    try:
        from . import _core as core

        COMPILED = True
    except ImportError:  # extension not built
        from . import _core_py as core

        COMPILED = False
        log.debug("compiled core unavailable, using numpy fallback")

NAME = "cython" if COMPILED else "numpy"

__all__ = ["core", "COMPILED", "NAME"]
