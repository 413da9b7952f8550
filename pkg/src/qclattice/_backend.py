"""Kernel backend selection: compiled extension if available, numpy fallback otherwise."""

from __future__ import annotations

import logging

log = logging.getLogger(__name__)

try:  # pragma: no cover - exercised indirectly
    from . import _kernels as kernels

    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    from . import _kernels_py as kernels

    BACKEND = "python"
    log.info("compiled kernels unavailable; using pure-Python fallback")

__all__ = ["kernels", "BACKEND"]
