"""Selects the Sturm kernel implementation at import time.

``MAGSPEC_BACKEND=python`` forces the pure-Python kernels even when the
compiled extension is importable.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pysturm

try:
    from . import _sturm as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None

BACKENDS: dict[str, ModuleType] = {"python": _pysturm}
if _compiled is not None:
    BACKENDS["cython"] = _compiled


def _default() -> str:
    requested = os.environ.get("MAGSPEC_BACKEND", "").strip().lower()
    if requested:
        if requested not in BACKENDS:
            raise ImportError(f"MAGSPEC_BACKEND={requested!r} unavailable; have {sorted(BACKENDS)}")
        return requested
    return "cython" if "cython" in BACKENDS else "python"


_active = _default()


def active_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(BACKENDS)}")
    _active = name


def kernels(name: str | None = None) -> ModuleType:
    return BACKENDS[name or _active]
