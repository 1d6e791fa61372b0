"""Kernel backend selection.

The compiled extension is used when it imports; setting ``MSIFM_PURE_PYTHON=1``
forces the numpy fallback.  :func:`use` switches at runtime (tests, benchmarks).
"""

from __future__ import annotations

import contextlib
import importlib
import os

from . import _kernels_py

# Integer kernels run in int64; callers keep every partial sum below this.
INT64_SAFE = 1 << 62

try:
    _compiled = importlib.import_module("msifm._kernels")
except ImportError:  # extension not built
    _compiled = None

_MODULES = {"python": _kernels_py}
if _compiled is not None:
    _MODULES["cython"] = _compiled

if os.environ.get("MSIFM_PURE_PYTHON") or _compiled is None:
    kernels = _kernels_py
    name = "python"
else:
    kernels = _compiled
    name = "cython"


def available() -> list[str]:
    return sorted(_MODULES)


def get(backend: str):
    try:
        return _MODULES[backend]
    except KeyError:
        raise ValueError(f"kernel backend {backend!r} is not available (have {available()})") from None


@contextlib.contextmanager
def use(backend: str):
    """Temporarily route all kernel calls through ``backend``."""
    global kernels, name
    saved = kernels, name
    kernels, name = get(backend), backend
    try:
        yield kernels
    finally:
        kernels, name = saved
