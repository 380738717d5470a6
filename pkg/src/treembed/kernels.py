"""Kernel backend selection.

The compiled extension ``treembed._kernels`` is used when it is importable;
otherwise, or when the environment variable ``TREEMBED_PURE_PYTHON`` is set
to a non-empty value, the pure-Python twin in ``treembed._pykernels`` is
used.  ``BACKEND`` names the active choice.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

__all__ = ["BACKEND", "backends", "dominating_bnb", "hopcroft_karp", "prufer_decode"]


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = None if os.environ.get("TREEMBED_PURE_PYTHON") else _load_compiled()
_active: ModuleType = _compiled if _compiled is not None else _pykernels

BACKEND = "cython" if _compiled is not None else "python"

prufer_decode = _active.prufer_decode
hopcroft_karp = _active.hopcroft_karp
dominating_bnb = _active.dominating_bnb


def backends() -> dict[str, ModuleType]:
    """All importable backends by name, for tests and benchmarks."""
    found = {"python": _pykernels}
    compiled = _load_compiled()
    if compiled is not None:
        found["cython"] = compiled
    return found
