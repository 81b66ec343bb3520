"""Kernel backend selection.

Hot numeric kernels ship in two flavors: a numba-compiled one and the
plain numpy source it was compiled from.  ``NBGEOM_BACKEND`` picks the
default at import time:

* ``auto`` (or unset) — numba when importable, numpy otherwise
* ``numba``           — require numba, fail loudly if missing
* ``numpy``           — force the pure-numpy path

Both flavors stay importable regardless of the flag (the benchmark suite
times them against each other), only the default binding changes.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("NBGEOM_BACKEND", "auto").strip().lower() or "auto"

if _FLAG not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"NBGEOM_BACKEND={_FLAG!r} not understood (use auto, numba, or numpy)"
    )

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    _njit = None
    NUMBA_AVAILABLE = False

if _FLAG == "numba" and not NUMBA_AVAILABLE:  # pragma: no cover
    raise RuntimeError("NBGEOM_BACKEND=numba but numba is not importable")

USE_NUMBA = NUMBA_AVAILABLE if _FLAG == "auto" else _FLAG == "numba"


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def jit_compile(pyfunc, *, cache: bool = True):
    """Return the numba-compiled twin of ``pyfunc`` (None if numba absent).

    Kernels are written in numba's numpy subset so the exact same source
    runs both ways; no algorithm is ever duplicated per backend.
    """
    if not NUMBA_AVAILABLE:  # pragma: no cover
        return None
    return _njit(cache=cache, nogil=True)(pyfunc)
