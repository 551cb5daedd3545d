"""Backend selection for the correlator kernels.

Set ``IRUWB_DISABLE_NUMBA=1`` to force the pure-numpy kernels; numba is also
skipped when it cannot be imported.
"""

from __future__ import annotations

import os

DISABLE_ENV = "IRUWB_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get(DISABLE_ENV, "").strip().lower() not in ("1", "true", "yes", "on")


def maybe_njit(fn):
    """Compile ``fn`` lazily with numba when available, else return it unchanged."""
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)
