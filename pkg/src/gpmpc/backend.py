"""Selects the numerical core at import time.

The compiled extension ``gpmpc._fastcore`` is preferred; the pure-NumPy
twin ``gpmpc._purecore`` is the fallback.  Set ``GPMPC_BACKEND=python``
to force the fallback (used by the backend benchmark and by tests that
exercise both implementations).
"""

import os

if os.environ.get("GPMPC_BACKEND", "").lower() == "python":
    from . import _purecore as core
else:
    try:
        from . import _fastcore as core  # type: ignore[no-redef]
    except ImportError:
        from . import _purecore as core  # type: ignore[no-redef]

BACKEND = core.NAME
