"""Kernel backend selection.

The coordinate-descent solvers and the Jacobi eigensolver dominate runtime,
so they are compiled with numba by default.  Set ``DRSCREEN_NO_NUMBA=1`` to
force the pure-numpy fallback; it is also used automatically when numba is
not importable.  ``BACKEND`` records which path is active.
"""

import os

_disable = os.environ.get("DRSCREEN_NO_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

if not _disable:
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        from . import numpy_backend as _impl

        BACKEND = "numpy"
else:
    from . import numpy_backend as _impl

    BACKEND = "numpy"

STATUS_OK = _impl.STATUS_OK
STATUS_STAGNATED = _impl.STATUS_STAGNATED
STATUS_CAP = _impl.STATUS_CAP

jacobi_eigh = _impl.jacobi_eigh
hinge_l2_cd = _impl.hinge_l2_cd
sqhinge_l1_cd = _impl.sqhinge_l1_cd
