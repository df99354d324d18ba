"""Trial-kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
implementation. Set ``QCLONE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py.simulate_trials}

try:
    from . import _kernels as _ext
except ImportError:  # extension not compiled
    _ext = None
else:
    BACKENDS["compiled"] = _ext.simulate_trials

if _ext is not None and not os.environ.get("QCLONE_PURE_PYTHON"):
    BACKEND = "compiled"
else:
    BACKEND = "python"


def get_kernel(backend=None):
    name = BACKEND if backend is None else backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


simulate_trials = BACKENDS[BACKEND]
