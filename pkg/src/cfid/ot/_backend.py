"""Pick the transportation kernel at import time.

The compiled kernel is used when it was built; ``CFID_PURE_PYTHON=1`` forces
the fallback.
"""
import os

from . import _transport_py

BACKEND = "python"
transport = _transport_py.transport

if os.environ.get("CFID_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _transport_cy
    except ImportError:  # extension not built
        _transport_cy = None
    else:
        transport = _transport_cy.transport
        BACKEND = "cython"
else:
    _transport_cy = None


def kernels():
    """Available kernels by name, for tests and benchmarks."""
    out = {"python": _transport_py.transport}
    if _transport_cy is not None:
        out["cython"] = _transport_cy.transport
    return out
