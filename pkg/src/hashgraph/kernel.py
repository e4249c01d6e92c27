"""Pick the visibility kernel at import.

The compiled extension is used when it was built; set
``HASHGRAPH_PURE_PYTHON=1`` to force the big-int fallback.
"""
import os

from . import _pykernel

PyKernel = _pykernel.Kernel

try:
    from ._ckernel import Kernel as CKernel
except ImportError:  # extension not built
    CKernel = None

if CKernel is not None and not os.environ.get("HASHGRAPH_PURE_PYTHON"):
    Kernel = CKernel
else:
    Kernel = PyKernel

BACKEND = Kernel.backend
