"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly, unless the environment
variable ``OQSIM_DISABLE_NUMBA`` is set to a non-empty value other than
``0``. Both backends expose the same functions and are importable directly
as ``oqsim._kernels.numpy_backend`` / ``oqsim._kernels.numba_backend`` for
benchmarking.
"""
import os

from . import _numpy as numpy_backend

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None

_flag = os.environ.get("OQSIM_DISABLE_NUMBA", "")
USE_NUMBA = numba_backend is not None and _flag in ("", "0")

backend = numba_backend if USE_NUMBA else numpy_backend
BACKEND_NAME = "numba" if USE_NUMBA else "numpy"

spmv = backend.spmv
dp5_linear_step = backend.dp5_linear_step
wigner_clenshaw = backend.wigner_clenshaw

__all__ = [
    "BACKEND_NAME", "USE_NUMBA", "backend", "numpy_backend", "numba_backend",
    "spmv", "dp5_linear_step", "wigner_clenshaw",
]
