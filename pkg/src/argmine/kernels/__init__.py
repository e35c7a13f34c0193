"""Linear-chain kernels with a numba fast path and a NumPy fallback.

The backend is selected once at import time from the ARGMINE_BACKEND
environment variable: "numba", "numpy", or "auto" (the default, which
uses numba when it imports cleanly). ``BACKEND`` records the choice.
Both backends expose the same functions with identical semantics;
``benchmarks/bench_kernels.py`` compares their throughput.
"""

from __future__ import annotations

import os

_choice = os.environ.get("ARGMINE_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"ARGMINE_BACKEND must be one of auto|numba|numpy, got {_choice!r}"
    )

if _choice in ("auto", "numba"):
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise RuntimeError("ARGMINE_BACKEND=numba but numba is not importable")
        from . import numpy_backend as _impl

        BACKEND = "numpy"
else:
    from . import numpy_backend as _impl

    BACKEND = "numpy"

emissions = _impl.emissions
viterbi_path = _impl.viterbi_path
forward_logz = _impl.forward_logz
crf_chunk_grad = _impl.crf_chunk_grad
perceptron_step = _impl.perceptron_step

__all__ = [
    "BACKEND",
    "emissions",
    "viterbi_path",
    "forward_logz",
    "crf_chunk_grad",
    "perceptron_step",
]
