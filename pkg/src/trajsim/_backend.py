"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``TRAJSIM_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

python = _pykernels

compiled = None
if os.environ.get("TRAJSIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

kernels = compiled if compiled is not None else python
name = "cython" if compiled is not None else "python"

FRECHET = 0
DTW = 1


def get(backend: str | None = None):
    """Return the kernel module for ``backend`` (``"cython"``, ``"python"`` or ``None``)."""
    if backend is None:
        return kernels
    if backend == "python":
        return python
    if backend == "cython":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")
