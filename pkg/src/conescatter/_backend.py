"""Select the compiled kernels when available, else the numpy fallback.

Set ``CONESCATTER_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

kernels = _pykernels
if not os.environ.get("CONESCATTER_PURE_PYTHON"):
    try:
        from . import _ckernels as kernels  # noqa: F811
    except ImportError:
        kernels = _pykernels

NAME = kernels.NAME
