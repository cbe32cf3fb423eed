"""Kernel selection: compiled extension when importable, numpy otherwise.

Set QPFOCK_PURE=1 to force the numpy fallback.
"""
import os

from . import _fallback

BACKEND = "numpy"
_impl = _fallback
if os.environ.get("QPFOCK_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # noqa: F811
        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback

jacobi_hermitian = _impl.jacobi_hermitian
log_factor_pair = _impl.log_factor_pair
