"""Training kernels with a compiled core and a pure-Python fallback.

The Cython extension is preferred when the build produced it; otherwise the
pure implementation is used.  Both compute bit-identical results, so the
choice only affects speed.
"""

from . import _pure

try:
    from . import _fast  # type: ignore[attr-defined]
except ImportError:
    _fast = None

_impl = _fast if _fast is not None else _pure

BACKEND = "cython" if _fast is not None else "pure"

sgns_train = _impl.sgns_train
poincare_train = _impl.poincare_train


def backend():
    """Name of the active kernel implementation."""
    return BACKEND
