"""Hot-loop kernels, compiled when available.

The Cython extension ``_ckernels`` is used when it has been built; otherwise
the numpy implementation in ``_pykernels`` is used. Both are importable
directly for testing and benchmarking, and agree bit for bit.
"""

from . import _pykernels as python

try:
    from . import _ckernels as compiled
except ImportError:  # extension not built
    compiled = None

_impl = compiled if compiled is not None else python

#: ``"cython"`` or ``"python"``.
BACKEND = "cython" if compiled is not None else "python"

extinction_products = _impl.extinction_products
path_gains = _impl.path_gains
greedy = _impl.greedy
