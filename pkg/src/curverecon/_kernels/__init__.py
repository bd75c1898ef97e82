"""Hot inner loops, compiled when possible.

The Cython extension ``_ckernels`` is used when it was built; otherwise the
pure-Python twins in ``_pykernels`` are selected. Set ``CURVERECON_PURE_PYTHON=1``
to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("CURVERECON_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

dijkstra = _impl.dijkstra
two_opt = _impl.two_opt

__all__ = ["BACKEND", "dijkstra", "two_opt"]
