"""Pick the compiled kernels when they import, else the pure-Python fallback.

Setting ``CONEKERNEL_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

if os.environ.get("CONEKERNEL_PURE_PYTHON", "") not in ("", "0"):
    from . import _fallback as impl
else:
    try:
        from . import _kernels as impl
    except ImportError:  # pragma: no cover - depends on the build
        from . import _fallback as impl

COMPILED = impl.COMPILED
density_points = impl.density_points
simulate_paths = impl.simulate_paths
