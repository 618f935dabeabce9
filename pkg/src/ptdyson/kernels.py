"""Backend selection for the RK4 kernel.

The compiled extension is used when it imports; set ``PTDYSON_PURE_PYTHON=1``
to force the fallback.
"""

import os

from . import _rk4_py

if os.environ.get("PTDYSON_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _rk4 as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
rk4_linear = _compiled.rk4_linear if _compiled is not None else _rk4_py.rk4_linear
rk4_linear_python = _rk4_py.rk4_linear
rk4_linear_compiled = _compiled.rk4_linear if _compiled is not None else None
