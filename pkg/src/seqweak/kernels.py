"""Kernel backend selection.

The compiled extension is used when it was built and importable; set
``SEQWEAK_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SEQWEAK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

couple_axis = _impl.couple_axis
joint_moment = _impl.joint_moment
