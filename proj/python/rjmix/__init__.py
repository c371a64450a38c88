"""Lognormal-mixture income distributions from grouped data.

Thin Python layer over the C++ core: dataset simulation, the
reversible-jump mixture sampler, the GB2 baseline chain, and the
posterior functionals (Gini, predictive density, marginal likelihood).
"""

import os
import sys

_ext_dir = os.environ.get("RJMIX_EXT_DIR")
if _ext_dir and _ext_dir not in sys.path:
    # Development hook: point at a build tree holding the extension.
    sys.path.insert(0, _ext_dir)

try:
    from _core import *  # noqa: F401,F403  (build-tree layout)
    from _core import __doc__ as _core_doc
except ImportError:
    from rjmix._core import *  # noqa: F401,F403  (installed layout)
    from rjmix._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
