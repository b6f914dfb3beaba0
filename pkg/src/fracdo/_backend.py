"""Select the compiled kernel core if it was built, else the NumPy fallback.

Set ``FRACDO_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _core_py

_core = None
if os.environ.get("FRACDO_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _core
    except ImportError:
        _core = None

BACKEND = "cython" if _core is not None else "python"
KINDS = _core_py.KINDS
kind_rho = _core_py.kind_rho


def wright_family(alpha, kind, x, tol_rel=1e-13):
    impl = _core if _core is not None else _core_py
    return impl.wright_family(alpha, kind, x, tol_rel)


def implementations():
    """Available backends as a name -> module mapping."""
    out = {"python": _core_py}
    if _core is not None:
        out["cython"] = _core
    return out
