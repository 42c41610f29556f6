"""Hot loops, compiled when possible.

The Cython extension ``_ckernels`` is used when it was built; otherwise the
numpy fallback in ``_pykernels`` is used. Set ``COVERTIME_BACKEND=python``
to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("COVERTIME_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

absorb = _impl.absorb
floyd_sample = _impl.floyd_sample
union_stream = _impl.union_stream
disc_cover = _impl.disc_cover
wilson = _impl.wilson


def backends():
    """Return the available kernel modules keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
