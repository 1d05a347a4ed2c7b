"""Kernel backend selection: compiled extension when available, NumPy otherwise.

Set FGDKIT_PURE=1 to force the pure fallback (used by the benchmark and by
tests that compare backends).
"""

from __future__ import annotations

import os

from . import pure

BACKEND = "pure"
gibbs_chain = pure.gibbs_chain
bootstrap_partial_r2 = pure.bootstrap_partial_r2

if not os.environ.get("FGDKIT_PURE"):
    try:
        from . import _fast

        gibbs_chain = _fast.gibbs_chain
        bootstrap_partial_r2 = _fast.bootstrap_partial_r2
        BACKEND = "compiled"
    except ImportError:
        pass


def backend_name() -> str:
    return BACKEND
