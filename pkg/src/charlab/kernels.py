"""Kernel selection: the compiled extension when importable, else the numpy fallback.

Set ``CHARLAB_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if os.environ.get("CHARLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback

spf_sieve = _impl.spf_sieve
extend_multiplicative = _impl.extend_multiplicative
divisor_sum = _impl.divisor_sum
convolve_conj = _impl.convolve_conj
kahan_cumsum = _impl.kahan_cumsum
distance_grid = _impl.distance_grid

__all__ = [
    "BACKEND",
    "spf_sieve",
    "extend_multiplicative",
    "divisor_sum",
    "convolve_conj",
    "kahan_cumsum",
    "distance_grid",
]
