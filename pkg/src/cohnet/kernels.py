"""Backend selection for the table kernels.

The compiled ``_speedups`` extension is used when it was built; otherwise
the pure-Python ``_purekernels`` module. Setting ``COHNET_PURE_PYTHON=1``
forces the fallback.
"""
import os

from . import _purekernels

pure = _purekernels

if os.environ.get("COHNET_PURE_PYTHON", "") not in ("", "0"):
    _impl = _purekernels
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _purekernels
        BACKEND = "python"

compiled = _impl if BACKEND == "cython" else None

compose = _impl.compose
constant = _impl.constant
pair_tables = _impl.pair_tables
projection = _impl.projection
equalizer = _impl.equalizer
pullback = _impl.pullback
image = _impl.image
preimage = _impl.preimage
meet = _impl.meet
join = _impl.join
first_missing = _impl.first_missing
drop_first = _impl.drop_first

__all__ = [
    "BACKEND", "compose", "constant", "pair_tables", "projection",
    "equalizer", "pullback", "image", "preimage", "meet", "join",
    "first_missing", "drop_first",
]
