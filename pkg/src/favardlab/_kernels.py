"""Kernel backend selection.

The compiled extension ``favardlab._core`` is used when it imported cleanly;
otherwise the numpy fallback ``favardlab._pure`` serves the same API.  Set the
environment variable ``FAVARDLAB_PURE=1`` before import to force the fallback
(useful for benchmarking and debugging).
"""

import os

from . import _pure

if os.environ.get("FAVARDLAB_PURE"):
    _impl = _pure
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _pure

union_measure_sorted = _impl.union_measure_sorted
union_measure_sorted_rows = _impl.union_measure_sorted_rows
merge_intervals = _impl.merge_intervals
multiplicity_events = _impl.multiplicity_events
needle_hits = _impl.needle_hits


def active_backend():
    """Name of the kernel backend in use: 'compiled' or 'pure'."""
    return _impl.BACKEND_NAME
