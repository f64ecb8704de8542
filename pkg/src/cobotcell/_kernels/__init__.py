"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The compiled extension (`_core`, built from Cython) is preferred; if it is
unavailable — or the ``COBOTCELL_PURE`` environment variable is set to a
non-empty value — the pure-Python implementation in `_pure` is used instead.
Both backends are written to produce bit-identical results.

Exports:
    BACKEND          -- "compiled" or "pure", whichever was selected.
    dtw_update_row   -- extend a DTW accumulated-cost table by one sample.
    knapsack_select  -- budget-constrained subset maximizing total duration.
"""

import os

if os.environ.get("COBOTCELL_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _pure as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND
dtw_update_row = _impl.dtw_update_row
knapsack_select = _impl.knapsack_select

__all__ = ["BACKEND", "dtw_update_row", "knapsack_select"]
