"""Enumeration kernels with an import-time backend choice.

The compiled Cython module is used when present; otherwise (or when the
environment variable ``MMSKIT_BACKEND=pure`` is set) the pure-Python
mirror takes over.  Both backends enumerate in the same order, so every
result, including tie-breaks, is identical.
"""

import os

from . import _pykernels

_compiled = None
if os.environ.get("MMSKIT_BACKEND", "") != "pure":
    try:
        from . import _ckernels as _compiled
    except ImportError:
        _compiled = None

_active = _compiled if _compiled is not None else _pykernels

BACKEND = _active.BACKEND_NAME

assign_opt_table = _active.assign_opt_table
assign_opt_additive = _active.assign_opt_additive
constrained_opt_additive = _active.constrained_opt_additive
first_feasible_doubled = _active.first_feasible_doubled
minmax_ratio_assign = _active.minmax_ratio_assign
min_linf_selection = _active.min_linf_selection
min_l0_selection = _active.min_l0_selection

__all__ = [
    "BACKEND", "assign_opt_table", "assign_opt_additive",
    "constrained_opt_additive", "first_feasible_doubled",
    "minmax_ratio_assign", "min_linf_selection", "min_l0_selection",
]
