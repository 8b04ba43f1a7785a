"""Hot inner loops with a compiled backend and a pure-Python fallback.

The compiled module is used when it imported successfully and the inputs fit
in machine words; otherwise the Python implementation runs.  Set
``BDSPACE_PURE_PYTHON=1`` to force the fallback for the whole process.
"""

import os

from . import _scan_py

try:
    if os.environ.get("BDSPACE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure Python backend requested")
    from . import _scan as _compiled
    import numpy as _np
except ImportError:
    _compiled = None
    _np = None

backend = "cython" if _compiled is not None else "python"

_MASK_LIMIT = 1 << 64
_SUM_LIMIT = 1 << 62


def _fits_masks(masks):
    return all(0 <= m < _MASK_LIMIT for m in masks)


def _weight_array(weights):
    """Typed array for the compiled kernels, or None if they cannot take it."""
    if not weights:
        return _np.zeros(0, dtype=_np.int64)
    if all(isinstance(w, int) for w in weights):
        if sum(abs(w) for w in weights) < _SUM_LIMIT:
            return _np.asarray(weights, dtype=_np.int64)
        return None
    if all(isinstance(w, (int, float)) for w in weights):
        return _np.asarray(weights, dtype=_np.float64)
    return None


def _native(value):
    return value.item() if hasattr(value, "item") else value


def hit_mass_scan(sets, blocks, weights):
    """Max over ``sets`` of the total weight of blocks each set meets.

    Returns ``(best, index)`` with the first maximizing index, ``(0, -1)`` if
    ``sets`` is empty.
    """
    if _compiled is not None and _fits_masks(sets) and _fits_masks(blocks):
        w = _weight_array(list(weights))
        if w is not None:
            best, idx = _compiled.hit_mass_scan(
                _np.asarray(sets, dtype=_np.uint64), _np.asarray(blocks, dtype=_np.uint64), w)
            return _native(best), idx
    return _scan_py.hit_mass_scan(sets, blocks, weights)


def first_admissible(sets, gaps):
    """Index of the first set meeting every gap mask, or -1."""
    if _compiled is not None and _fits_masks(sets) and _fits_masks(gaps):
        return _compiled.first_admissible(
            _np.asarray(sets, dtype=_np.uint64), _np.asarray(gaps, dtype=_np.uint64))
    return _scan_py.first_admissible(sets, gaps)


def schreier_hit_mass(his, weights):
    if _compiled is not None and all(0 <= h < _SUM_LIMIT for h in his):
        w = _weight_array(list(weights))
        if w is not None:
            best, j = _compiled.schreier_hit_mass(_np.asarray(his, dtype=_np.int64), w)
            return _native(best), j
    return _scan_py.schreier_hit_mass(his, weights)


def schreier_norm(values, positions, theta):
    if _compiled is not None:
        return _compiled.schreier_norm(
            _np.asarray(values, dtype=_np.float64),
            _np.asarray(positions, dtype=_np.int64), float(theta))
    return _scan_py.schreier_norm([float(v) for v in values], positions, float(theta))
