"""Backend selection for the frontier kernels.

The compiled extension is used when it imported cleanly and the arrays are
int64 or float64 (``child_masses`` only for int64, where numpy has no
BLAS path); object arrays (exact numerators past the int64 range)
always take the numpy path. Set ``LMPBISIM_PURE=1`` to force numpy.
"""

import os

import numpy as np

from . import _frontier_py as _py

try:
    from . import _frontier as _ext
except ImportError:  # extension not built
    _ext = None

if os.environ.get("LMPBISIM_PURE", "") not in ("", "0"):
    _ext = None

HAVE_EXTENSION = _ext is not None
_NATIVE = (np.dtype(np.int64), np.dtype(np.float64))


def backend_name():
    return "cython" if HAVE_EXTENSION else "numpy"


def _native(*arrays):
    return HAVE_EXTENSION and all(x.dtype in _NATIVE and x.dtype == arrays[0].dtype for x in arrays)


def child_masses(F, R, use_extension=True):
    # BLAS already wins for float rows; the loop only pays off for int64
    if use_extension and _native(F, R) and F.dtype == np.int64:
        return _ext.child_masses(np.ascontiguousarray(F), np.ascontiguousarray(R))
    return _py.child_masses(F, R)


def expand(F, mats, parents, acts, use_extension=True):
    parents = np.ascontiguousarray(parents, dtype=np.intp)
    acts = np.ascontiguousarray(acts, dtype=np.intp)
    if use_extension and _native(F, mats):
        return _ext.expand(np.ascontiguousarray(F), np.ascontiguousarray(mats), parents, acts)
    return _py.expand(F, mats, parents, acts)
