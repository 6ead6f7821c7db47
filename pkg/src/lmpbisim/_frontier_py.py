"""Pure numpy versions of the frontier kernels; also handles object (big-int) arrays."""

import numpy as np


def child_masses(F, R):
    return F @ R


def expand(F, mats, parents, acts):
    out = np.zeros((len(parents), F.shape[1]), dtype=F.dtype)
    for a in range(mats.shape[0]):
        sel = acts == a
        if sel.any():
            out[sel] = F[parents[sel]] @ mats[a]
    return out
