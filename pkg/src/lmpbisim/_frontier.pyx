# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled word-frontier kernels (int64 and float64 numerators).

Rows of ``F`` are (scaled) subdistributions, one per frontier word. The
numpy fallback has to group rows by action before it can call matmul;
``expand`` here works row by row straight from the parent indices, skipping
zero parent entries (frontiers started from a Dirac are usually sparse).
"""

import numpy as np
from libc.stdint cimport int64_t

ctypedef fused num_t:
    int64_t
    double


def child_masses(num_t[:, ::1] F, num_t[:, ::1] R):
    cdef Py_ssize_t K = F.shape[0], n = F.shape[1], m = R.shape[1]
    cdef Py_ssize_t k, s, a
    cdef num_t acc
    if num_t is int64_t:
        out = np.zeros((K, m), dtype=np.int64)
    else:
        out = np.zeros((K, m), dtype=np.float64)
    cdef num_t[:, ::1] o = out
    for k in range(K):
        for a in range(m):
            acc = 0
            for s in range(n):
                acc += F[k, s] * R[s, a]
            o[k, a] = acc
    return out


def expand(num_t[:, ::1] F, num_t[:, :, ::1] mats, Py_ssize_t[::1] parents, Py_ssize_t[::1] acts):
    cdef Py_ssize_t P = parents.shape[0], n = F.shape[1]
    cdef Py_ssize_t i, p, a, s, t
    cdef num_t x
    if num_t is int64_t:
        out = np.zeros((P, n), dtype=np.int64)
    else:
        out = np.zeros((P, n), dtype=np.float64)
    cdef num_t[:, ::1] o = out
    for i in range(P):
        p = parents[i]
        a = acts[i]
        for s in range(n):
            x = F[p, s]
            if x == 0:
                continue
            for t in range(n):
                o[i, t] += x * mats[a, s, t]
    return out
