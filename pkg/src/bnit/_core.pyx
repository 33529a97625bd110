# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: ancestral sampling and subset bit-packing.

Both kernels consume pre-drawn uniforms / pre-flattened tables so that the
compiled and pure-numpy implementations are bit-for-bit interchangeable.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()


def ancestral_sample(cnp.int64_t[::1] order,
                     cnp.int64_t[::1] parent_flat,
                     cnp.int64_t[::1] parent_off,
                     cnp.float64_t[::1] cpt_flat,
                     cnp.int64_t[::1] cpt_off,
                     cnp.float64_t[:, ::1] u,
                     cnp.uint8_t[:, ::1] out):
    """Fill out[s, i] by ancestral sampling; u[s, i] is the uniform for node i."""
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t n = u.shape[1]
    cdef Py_ssize_t s, t, j
    cdef cnp.int64_t i, pidx, lo, hi
    with nogil:
        for s in range(m):
            for t in range(n):
                i = order[t]
                lo = parent_off[i]
                hi = parent_off[i + 1]
                pidx = 0
                for j in range(hi - lo):
                    pidx |= (<cnp.int64_t> out[s, parent_flat[lo + j]]) << j
                out[s, i] = 1 if u[s, i] < cpt_flat[cpt_off[i] + pidx] else 0


def encode_columns(cnp.uint8_t[:, ::1] x,
                   cnp.int64_t[::1] cols,
                   cnp.int64_t[::1] out):
    """Pack the selected columns of x into integer codes, bit j = cols[j]."""
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t k = cols.shape[0]
    cdef Py_ssize_t s, j
    cdef cnp.int64_t code
    with nogil:
        for s in range(m):
            code = 0
            for j in range(k):
                code |= (<cnp.int64_t> x[s, cols[j]]) << j
            out[s] = code
