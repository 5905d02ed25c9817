# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for bit-packed GF(2) row operations.

Same contracts as ``_numpy_backend``; see there for the packing layout.
"""

import numpy as np

cimport numpy as cnp
cimport cython

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "cython"

from cohomtc.gf2._numpy_backend import (
    words_for, pack_rows, unpack_rows, get_col,
)


def rref_inplace(cnp.uint64_t[:, ::1] m, int ncols, limit=None):
    cdef int lim = ncols if limit is None else <int> limit
    cdef int nrows = m.shape[0]
    cdef int nw = m.shape[1]
    cdef int r = 0, c, w, i, j, piv
    cdef unsigned long long b, tmp
    pivots = []
    for c in range(lim):
        if r >= nrows:
            break
        w = c >> 6
        b = (<unsigned long long> 1) << (c & 63)
        piv = -1
        for i in range(r, nrows):
            if m[i, w] & b:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(nw):
                tmp = m[r, j]
                m[r, j] = m[piv, j]
                m[piv, j] = tmp
        with nogil:
            for i in range(nrows):
                if i != r and (m[i, w] & b):
                    for j in range(nw):
                        m[i, j] ^= m[r, j]
        pivots.append(c)
        r += 1
    return pivots


def reduce_rows(cnp.uint64_t[:, ::1] x, cnp.uint64_t[:, ::1] r, pivots):
    cdef int nrows = x.shape[0]
    cdef int nw = x.shape[1]
    cdef int i, j, k, c, w
    cdef unsigned long long b
    cdef cnp.int64_t[::1] pv = np.asarray(pivots, dtype=np.int64)
    cdef int npv = pv.shape[0]
    with nogil:
        for i in range(nrows):
            for k in range(npv):
                c = <int> pv[k]
                w = c >> 6
                b = (<unsigned long long> 1) << (c & 63)
                if x[i, w] & b:
                    for j in range(nw):
                        x[i, j] ^= r[k, j]


def mul(cnp.uint64_t[:, ::1] a, int a_cols, cnp.uint64_t[:, ::1] b):
    if a_cols != b.shape[0]:
        raise ValueError("inner dimension mismatch")
    cdef int n = a.shape[0]
    cdef int bw = b.shape[1]
    out = np.zeros((n, bw), dtype=np.uint64)
    cdef cnp.uint64_t[:, ::1] c = out
    cdef int i, w, j, k, base
    cdef unsigned long long word
    with nogil:
        for i in range(n):
            for w in range((a_cols + 63) >> 6):
                word = a[i, w]
                base = w << 6
                while word:
                    k = base + __builtin_ctzll(word)
                    word &= word - 1
                    for j in range(bw):
                        c[i, j] ^= b[k, j]
    return out


def gram(cnp.uint64_t[:, ::1] a, cnp.uint64_t[:, ::1] b, int ncols):
    cdef int n = a.shape[0]
    cdef int m = b.shape[0]
    cdef int nw = a.shape[1]
    out = np.zeros((n, m), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] g = out
    cdef int i, j, w, acc
    with nogil:
        for i in range(n):
            for j in range(m):
                acc = 0
                for w in range(nw):
                    acc ^= __builtin_popcountll(a[i, w] & b[j, w])
                g[i, j] = acc & 1
    return out


def xor_select(cnp.uint64_t[:, ::1] b, idx):
    cdef cnp.int64_t[::1] rows = np.ascontiguousarray(idx, dtype=np.int64)
    cdef int nw = b.shape[1]
    out = np.zeros(nw, dtype=np.uint64)
    cdef cnp.uint64_t[::1] acc = out
    cdef int i, j, k
    with nogil:
        for i in range(rows.shape[0]):
            k = <int> rows[i]
            for j in range(nw):
                acc[j] ^= b[k, j]
    return out
