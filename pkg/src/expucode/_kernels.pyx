# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels.

Must stay operation-for-operation identical to expucode._kernels_py: same
loop nesting, same Kahan updates, same zero-term skips.  Together with
-ffp-contract=off at build time that makes the two backends bit-identical.
"""

import numpy as np

from libc.stdint cimport int64_t

BACKEND = "cython"


def ub_sums(rows_arr, z_arr):
    """Union-Bhattacharyya sums for every codeword; see the pure twin."""
    rows_c = np.ascontiguousarray(rows_arr, dtype=np.int64)
    z_c = np.ascontiguousarray(z_arr, dtype=np.float64)
    cdef int64_t[:, ::1] rows = rows_c
    cdef double[:, ::1] z = z_c
    cdef Py_ssize_t m_count = rows.shape[0]
    cdef Py_ssize_t n = rows.shape[1]
    out = np.zeros(m_count, dtype=np.float64)
    comp = np.zeros(m_count, dtype=np.float64)
    cdef double[::1] s = out
    cdef double[::1] c = comp
    cdef Py_ssize_t i, j, t
    cdef double p, y, tt
    with nogil:
        for i in range(m_count):
            for j in range(i + 1, m_count):
                p = 1.0
                for t in range(n):
                    p = p * z[rows[i, t], rows[j, t]]
                    if p == 0.0:
                        break
                if p == 0.0:
                    continue
                y = p - c[i]
                tt = s[i] + y
                c[i] = (tt - s[i]) - y
                s[i] = tt
                y = p - c[j]
                tt = s[j] + y
                c[j] = (tt - s[j]) - y
                s[j] = tt
    return out


def ub_sum_one(rows_arr, m, z_arr):
    """Union-Bhattacharyya sum for codeword m alone; same order as ub_sums."""
    rows_c = np.ascontiguousarray(rows_arr, dtype=np.int64)
    z_c = np.ascontiguousarray(z_arr, dtype=np.float64)
    cdef int64_t[:, ::1] rows = rows_c
    cdef double[:, ::1] z = z_c
    cdef Py_ssize_t m_count = rows.shape[0]
    cdef Py_ssize_t n = rows.shape[1]
    cdef Py_ssize_t mi = m
    cdef Py_ssize_t k, t
    cdef double p, y, tt
    cdef double s = 0.0
    cdef double c = 0.0
    with nogil:
        for k in range(m_count):
            if k == mi:
                continue
            p = 1.0
            for t in range(n):
                p = p * z[rows[mi, t], rows[k, t]]
                if p == 0.0:
                    break
            if p == 0.0:
                continue
            y = p - c
            tt = s + y
            c = (tt - s) - y
            s = tt
    return s


def ml_error_probs(rows_arr, w_arr):
    """Exact ML block-error probabilities; see the pure twin for the contract."""
    rows_c = np.ascontiguousarray(rows_arr, dtype=np.int64)
    w_c = np.ascontiguousarray(w_arr, dtype=np.float64)
    cdef int64_t[:, ::1] rows = rows_c
    cdef double[:, ::1] w = w_c
    cdef Py_ssize_t m_count = rows.shape[0]
    cdef Py_ssize_t n = rows.shape[1]
    cdef Py_ssize_t y_size = w.shape[1]
    pe_arr = np.zeros(m_count, dtype=np.float64)
    comp_arr = np.zeros(m_count, dtype=np.float64)
    part_arr = np.ones((n + 1, m_count), dtype=np.float64)
    y_arr = np.zeros(n, dtype=np.int64)
    cdef double[::1] pe = pe_arr
    cdef double[::1] comp = comp_arr
    cdef double[:, ::1] part = part_arr
    cdef int64_t[::1] y = y_arr
    cdef Py_ssize_t d0 = 0
    cdef Py_ssize_t d, k, p, bi
    cdef int64_t yd
    cdef double best, v, yy, tt
    with nogil:
        while True:
            for d in range(d0, n):
                yd = y[d]
                for k in range(m_count):
                    part[d + 1, k] = part[d, k] * w[rows[k, d], yd]
            best = part[n, 0]
            bi = 0
            for k in range(1, m_count):
                if part[n, k] > best:
                    best = part[n, k]
                    bi = k
            for k in range(m_count):
                if k != bi:
                    v = part[n, k]
                    yy = v - comp[k]
                    tt = pe[k] + yy
                    comp[k] = (tt - pe[k]) - yy
                    pe[k] = tt
            p = n - 1
            while p >= 0 and y[p] == y_size - 1:
                y[p] = 0
                p -= 1
            if p < 0:
                break
            y[p] += 1
            d0 = p
    return pe_arr
