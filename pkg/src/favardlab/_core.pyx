# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: fused single-pass versions of favardlab._pure."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"


def union_measure_sorted(double[::1] p, double half_width):
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t i
    cdef double two_r = 2.0 * half_width
    cdef double total, gap
    if n == 0:
        return 0.0
    total = two_r
    for i in range(1, n):
        gap = p[i] - p[i - 1]
        total += gap if gap < two_r else two_r
    return total


def union_measure_sorted_rows(double[:, ::1] p, double half_width):
    cdef Py_ssize_t rows = p.shape[0]
    cdef Py_ssize_t cols = p.shape[1]
    cdef Py_ssize_t i, j
    cdef double two_r = 2.0 * half_width
    cdef double total, gap
    out_arr = np.zeros(rows)
    cdef double[::1] out = out_arr
    if cols == 0:
        return out_arr
    for i in range(rows):
        total = two_r
        for j in range(1, cols):
            gap = p[i, j] - p[i, j - 1]
            total += gap if gap < two_r else two_r
        out[i] = total
    return out_arr


def merge_intervals(double[::1] starts, double[::1] ends):
    cdef Py_ssize_t n = starts.shape[0]
    cdef Py_ssize_t i, m
    cdef double cur_end
    out_s_arr = np.empty(n)
    out_e_arr = np.empty(n)
    cdef double[::1] out_s = out_s_arr
    cdef double[::1] out_e = out_e_arr
    if n == 0:
        return out_s_arr, out_e_arr
    m = 0
    out_s[0] = starts[0]
    cur_end = ends[0]
    for i in range(1, n):
        if starts[i] > cur_end:
            out_e[m] = cur_end
            m += 1
            out_s[m] = starts[i]
            cur_end = ends[i]
        elif ends[i] > cur_end:
            cur_end = ends[i]
    out_e[m] = cur_end
    return out_s_arr[: m + 1], out_e_arr[: m + 1]


def multiplicity_events(double[::1] p, double half_width):
    # Two-pointer merge of the sorted open (p - r) and close (p + r) event
    # streams; at equal coordinates opens are consumed first.
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t i = 0, j = 0, m = 0
    cdef long running = 0
    cdef double coord
    bp_arr = np.empty(2 * n if n else 0)
    cnt_arr = np.empty(2 * n if n else 0, dtype=np.int64)
    cdef double[::1] bp = bp_arr
    cdef long[::1] cnt = cnt_arr
    if n == 0:
        return bp_arr, cnt_arr
    while i < n or j < n:
        if i < n and p[i] - half_width <= p[j] + half_width:
            coord = p[i] - half_width
            running += 1
            i += 1
        else:
            coord = p[j] + half_width
            running -= 1
            j += 1
        if m > 0 and bp[m - 1] == coord:
            cnt[m - 1] = running
        else:
            bp[m] = coord
            cnt[m] = running
            m += 1
    return bp_arr[:m], cnt_arr[: m - 1]


def needle_hits(double[::1] xs, double[::1] ys, double[::1] cos_t,
                double[::1] sin_t, double[::1] u, double half_width):
    cdef Py_ssize_t n_discs = xs.shape[0]
    cdef Py_ssize_t n_samples = cos_t.shape[0]
    cdef Py_ssize_t i, j
    cdef double c, s, off, d
    cdef long hits = 0
    if n_discs == 0:
        return 0
    for i in range(n_samples):
        c = cos_t[i]
        s = sin_t[i]
        off = u[i]
        for j in range(n_discs):
            d = xs[j] * c + ys[j] * s - off
            if -half_width <= d <= half_width:
                hits += 1
                break
    return hits
