# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``; same signatures."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()

FRECHET = 0
DTW = 1


def band_dp(A, B, lo, hi, int mode):
    cdef const double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, ::1] b = np.ascontiguousarray(B, dtype=np.float64)
    cdef const Py_ssize_t[::1] rlo = np.ascontiguousarray(lo, dtype=np.intp)
    cdef const Py_ssize_t[::1] rhi = np.ascontiguousarray(hi, dtype=np.intp)
    cdef Py_ssize_t n = a.shape[0] - 1
    cdef Py_ssize_t m = b.shape[0] - 1
    cdef double[::1] prev = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] cur = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] tmp
    cdef Py_ssize_t i, j, plo = 0, phi = -1, l0, h0
    cdef long long cells = 0
    cdef double ax, ay, dx, dy, c, best, left, v, val
    cdef bint use_max = mode == 0
    for i in range(n + 1):
        l0 = rlo[i]
        h0 = rhi[i]
        if h0 < l0:
            return INFINITY, cells
        ax = a[i, 0]
        ay = a[i, 1]
        left = INFINITY
        for j in range(l0, h0 + 1):
            dx = ax - b[j, 0]
            dy = ay - b[j, 1]
            c = sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                val = c
            else:
                best = left
                if plo <= j <= phi:
                    v = prev[j]
                    if v < best:
                        best = v
                if plo <= j - 1 <= phi:
                    v = prev[j - 1]
                    if v < best:
                        best = v
                if best == INFINITY:
                    val = INFINITY
                elif use_max:
                    val = c if c > best else best
                else:
                    val = c + best
            cur[j] = val
            left = val
            cells += 1
        tmp = prev
        prev = cur
        cur = tmp
        plo = l0
        phi = h0
    if plo <= m <= phi:
        return prev[m], cells
    return INFINITY, cells


def reach(lv_lo, lv_hi, bh_lo, bh_hi, valid, start_free):
    cdef const double[:, ::1] vlo = np.ascontiguousarray(lv_lo, dtype=np.float64)
    cdef const double[:, ::1] vhi = np.ascontiguousarray(lv_hi, dtype=np.float64)
    cdef const double[:, ::1] hlo = np.ascontiguousarray(bh_lo, dtype=np.float64)
    cdef const double[:, ::1] hhi = np.ascontiguousarray(bh_hi, dtype=np.float64)
    cdef const cnp.uint8_t[:, ::1] ok = np.ascontiguousarray(valid, dtype=np.uint8)
    cdef Py_ssize_t n = ok.shape[0]
    cdef Py_ssize_t m = ok.shape[1]
    cdef double[:, ::1] rv = np.full((n + 1, m), INFINITY)
    cdef double[:, ::1] rh = np.full((n, m + 1), INFINITY)
    cdef cnp.uint8_t[:, ::1] corner = np.zeros((n + 1, m + 1), dtype=np.uint8)
    cdef Py_ssize_t i, j
    cdef double a_left, a_bot, r0, r1, t0, t1
    corner[0, 0] = 1 if start_free else 0
    for i in range(n):
        for j in range(m):
            if not ok[i, j]:
                continue
            a_left = rv[i, j]
            a_bot = rh[i, j]
            if corner[i, j]:
                a_left = 0.0
                a_bot = 0.0
            if a_left == INFINITY and a_bot == INFINITY:
                continue
            r0 = vlo[i + 1, j]
            r1 = vhi[i + 1, j]
            if r0 <= r1:
                if a_bot != INFINITY:
                    rv[i + 1, j] = r0
                elif a_left <= r1:
                    rv[i + 1, j] = a_left if a_left > r0 else r0
                if rv[i + 1, j] != INFINITY and r1 >= 1.0:
                    corner[i + 1, j + 1] = 1
            t0 = hlo[i, j + 1]
            t1 = hhi[i, j + 1]
            if t0 <= t1:
                if a_left != INFINITY:
                    rh[i, j + 1] = t0
                elif a_bot <= t1:
                    rh[i, j + 1] = a_bot if a_bot > t0 else t0
                if rh[i, j + 1] != INFINITY and t1 >= 1.0:
                    corner[i + 1, j + 1] = 1
    return bool(corner[n, m])


def metric_edit_dp(dd, a, b, Py_ssize_t sentinel_s, Py_ssize_t sentinel_t):
    cdef const double[:, ::1] d = np.ascontiguousarray(dd, dtype=np.float64)
    cdef const Py_ssize_t[::1] sa = np.ascontiguousarray(a, dtype=np.intp)
    cdef const Py_ssize_t[::1] sb = np.ascontiguousarray(b, dtype=np.intp)
    cdef Py_ssize_t n = sa.shape[0] - 2
    cdef Py_ssize_t m = sb.shape[0] - 2
    cdef Py_ssize_t S = sentinel_s, T = sentinel_t
    cdef double[::1] LA = np.zeros(n + 2)
    cdef double[:, :, :, ::1] D = np.full((m + 2, m + 2, n + 2, n + 2), INFINITY)
    cdef Py_ssize_t t, k, l, i, j, p, ip, jp, x, y, bp, span
    cdef double best, left, right, run, val
    cdef bint both_sent
    for t in range(2, n + 1):
        LA[t] = LA[t - 1] + d[sa[t - 1], sa[t]]
    for k in range(m + 1):
        l = k + 1
        for i in range(1, n + 2):
            for j in range(i - 1, n + 1):
                if i > j:
                    D[k, l, i, j] = 0.0
                elif sb[k] == S and sb[l] == T:
                    D[k, l, i, j] = INFINITY
                else:
                    D[k, l, i, j] = (d[sb[k], sa[i]] + LA[j] - LA[i] + d[sa[j], sb[l]]
                                     - d[sb[k], sb[l]])
    for span in range(2, m + 2):
        for k in range(0, m + 2 - span):
            l = k + span
            both_sent = sb[k] == S and sb[l] == T
            for i in range(1, n + 2):
                for j in range(i - 1, n + 1):
                    best = INFINITY
                    for p in range(k + 1, l):
                        bp = sb[p]
                        for ip in range(i - 1, j + 1):
                            left = D[k, p, i, ip]
                            if left == INFINITY:
                                continue
                            x = sa[ip] if ip >= i else sb[k]
                            for jp in range(ip + 1, j + 2):
                                if both_sent and ip < i and jp > j:
                                    continue
                                right = D[p, l, jp, j]
                                if right == INFINITY:
                                    continue
                                y = sa[jp] if jp <= j else sb[l]
                                if ip + 1 <= jp - 1:
                                    run = d[x, sa[ip + 1]] + LA[jp - 1] - LA[ip + 1] + d[sa[jp - 1], y]
                                else:
                                    run = d[x, y]
                                val = left + right + d[x, bp] + d[bp, y] + run - 2.0 * d[x, y]
                                if val < best:
                                    best = val
                    D[k, l, i, j] = best
    return D[0, m + 1, 1, n]
