# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Same contracts as ``_kernels_py``."""

import numpy as np

from libc.stdint cimport int8_t, int32_t, int64_t, uint8_t, uint64_t


def row_incidence(const int32_t[:, ::1] sv, const uint64_t[:, ::1] mv,
                  const int32_t[:, ::1] row_sv, const uint64_t[:, ::1] row_mv,
                  const int8_t[:, ::1] row_op, const int8_t[::1] row_sign):
    cdef Py_ssize_t n = sv.shape[0]
    cdef Py_ssize_t r = row_sign.shape[0]
    cdef Py_ssize_t p = row_sv.shape[1]
    cdef Py_ssize_t q = row_op.shape[1]
    out_arr = np.zeros((n, r), dtype=np.int8)
    cdef int8_t[:, ::1] out = out_arr
    cdef Py_ssize_t t, g, a, b
    cdef bint ok
    cdef int8_t op
    cdef uint64_t have, need
    for t in range(n):
        for g in range(r):
            ok = True
            for a in range(p):
                if row_sv[g, a] >= 0 and sv[t, a] != row_sv[g, a]:
                    ok = False
                    break
            if ok:
                for b in range(q):
                    op = row_op[g, b]
                    if op == 0:
                        continue
                    have = mv[t, b]
                    need = row_mv[g, b]
                    if op == 1:
                        if need & ~have:
                            ok = False
                            break
                    elif have != need:
                        ok = False
                        break
            if ok:
                out[t, g] = row_sign[g]
    return out_arr


def bland_entering(const int8_t[:, ::1] cols, const int64_t[::1] y,
                   const int64_t[::1] cost, const int8_t[::1] state):
    cdef Py_ssize_t n = cols.shape[0]
    cdef Py_ssize_t r = cols.shape[1]
    cdef Py_ssize_t j, g
    cdef int64_t acc
    cdef int8_t s
    for j in range(n):
        s = state[j]
        if s > 1:
            continue
        acc = cost[j]
        for g in range(r):
            acc -= cols[j, g] * y[g]
        if (s == 0 and acc < 0) or (s == 1 and acc > 0):
            return j
    return -1


def masked_argmin(const int8_t[:, ::1] cols, const int64_t[::1] y,
                  const uint8_t[::1] excluded):
    cdef Py_ssize_t n = cols.shape[0]
    cdef Py_ssize_t r = cols.shape[1]
    cdef Py_ssize_t j, g
    cdef Py_ssize_t best = -1
    cdef int64_t acc, best_val = 0
    for j in range(n):
        if excluded[j]:
            continue
        acc = 0
        for g in range(r):
            acc -= cols[j, g] * y[g]
        if best < 0 or acc < best_val:
            best = j
            best_val = acc
    return best, best_val
