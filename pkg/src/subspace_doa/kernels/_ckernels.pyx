# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counterparts of ``_pykernels``; same signatures and semantics."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def lag_average(R, S, Py_ssize_t M):
    cdef double complex[:, :, ::1] r = np.ascontiguousarray(R, dtype=np.complex128)
    cdef long long[::1] s = np.ascontiguousarray(S, dtype=np.int64)
    cdef Py_ssize_t B = r.shape[0], N = r.shape[1]
    cdef Py_ssize_t b, n, m, lag
    cdef long long d
    cdef double complex[:, ::1] acc
    cdef double[::1] cnt = np.zeros(M, dtype=np.float64)

    out = np.zeros((B, M), dtype=np.complex128)
    acc = out
    for n in range(N):
        for m in range(N):
            d = s[n] - s[m]
            lag = d if d >= 0 else -d
            if lag < M:
                cnt[lag] += 1.0
    for lag in range(M):
        if cnt[lag] == 0:
            raise ValueError("co-array has holes; missing lag %d" % lag)
    for b in range(B):
        for n in range(N):
            for m in range(N):
                d = s[n] - s[m]
                if d == 0:
                    # lag 0 pairs each entry with its own conjugate
                    acc[b, 0] = acc[b, 0] + r[b, n, m].real
                elif d > 0:
                    if d < M:
                        acc[b, d] = acc[b, d] + r[b, n, m]
                else:
                    if -d < M:
                        acc[b, -d] = acc[b, -d] + r[b, n, m].conjugate()
        for lag in range(M):
            acc[b, lag] = (acc[b, lag] / cnt[lag]).conjugate()
    return out


def toeplitz_hermitian(U):
    cdef double complex[:, ::1] u = np.ascontiguousarray(U, dtype=np.complex128)
    cdef Py_ssize_t B = u.shape[0], M = u.shape[1]
    cdef Py_ssize_t b, i, j
    out = np.empty((B, M, M), dtype=np.complex128)
    cdef double complex[:, :, ::1] t = out
    for b in range(B):
        for i in range(M):
            t[b, i, i] = u[b, 0].real
            for j in range(i + 1, M):
                t[b, i, j] = u[b, j - i]
                t[b, j, i] = u[b, j - i].conjugate()
    return out


def diag_sums(C):
    cdef double complex[:, :, ::1] c = np.ascontiguousarray(C, dtype=np.complex128)
    cdef Py_ssize_t B = c.shape[0], M = c.shape[1]
    cdef Py_ssize_t b, m, u
    out = np.zeros((B, 2 * M - 1), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    for b in range(B):
        for m in range(M):
            for u in range(M):
                # row m, column u: offset u - m
                o[b, u - m + M - 1] = o[b, u - m + M - 1] + c[b, m, u]
    return out
