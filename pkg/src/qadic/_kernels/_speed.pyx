# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled twin of the pure numpy kernels (see pure.py for the contract).

Cache-blocked triple loops over 64x64 tiles; unsigned arithmetic wraps mod
2**64 exactly like the fallback.  Results are bit-identical to pure.py.
"""

import numpy as np

from libc.stdint cimport int64_t, uint64_t

name = "compiled"


cdef void _mm_u64(const uint64_t[:, ::1] a, const uint64_t[:, ::1] b,
                  uint64_t[:, ::1] c) noexcept nogil:
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1], n = b.shape[1]
    cdef Py_ssize_t i0, k0, j0, i1, k1, j1, i, kk, j
    cdef uint64_t av
    for i0 in range(0, m, 64):
        i1 = i0 + 64 if i0 + 64 < m else m
        for k0 in range(0, k, 64):
            k1 = k0 + 64 if k0 + 64 < k else k
            for j0 in range(0, n, 64):
                j1 = j0 + 64 if j0 + 64 < n else n
                for i in range(i0, i1):
                    for kk in range(k0, k1):
                        av = a[i, kk]
                        for j in range(j0, j1):
                            c[i, j] += av * b[kk, j]


cdef void _mm_i64(const int64_t[:, ::1] a, const int64_t[:, ::1] b,
                  int64_t[:, ::1] c) noexcept nogil:
    cdef Py_ssize_t m = a.shape[0], k = a.shape[1], n = b.shape[1]
    cdef Py_ssize_t i0, k0, j0, i1, k1, j1, i, kk, j
    cdef int64_t av
    for i0 in range(0, m, 64):
        i1 = i0 + 64 if i0 + 64 < m else m
        for k0 in range(0, k, 64):
            k1 = k0 + 64 if k0 + 64 < k else k
            for j0 in range(0, n, 64):
                j1 = j0 + 64 if j0 + 64 < n else n
                for i in range(i0, i1):
                    for kk in range(k0, k1):
                        av = a[i, kk]
                        for j in range(j0, j1):
                            c[i, j] += av * b[kk, j]


cdef void _mod_inplace(int64_t[:, ::1] c, int64_t p) noexcept nogil:
    cdef Py_ssize_t i, j
    for i in range(c.shape[0]):
        for j in range(c.shape[1]):
            c[i, j] = c[i, j] % p


def matmul_exact_u64(a, b):
    a = np.ascontiguousarray(a, dtype=np.uint64)
    b = np.ascontiguousarray(b, dtype=np.uint64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError("incompatible shapes")
    c = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint64)
    if a.shape[1]:
        _mm_u64(a, b, c)
    return c


def matmul_mod_i64(a, b, p, chunk):
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError("incompatible shapes")
    cdef int64_t pp = p
    c = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    k = a.shape[1]
    for k0 in range(0, k, chunk):
        ac = np.ascontiguousarray(a[:, k0 : k0 + chunk])
        bc = np.ascontiguousarray(b[k0 : k0 + chunk, :])
        _mm_i64(ac, bc, c)
        _mod_inplace(c, pp)
    return c


cdef void _conv_u64(const uint64_t[::1] a, const uint64_t[::1] b,
                    uint64_t[::1] out) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef uint64_t av
    for i in range(a.shape[0]):
        av = a[i]
        for j in range(b.shape[0]):
            out[i + j] += av * b[j]


cdef void _conv_i64(const int64_t[::1] a, const int64_t[::1] b,
                    int64_t[::1] out) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef int64_t av
    for i in range(a.shape[0]):
        av = a[i]
        for j in range(b.shape[0]):
            out[i + j] += av * b[j]


def conv_exact_u64(a, b):
    a = np.ascontiguousarray(a, dtype=np.uint64)
    b = np.ascontiguousarray(b, dtype=np.uint64)
    out = np.zeros(a.shape[0] + b.shape[0] - 1, dtype=np.uint64)
    _conv_u64(a, b, out)
    return out


def conv_exact_i64(a, b):
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    out = np.zeros(a.shape[0] + b.shape[0] - 1, dtype=np.int64)
    _conv_i64(a, b, out)
    return out


cdef void _redq_comp(const uint64_t[::1] r, uint64_t[:, ::1] out,
                     uint64_t p, int t, int d) noexcept nogil:
    cdef Py_ssize_t idx
    cdef uint64_t ri, s
    cdef int i
    for idx in range(r.shape[0]):
        ri = r[idx]
        s = ri // p
        for i in range(d + 1):
            out[idx, i] = (ri >> (i * t)) - p * (s >> (i * t))


def redq_compress_u64(r, p, t, d):
    r = np.ascontiguousarray(r, dtype=np.uint64)
    if d * t >= 64:
        raise ValueError("digit span exceeds the 64-bit word")
    out = np.empty((r.shape[0], d + 1), dtype=np.uint64)
    if r.shape[0]:
        _redq_comp(r, out, p, t, d)
    return out
