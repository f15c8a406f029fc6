# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.

Bit-identical twin of ``pyimpl.py`` — same double operations in the same
order per element, same counter-based RNG.  The build disables FP
contraction so no multiply-add here fuses into an FMA that NumPy would
round differently.  Change nothing here without mirroring pyimpl.py.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor
from libc.stdint cimport int64_t, uint64_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15u
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9u
cdef uint64_t MIX_B = 0x94D049BB133111EBu
cdef double TO_UNIT = 2.0 ** -53


cdef inline double _uniform(uint64_t seed, uint64_t pos) noexcept nogil:
    # value(seed, i) = splitmix64 finalizer of seed + (i + 1) * GOLDEN
    cdef uint64_t z = seed + (pos + 1u) * GOLDEN
    z = (z ^ (z >> 30u)) * MIX_A
    z = (z ^ (z >> 27u)) * MIX_B
    z = z ^ (z >> 31u)
    return <double> (z >> 11u) * TO_UNIT


cdef inline Py_ssize_t _bisect_right(const double[::1] cum, double u) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = cum.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if cum[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


def minmax_pass(const double[:, ::1] data):
    """Fused per-column min/max in a single pass; one visit per element."""
    cdef Py_ssize_t n = data.shape[0], d = data.shape[1]
    mins_arr = np.empty(d, dtype=np.float64)
    maxes_arr = np.empty(d, dtype=np.float64)
    cdef double[::1] mins = mins_arr
    cdef double[::1] maxes = maxes_arr
    cdef Py_ssize_t i, j
    cdef long long visits = 0
    cdef double v
    with nogil:
        for j in range(d):
            mins[j] = data[0, j]
            maxes[j] = data[0, j]
        visits += d
        for i in range(1, n):
            for j in range(d):
                v = data[i, j]
                if v < mins[j]:
                    mins[j] = v
                if v > maxes[j]:
                    maxes[j] = v
                visits += 1
    return mins_arr, maxes_arr, int(visits)


def quantize_pass(const double[:, ::1] data, const double[::1] mins,
                  const double[::1] maxes, long long k):
    """floor(k * (x - min) / (max - min)) per element, clamped to k - 1."""
    cdef Py_ssize_t n = data.shape[0], d = data.shape[1]
    keys_arr = np.empty((n, d), dtype=np.int64)
    cdef int64_t[:, ::1] keys = keys_arr
    cdef Py_ssize_t i, j
    cdef long long visits = 0
    cdef double kd = <double> k, span, e
    cdef int64_t q, kmax = k - 1
    with nogil:
        for i in range(n):
            for j in range(d):
                span = maxes[j] - mins[j]
                if span > 0:
                    e = floor(kd * (data[i, j] - mins[j]) / span)
                    q = <int64_t> e
                    if q > kmax:
                        q = kmax
                else:
                    q = 0
                keys[i, j] = q
                visits += 1
    return keys_arr, int(visits)


def draw_cells(const double[::1] cum, const int64_t[:, ::1] keys,
               const double[:, ::1] lowers, const double[:, ::1] uppers,
               const double[::1] mins, const double[::1] maxes,
               long long k, long long count, object seed):
    """Weighted cell choice + uniform fill; see pyimpl.draw_cells."""
    cdef Py_ssize_t m = lowers.shape[0], d = lowers.shape[1]
    out_arr = np.empty((count, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    if count == 0:
        return out_arr
    cdef uint64_t sd = <uint64_t> <unsigned long long> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t s, j, cell
    cdef uint64_t pos
    cdef double u, lo, hi, x, span, e
    cdef double kd = <double> k
    cdef int64_t q, kmax = k - 1
    with nogil:
        for s in range(count):
            pos = (<uint64_t> s) * (<uint64_t> (1 + d))
            u = _uniform(sd, pos)
            cell = _bisect_right(cum, u)
            if cell > m - 1:
                cell = m - 1
            for j in range(d):
                u = _uniform(sd, pos + 1u + <uint64_t> j)
                lo = lowers[cell, j]
                hi = uppers[cell, j]
                x = lo + u * (hi - lo)
                if x < lo:
                    x = lo
                if x > hi:
                    x = hi
                span = maxes[j] - mins[j]
                if span > 0:
                    e = floor(kd * (x - mins[j]) / span)
                    q = <int64_t> e
                    if q > kmax:
                        q = kmax
                else:
                    q = 0
                if q != keys[cell, j]:
                    x = 0.5 * (lo + hi)
                out[s, j] = x
    return out_arr
