# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled float64 kernels for truncated Taylor coefficient arrays.

Each kernel walks a precomputed triple table (i, j, k) with i + j = k in
the exact order the table stores it, so results match the numpy fallback
bit for bit.  Division and square root consume degree-sliced tables: the
caller passes offsets delimiting the triples and positions of each total
degree, and the recursion fills outputs one degree at a time.
"""

from libc.math cimport sqrt as csqrt


def mul(const double[::1] a, const double[::1] b, double[::1] out,
        const int[::1] ti, const int[::1] tj, const int[::1] tk):
    cdef Py_ssize_t m, n = ti.shape[0]
    with nogil:
        for m in range(n):
            out[tk[m]] += a[ti[m]] * b[tj[m]]


def div(const double[::1] a, const double[::1] b, double[::1] out, double[::1] acc,
        const int[::1] ti, const int[::1] tj, const int[::1] tk,
        const long[::1] trip_off, const long[::1] pos_off, Py_ssize_t ndeg):
    """out = a / b given b[0] != 0.  acc must arrive zeroed."""
    cdef double b0 = b[0]
    cdef Py_ssize_t m, p, d
    out[0] = a[0] / b0
    with nogil:
        for d in range(1, ndeg):
            for m in range(trip_off[d], trip_off[d + 1]):
                acc[tk[m]] += b[tj[m]] * out[ti[m]]
            for p in range(pos_off[d], pos_off[d + 1]):
                out[p] = (a[p] - acc[p]) / b0


def sqrt_(const double[::1] a, double[::1] out, double[::1] acc,
          const int[::1] ti, const int[::1] tj, const int[::1] tk,
          const long[::1] trip_off, const long[::1] pos_off, Py_ssize_t ndeg):
    """out = sqrt(a) given a[0] > 0.  acc must arrive zeroed."""
    cdef double s0 = csqrt(a[0])
    cdef double denom = 2.0 * s0
    cdef Py_ssize_t m, p, d
    out[0] = s0
    with nogil:
        for d in range(1, ndeg):
            for m in range(trip_off[d], trip_off[d + 1]):
                acc[tk[m]] += out[ti[m]] * out[tj[m]]
            for p in range(pos_off[d], pos_off[d + 1]):
                out[p] = (a[p] - acc[p]) / denom
