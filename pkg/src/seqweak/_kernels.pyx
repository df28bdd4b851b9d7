# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of :mod:`seqweak._kernels_py` (same signatures and results)."""

import numpy as np


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def couple_axis(const double complex[:, :, ::1] amp, proj, Py_ssize_t steps, int axis):
    cdef const double complex[:, ::1] p = np.ascontiguousarray(proj, dtype=np.complex128)
    cdef Py_ssize_t nx = amp.shape[1], ny = amp.shape[2]
    out_arr = np.empty((2, nx, ny), dtype=np.complex128)
    cdef double complex[:, :, ::1] out = out_arr
    cdef double complex p00 = p[0, 0], p01 = p[0, 1], p10 = p[1, 0], p11 = p[1, 1]
    cdef double complex a0, a1, b0, b1
    cdef Py_ssize_t i, j, si, sj, lo, hi, n
    cdef double leak = 0.0
    with nogil:
        # gather: out = (1 - P) a + P a(shifted source), one pass over destinations
        for i in range(nx):
            si = i - steps if axis == 0 else i
            for j in range(ny):
                sj = j - steps if axis == 1 else j
                a0 = amp[0, i, j]
                a1 = amp[1, i, j]
                b0 = a0 - (p00 * a0 + p01 * a1)
                b1 = a1 - (p10 * a0 + p11 * a1)
                if 0 <= si < nx and 0 <= sj < ny:
                    a0 = amp[0, si, sj]
                    a1 = amp[1, si, sj]
                    b0 = b0 + p00 * a0 + p01 * a1
                    b1 = b1 + p10 * a0 + p11 * a1
                out[0, i, j] = b0
                out[1, i, j] = b1
        # leakage: P a on the source rows/columns pushed off the grid
        n = nx if axis == 0 else ny
        if steps > 0:
            lo = n - steps
            hi = n
        else:
            lo = 0
            hi = -steps
        if axis == 0:
            for i in range(lo, hi):
                for j in range(ny):
                    leak += _abs2(p00 * amp[0, i, j] + p01 * amp[1, i, j])
                    leak += _abs2(p10 * amp[0, i, j] + p11 * amp[1, i, j])
        else:
            for i in range(nx):
                for j in range(lo, hi):
                    leak += _abs2(p00 * amp[0, i, j] + p01 * amp[1, i, j])
                    leak += _abs2(p10 * amp[0, i, j] + p11 * amp[1, i, j])
    return out_arr, leak


def joint_moment(const double complex[:, :, ::1] amp, xs, ys, int jx, int jy):
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64) ** jx
    cdef const double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64) ** jy
    cdef Py_ssize_t nx = amp.shape[1], ny = amp.shape[2]
    cdef Py_ssize_t i, j
    cdef double total = 0.0, row
    cdef double complex a0, a1
    with nogil:
        for i in range(nx):
            row = 0.0
            for j in range(ny):
                a0 = amp[0, i, j]
                a1 = amp[1, i, j]
                row = row + yv[j] * (a0.real * a0.real + a0.imag * a0.imag
                                     + a1.real * a1.real + a1.imag * a1.imag)
            total = total + xv[i] * row
    return total
