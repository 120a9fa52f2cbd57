# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled tridiagonal and phase-rotation kernels (see kernels.py for the
NumPy reference implementations and the dispatch logic)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef double complex cplx


def solve_tridiagonal(cplx[::1] lower, cplx[::1] diag, cplx[::1] upper,
                      cplx[:, ::1] rhs):
    """Thomas algorithm for one tridiagonal matrix and many right-hand sides.

    The systems produced by the Crank-Nicolson substeps are strictly
    diagonally dominant, so no pivoting is needed.
    """
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t m = rhs.shape[1]
    cdef cnp.ndarray[cplx, ndim=2] out_arr = np.empty((n, m), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef cnp.ndarray[cplx, ndim=1] cp_arr = np.empty(n, dtype=np.complex128)
    cdef cplx[::1] cp = cp_arr
    cdef Py_ssize_t i, j
    cdef cplx denom, w

    cp[0] = upper[0] / diag[0]
    for i in range(1, n - 1):
        cp[i] = upper[i] / (diag[i] - lower[i] * cp[i - 1])

    for j in range(m):
        out[0, j] = rhs[0, j] / diag[0]
        for i in range(1, n):
            denom = diag[i] - lower[i] * cp[i - 1]
            out[i, j] = (rhs[i, j] - lower[i] * out[i - 1, j]) / denom
        for i in range(n - 2, -1, -1):
            out[i, j] = out[i, j] - cp[i] * out[i + 1, j]
    return out_arr


def apply_tridiagonal(cplx[::1] lower, cplx[::1] diag, cplx[::1] upper,
                      cplx[:, ::1] x):
    """Tridiagonal matrix applied to every column of x."""
    cdef Py_ssize_t n = diag.shape[0]
    cdef Py_ssize_t m = x.shape[1]
    cdef cnp.ndarray[cplx, ndim=2] out_arr = np.empty((n, m), dtype=np.complex128)
    cdef cplx[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    for j in range(m):
        for i in range(n):
            out[i, j] = diag[i] * x[i, j]
            if i > 0:
                out[i, j] = out[i, j] + lower[i] * x[i - 1, j]
            if i < n - 1:
                out[i, j] = out[i, j] + upper[i] * x[i + 1, j]
    return out_arr


cdef extern from "math.h":
    double cos(double x) nogil
    double sin(double x) nogil


def phase_step(cplx[:, ::1] psi1, cplx[:, ::1] psi2, double[:, ::1] pot,
               double g11, double g12, double g22, double dt):
    """In-place nonlinear + potential phase rotation over dt."""
    cdef Py_ssize_t n = psi1.shape[0]
    cdef Py_ssize_t m = psi1.shape[1]
    cdef Py_ssize_t i, j
    cdef double d1, d2, ph1, ph2
    cdef cplx a, b
    for i in range(n):
        for j in range(m):
            a = psi1[i, j]
            b = psi2[i, j]
            d1 = a.real * a.real + a.imag * a.imag
            d2 = b.real * b.real + b.imag * b.imag
            ph1 = -dt * (pot[i, j] + g11 * d1 + g12 * d2)
            ph2 = -dt * (pot[i, j] + g22 * d2 + g12 * d1)
            psi1[i, j] = a * (cos(ph1) + 1j * sin(ph1))
            psi2[i, j] = b * (cos(ph2) + 1j * sin(ph2))
