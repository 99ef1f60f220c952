# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-mode kernels; see _pykernels.py for the reference semantics."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def apply_propagator(const double complex[:, ::1] w, const double complex[:, ::1] h,
                     const double[:, ::1] e11, const double[:, ::1] re12,
                     const double[:, ::1] e21, const double[:, ::1] e22):
    cdef Py_ssize_t n0 = w.shape[0], n1 = w.shape[1], i, j
    wo_arr = np.empty((n0, n1), dtype=np.complex128)
    ho_arr = np.empty((n0, n1), dtype=np.complex128)
    cdef double complex[:, ::1] wo = wo_arr
    cdef double complex[:, ::1] ho = ho_arr
    cdef double complex a, b
    for i in range(n0):
        for j in range(n1):
            a = w[i, j]
            b = h[i, j]
            wo[i, j] = e11[i, j] * a + re12[i, j] * b
            ho[i, j] = e21[i, j] * a + e22[i, j] * b
    return wo_arr, ho_arr


def transport(const double[:, ::1] u1, const double[:, ::1] u2,
              const double[:, ::1] wx, const double[:, ::1] wy,
              const double[:, ::1] hx, const double[:, ::1] hy):
    cdef Py_ssize_t n0 = u1.shape[0], n1 = u1.shape[1], i, j
    nw_arr = np.empty((n0, n1))
    nh_arr = np.empty((n0, n1))
    cdef double[:, ::1] nw = nw_arr
    cdef double[:, ::1] nh = nh_arr
    cdef double a, b
    for i in range(n0):
        for j in range(n1):
            a = u1[i, j]
            b = u2[i, j]
            nw[i, j] = -(a * wx[i, j] + b * wy[i, j])
            nh[i, j] = -(a * hx[i, j] + b * hy[i, j])
    return nw_arr, nh_arr


def quadratic_moments(const double complex[:, ::1] w, const double complex[:, ::1] h,
                      const double[:, ::1] ksq, const double[:, ::1] inv_ksq,
                      const double[:, ::1] weight):
    cdef Py_ssize_t n0 = w.shape[0], n1 = w.shape[1], i, j
    cdef double s[9]
    cdef double ww, hh, wh, wt, k2, ik2
    cdef double complex a, b
    for i in range(9):
        s[i] = 0.0
    for i in range(n0):
        for j in range(n1):
            a = w[i, j]
            b = h[i, j]
            wt = weight[i, j]
            ww = wt * (a.real * a.real + a.imag * a.imag)
            hh = wt * (b.real * b.real + b.imag * b.imag)
            wh = wt * (a.real * b.real + a.imag * b.imag)
            k2 = ksq[i, j]
            ik2 = inv_ksq[i, j]
            s[0] += ww * ik2
            s[1] += hh * ik2
            s[2] += wh * ik2
            s[3] += ww
            s[4] += hh
            s[5] += wh
            s[6] += ww * k2
            s[7] += hh * k2
            s[8] += wh * k2
    out = np.empty(9)
    for i in range(9):
        out[i] = s[i]
    return out


def masked_sum(const double complex[:, ::1] a, const double[:, ::1] ksq,
               const double[:, ::1] mult, const double[:, ::1] weight, double radius_sq):
    cdef Py_ssize_t n0 = a.shape[0], n1 = a.shape[1], i, j
    cdef double acc = 0.0
    cdef double complex c
    for i in range(n0):
        for j in range(n1):
            if ksq[i, j] <= radius_sq:
                c = a[i, j]
                acc += weight[i, j] * mult[i, j] * (c.real * c.real + c.imag * c.imag)
    return acc
