# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror :mod:`qsteer._kernels_py`."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def epr_table(const double complex[:, :, :, ::1] alice,
              const double complex[:, :, :, ::1] bob,
              const double complex[:, :, ::1] rho):
    """P[k, l] = prod_m Re Tr[(alice[m, k] (x) bob[m, l]) rho[m]]."""
    cdef Py_ssize_t n = alice.shape[0], d = alice.shape[1]
    cdef Py_ssize_t m, k, l, a, b, c, e
    cdef double complex acc
    cdef double complex[:, :, ::1] cond = np.empty((d, 2, 2), dtype=np.complex128)
    out_arr = np.ones((d, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for m in range(n):
            # Bob-side operator left after contracting Alice's projector with rho
            for k in range(d):
                for e in range(2):
                    for c in range(2):
                        acc = 0
                        for a in range(2):
                            for b in range(2):
                                acc = acc + alice[m, k, a, b] * rho[m, 2 * b + e, 2 * a + c]
                        cond[k, e, c] = acc
            for k in range(d):
                for l in range(d):
                    acc = (bob[m, l, 0, 0] * cond[k, 0, 0] + bob[m, l, 0, 1] * cond[k, 1, 0]
                           + bob[m, l, 1, 0] * cond[k, 0, 1] + bob[m, l, 1, 1] * cond[k, 1, 1])
                    out[k, l] *= acc.real
    return out_arr


def product_table(const double[:, :, ::1] factors):
    """P[k, l] = prod_m factors[m, k, l]."""
    cdef Py_ssize_t n = factors.shape[0], d0 = factors.shape[1], d1 = factors.shape[2]
    cdef Py_ssize_t m, k, l
    out_arr = np.ones((d0, d1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for m in range(n):
            for k in range(d0):
                for l in range(d1):
                    out[k, l] *= factors[m, k, l]
    return out_arr


def lhs_values(const double[:, ::1] weights,
               const long[:, ::1] first,
               const long[:, ::1] second,
               const double complex[:, :, :, ::1] responses,
               const double complex[:, ::1] fourier):
    """value[s] = sum_j w[s, j] (<first|rho|first> + <f_second|rho|f_second>).

    ``fourier[:, n]`` is the n-th Fourier vector.
    """
    cdef Py_ssize_t S = weights.shape[0], L = weights.shape[1], D = responses.shape[2]
    cdef Py_ssize_t s, j, p, q, a, n
    cdef double total, w
    cdef double complex acc, row
    out_arr = np.zeros(S, dtype=np.float64)
    cdef double[::1] out = out_arr
    with nogil:
        for s in range(S):
            total = 0.0
            for j in range(L):
                w = weights[s, j]
                if w == 0.0:
                    continue
                a = first[s, j]
                n = second[s, j]
                acc = 0
                for p in range(D):
                    row = 0
                    for q in range(D):
                        row = row + responses[s, j, p, q] * fourier[q, n]
                    acc = acc + fourier[p, n].conjugate() * row
                total += w * (responses[s, j, a, a].real + acc.real)
            out[s] = total
    return out_arr
