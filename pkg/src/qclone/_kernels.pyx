# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial kernel; same contract as ``qclone._kernels_py.simulate_trials``."""
import numpy as np

from libc.math cimport sqrt

# Intermediate amplitudes are kept as separate real/imaginary doubles: C99
# complex multiplication calls __muldc3 for every product.


cdef inline Py_ssize_t _pick(double* p, Py_ssize_t m, double u) noexcept nogil:
    cdef double total = 0.0, acc = 0.0, target
    cdef Py_ssize_t i, last = -1
    for i in range(m):
        total += p[i]
    target = u * total
    for i in range(m):
        acc += p[i]
        if p[i] > 0:
            last = i
            if acc > target:
                return i
    return last


def simulate_trials(const double complex[:, ::1] iso,
                    const double complex[:, ::1] inputs,
                    const double[::1] u_outcome,
                    const double[::1] u_step,
                    const double complex[:, :, ::1] meas,
                    const double complex[:, :, :, ::1] steps,
                    const unsigned char[:, ::1] success):
    cdef Py_ssize_t n = inputs.shape[0]
    cdef Py_ssize_t K = meas.shape[0]
    cdef Py_ssize_t J = steps.shape[1]
    if K > 16 or J > 16:
        raise ValueError("kernel supports at most 16 outcomes per stage")
    if iso.shape[0] != 8 or meas.shape[2] != 8:
        raise ValueError("kernel expects an 8-dimensional output space")

    out_k = np.empty(n, dtype=np.int64)
    out_j = np.empty(n, dtype=np.int64)
    out_ok = np.empty(n, dtype=np.uint8)
    out_f = np.empty(n, dtype=np.float64)
    cdef long long[::1] vk = out_k
    cdef long long[::1] vj = out_j
    cdef unsigned char[::1] vok = out_ok
    cdef double[::1] vf = out_f

    # input -> target maps A_k = meas_k @ iso, composed once
    cdef double ar[16][2][2]
    cdef double ai[16][2][2]
    cdef double cr[16][2]
    cdef double ci[16][2]
    cdef double dr[16][2]
    cdef double di[16][2]
    cdef double p[16]
    cdef double q[16]
    cdef double a0r, a0i, a1r, a1i, f0r, f0i, f1r, f1i, mr, mi, re, im, nrm
    cdef Py_ssize_t i, r, s, k, j

    with nogil:
        for k in range(K):
            for r in range(2):
                for j in range(2):
                    re = 0.0
                    im = 0.0
                    for s in range(8):
                        mr = meas[k, r, s].real
                        mi = meas[k, r, s].imag
                        re += mr * iso[s, j].real - mi * iso[s, j].imag
                        im += mr * iso[s, j].imag + mi * iso[s, j].real
                    ar[k][r][j] = re
                    ai[k][r][j] = im
        for i in range(n):
            a0r = inputs[i, 0].real
            a0i = inputs[i, 0].imag
            a1r = inputs[i, 1].real
            a1i = inputs[i, 1].imag
            for k in range(K):
                p[k] = 0.0
                for r in range(2):
                    re = ar[k][r][0] * a0r - ai[k][r][0] * a0i + ar[k][r][1] * a1r - ai[k][r][1] * a1i
                    im = ar[k][r][0] * a0i + ai[k][r][0] * a0r + ar[k][r][1] * a1i + ai[k][r][1] * a1r
                    cr[k][r] = re
                    ci[k][r] = im
                    p[k] += re * re + im * im
            k = _pick(p, K, u_outcome[i])
            nrm = 1.0 / sqrt(p[k])
            f0r = cr[k][0] * nrm
            f0i = ci[k][0] * nrm
            f1r = cr[k][1] * nrm
            f1i = ci[k][1] * nrm
            for j in range(J):
                q[j] = 0.0
                for r in range(2):
                    mr = steps[k, j, r, 0].real
                    mi = steps[k, j, r, 0].imag
                    re = mr * f0r - mi * f0i
                    im = mr * f0i + mi * f0r
                    mr = steps[k, j, r, 1].real
                    mi = steps[k, j, r, 1].imag
                    re += mr * f1r - mi * f1i
                    im += mr * f1i + mi * f1r
                    dr[j][r] = re
                    di[j][r] = im
                    q[j] += re * re + im * im
            j = _pick(q, J, u_step[i])
            nrm = 1.0 / sqrt(q[j])
            # <input|final> = conj(a) . d / |d|
            re = (a0r * dr[j][0] + a0i * di[j][0] + a1r * dr[j][1] + a1i * di[j][1]) * nrm
            im = (a0r * di[j][0] - a0i * dr[j][0] + a1r * di[j][1] - a1i * dr[j][1]) * nrm
            vk[i] = k
            vj[i] = j
            vok[i] = success[k, j]
            vf[i] = re * re + im * im
    return out_k, out_j, out_ok, out_f
