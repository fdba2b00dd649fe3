# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Same signatures and results as ``_fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def spf_sieve(Py_ssize_t n):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] arr = np.zeros(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] spf = arr
    cdef Py_ssize_t i, j
    with nogil:
        if n >= 1:
            spf[1] = 1
        for i in range(2, n + 1):
            if spf[i] == 0:
                spf[i] = i
                if i <= n // i:
                    j = i * i
                    while j <= n:
                        if spf[j] == 0:
                            spf[j] = i
                        j += i
    return arr


def extend_multiplicative(const double complex[::1] prime_values, const cnp.int64_t[::1] spf, Py_ssize_t x):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] arr = np.zeros(x + 1, dtype=np.complex128)
    cdef double complex[::1] f = arr
    cdef Py_ssize_t n, p
    with nogil:
        if x >= 1:
            f[1] = 1.0
        for n in range(2, x + 1):
            p = spf[n]
            if p == n:
                f[n] = prime_values[n]
            else:
                f[n] = f[p] * f[n // p]
    return arr


def divisor_sum(const double complex[::1] f):
    cdef Py_ssize_t x = f.shape[0] - 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] arr = np.zeros(x + 1, dtype=np.complex128)
    cdef double complex[::1] h = arr
    cdef Py_ssize_t d, m
    cdef double complex fd
    with nogil:
        for d in range(1, x + 1):
            fd = f[d]
            m = d
            while m <= x:
                h[m] = h[m] + fd
                m += d
    return arr


def convolve_conj(const double complex[::1] h):
    cdef Py_ssize_t x = h.shape[0] - 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] arr = np.zeros(x + 1, dtype=np.complex128)
    cdef double complex[::1] g = arr
    cdef Py_ssize_t d, m
    cdef double complex hd
    with nogil:
        for d in range(1, x + 1):
            hd = h[d]
            m = 1
            while m * d <= x:
                g[m * d] = g[m * d] + hd * h[m].conjugate()
                m += 1
    return arr


def kahan_cumsum(const double complex[::1] v):
    cdef Py_ssize_t n = v.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] out = arr
    cdef double sr = 0.0, si = 0.0, cr = 0.0, ci = 0.0, y, t
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            y = v[i].real - cr
            t = sr + y
            cr = (t - sr) - y
            sr = t
            y = v[i].imag - ci
            t = si + y
            ci = (t - si) - y
            si = t
            out[i] = sr + 1j * si
    return arr


def distance_grid(const double[::1] logp, const double[::1] inv_p, const double[::1] re,
                  const double[::1] im, const double[::1] ts):
    cdef Py_ssize_t nt = ts.shape[0], np_ = logp.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] arr = np.empty(nt, dtype=np.float64)
    cdef double[::1] out = arr
    cdef Py_ssize_t i, j
    cdef double s, th, t
    with nogil:
        for i in range(nt):
            t = ts[i]
            s = 0.0
            for j in range(np_):
                th = t * logp[j]
                s += inv_p[j] * (1.0 - (re[j] * cos(th) + im[j] * sin(th)))
            out[i] = s
    return arr
