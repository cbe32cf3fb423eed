# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: complex Hermitian Jacobi sweeps and product log-factors."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, round, M_PI, INFINITY

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

cnp.import_array()


cdef double _offnorm(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double s = 0.0, r
    for i in range(n):
        for j in range(n):
            if i != j:
                r = cabs(a[i, j])
                s += r * r
    return sqrt(s)


def jacobi_hermitian(double complex[:, ::1] a, double complex[:, ::1] v,
                     double tol, int max_sweeps, bint want_vectors):
    """Row-cyclic Jacobi on ``a`` in place; returns the sweep count or -1."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double apq, theta, t, c, s, app, aqq
    cdef double complex e, upp, upq, uqp, uqq, x, y
    cdef double target
    cdef double fro = 0.0
    cdef int result = -1
    for p in range(n):
        for q in range(n):
            fro += cabs(a[p, q]) * cabs(a[p, q])
    target = tol * sqrt(fro)
    with nogil:
        for sweep in range(max_sweeps + 1):
            if _offnorm(a, n) <= target:
                result = sweep
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = cabs(a[p, q])
                    if apq == 0.0:
                        continue
                    e = a[p, q] / apq
                    app = creal(a[p, p])
                    aqq = creal(a[q, q])
                    theta = (aqq - app) / (2.0 * apq)
                    if theta >= 0:
                        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                    else:
                        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    upp = c
                    upq = s
                    uqp = -s * conj(e)
                    uqq = c * conj(e)
                    for k in range(n):
                        x = a[k, p]
                        y = a[k, q]
                        a[k, p] = x * upp + y * uqp
                        a[k, q] = x * upq + y * uqq
                    for k in range(n):
                        x = a[p, k]
                        y = a[q, k]
                        a[p, k] = conj(upp) * x + conj(uqp) * y
                        a[q, k] = conj(upq) * x + conj(uqq) * y
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    if want_vectors:
                        for k in range(n):
                            x = v[k, p]
                            y = v[k, q]
                            v[k, p] = x * upp + y * uqp
                            v[k, q] = x * upq + y * uqq
    return result


cdef inline double complex _log1m_exp(double complex w) nogil:
    # log(1 - e^w), stable on both sides of Re w = 0
    cdef double complex ew
    if creal(w) <= 0.0:
        ew = cexp(w)
        if ew == 1.0:
            return -INFINITY
        return clog(1.0 - ew)
    ew = cexp(-w)
    return w + clog(ew - 1.0)


def log_factor_pair(double complex[::1] z, double complex[::1] zk):
    """Matrices U[m,k] = log(1 - e^{2pi i (zk-z)}), L[m,k] = log(1 - e^{2pi i (z-zk)})."""
    cdef Py_ssize_t m = z.shape[0], n = zk.shape[0], i, j
    cdef double complex tpi = 2.0j * M_PI
    cdef double complex d, diff
    cdef double dx
    up = np.empty((m, n), dtype=np.complex128)
    lo = np.empty((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] U = up
    cdef double complex[:, ::1] L = lo
    with nogil:
        for i in range(m):
            for j in range(n):
                # reduce Re(zk - z) mod 1 so integer shifts give exact zeros
                diff = zk[j] - z[i]
                dx = creal(diff)
                dx = dx - round(dx)
                d = tpi * (dx + 1j * cimag(diff))
                U[i, j] = _log1m_exp(d)
                L[i, j] = _log1m_exp(-d)
    return up, lo
