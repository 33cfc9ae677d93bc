# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled cone algebra; signatures mirror the pure-Python module ``_cones_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY, copysign

cnp.import_array()


cdef inline double _dot(const double[:] a, const double[:] b, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(lo, hi):
        acc += a[i] * b[i]
    return acc


def jprod(const double[:] u, const double[:] v, Py_ssize_t l, const long[:] q):
    cdef Py_ssize_t n = u.shape[0], i, k, a, b
    out = np.empty(n)
    cdef double[:] r = out
    for i in range(l):
        r[i] = u[i] * v[i]
    a = l
    for k in range(q.shape[0]):
        b = a + q[k]
        r[a] = _dot(u, v, a, b)
        for i in range(a + 1, b):
            r[i] = u[a] * v[i] + v[a] * u[i]
        a = b
    return out


def jdiv(const double[:] lam, const double[:] d, Py_ssize_t l, const long[:] q):
    cdef Py_ssize_t n = lam.shape[0], i, k, a, b
    cdef double n1, det, x0
    out = np.empty(n)
    cdef double[:] r = out
    for i in range(l):
        r[i] = d[i] / lam[i]
    a = l
    for k in range(q.shape[0]):
        b = a + q[k]
        n1 = sqrt(_dot(lam, lam, a + 1, b))
        det = (lam[a] - n1) * (lam[a] + n1)
        x0 = (lam[a] * d[a] - _dot(lam, d, a + 1, b)) / det
        r[a] = x0
        for i in range(a + 1, b):
            r[i] = (d[i] - x0 * lam[i]) / lam[a]
        a = b
    return out


def min_eig(const double[:] u, Py_ssize_t l, const long[:] q):
    cdef double m = INFINITY, e
    cdef Py_ssize_t i, k, a, b
    for i in range(l):
        if u[i] < m:
            m = u[i]
    a = l
    for k in range(q.shape[0]):
        b = a + q[k]
        e = u[a] - sqrt(_dot(u, u, a + 1, b))
        if e < m:
            m = e
        a = b
    return m


def nt_scaling(const double[:] s, const double[:] z, Py_ssize_t l, const long[:] q):
    cdef Py_ssize_t nq = q.shape[0], i, k, a, b, vo = 0, tot = 0
    for k in range(nq):
        tot += q[k]
    dl_arr = np.empty(l)
    beta_arr = np.empty(nq)
    v_arr = np.empty(tot)
    cdef double[:] dl = dl_arr
    cdef double[:] beta = beta_arr
    cdef double[:] v = v_arr
    cdef double ns, nz, sn, zn, sbzb, gam, w0, c
    for i in range(l):
        dl[i] = sqrt(s[i] / z[i])
    a = l
    for k in range(nq):
        b = a + q[k]
        ns = sqrt(_dot(s, s, a + 1, b))
        nz = sqrt(_dot(z, z, a + 1, b))
        sn = sqrt((s[a] - ns) * (s[a] + ns))
        zn = sqrt((z[a] - nz) * (z[a] + nz))
        sbzb = _dot(s, z, a, b) / (sn * zn)
        gam = sqrt(0.5 * (1.0 + sbzb))
        w0 = (s[a] / sn + z[a] / zn) / (2.0 * gam)
        c = 1.0 / sqrt(2.0 * (w0 + 1.0))
        v[vo] = (w0 + 1.0) * c
        for i in range(a + 1, b):
            v[vo + i - a] = (s[i] / sn - z[i] / zn) / (2.0 * gam) * c
        beta[k] = sqrt(sn / zn)
        vo += b - a
        a = b
    return dl_arr, beta_arr, v_arr


def apply_scaling(const double[:] dl, const double[:] beta, const double[:] v, x,
                  Py_ssize_t l, const long[:] q, bint inverse):
    xa = np.ascontiguousarray(x, dtype=np.float64)
    cdef bint vec = xa.ndim == 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] X = xa.reshape(xa.shape[0], -1)
    out = np.empty_like(X)
    cdef double[:, ::1] O = out
    cdef double[:, ::1] Xv = X
    cdef Py_ssize_t ncol = X.shape[1], i, j, k, a, b, vo = 0
    cdef double acc, sgn, bk
    for i in range(l):
        for j in range(ncol):
            O[i, j] = Xv[i, j] / dl[i] if inverse else Xv[i, j] * dl[i]
    a = l
    for k in range(q.shape[0]):
        b = a + q[k]
        bk = 1.0 / beta[k] if inverse else beta[k]
        for j in range(ncol):
            # (2 v v^T - J) x, with v -> J v for the inverse
            acc = v[vo] * Xv[a, j]
            sgn = -1.0 if inverse else 1.0
            for i in range(a + 1, b):
                acc += sgn * v[vo + i - a] * Xv[i, j]
            O[a, j] = bk * (2.0 * v[vo] * acc - Xv[a, j])
            for i in range(a + 1, b):
                O[i, j] = bk * (2.0 * sgn * v[vo + i - a] * acc + Xv[i, j])
        vo += b - a
        a = b
    return out.reshape(xa.shape)


def max_step(const double[:] u, const double[:] d, Py_ssize_t l, const long[:] q):
    cdef double t = INFINITY, u0, d0, qa, qb, qc, disc, qq, root
    cdef Py_ssize_t i, k, a, b
    for i in range(l):
        if d[i] < 0 and -u[i] / d[i] < t:
            t = -u[i] / d[i]
    a = l
    for k in range(q.shape[0]):
        b = a + q[k]
        u0 = u[a]
        d0 = d[a]
        qa = d0 * d0 - _dot(d, d, a + 1, b)
        qb = 2.0 * (u0 * d0 - _dot(u, d, a + 1, b))
        qc = u0 * u0 - _dot(u, u, a + 1, b)
        a = b
        if d0 < 0 and -u0 / d0 < t:
            t = -u0 / d0
        if fabs(qa) < 1e-300:
            if qb < 0 and -qc / qb < t:
                t = -qc / qb
            continue
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0:
            qq = -0.5 * (qb + copysign(sqrt(disc), qb))
            root = qq / qa
            if root > 0 and root < t:
                t = root
            if qq != 0:
                root = qc / qq
                if root > 0 and root < t:
                    t = root
    return t
