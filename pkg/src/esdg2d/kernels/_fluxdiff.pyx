# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled flux-differencing kernel: one two-point Euler flux per point pair.

Matches the arithmetic of kernels.pykernels pair for pair; the element loop
runs with the GIL released so callers can chunk it across threads.
"""

import numpy as np
cimport numpy as cnp


cdef inline double _log_mean(double a, double b, double la, double lb) nogil:
    cdef double s = a + b
    cdef double z = (a - b) / s
    cdef double z2 = z * z
    if z2 < 1.0e-4:
        return 0.5 * s / (1.0 + z2 * (1.0 / 3.0 + z2 * (1.0 / 5.0 + z2 / 7.0)))
    return (a - b) / (la - lb)


def flux_diff_accumulate(
    double[:, :, ::1] prim,   # (K, Nt, 6): rho, u, v, beta, log rho, log beta
    double[:, :, ::1] geo,    # (K, Nt, 4): G11, G12, G21, G22
    pattern,
    double gamma,
    double[:, :, ::1] out,    # (K, Nt, 4), accumulated in place
    int k_lo=0,
    int k_hi=-1,
):
    cdef const int[::1] im = pattern.im
    cdef const int[::1] inn = pattern.inn
    cdef const double[::1] q1mn = pattern.q1mn
    cdef const double[::1] q1nm = pattern.q1nm
    cdef const double[::1] q2mn = pattern.q2mn
    cdef const double[::1] q2nm = pattern.q2nm
    cdef Py_ssize_t npairs = im.shape[0]
    cdef Py_ssize_t kk, p, m, n
    cdef Py_ssize_t klo = k_lo
    cdef Py_ssize_t khi = prim.shape[0] if k_hi < 0 else k_hi
    cdef double gm1 = gamma - 1.0
    cdef double rm, um, vm, bm, lrm, lbm
    cdef double rn, un, vn, bn, lrn, lbn
    cdef double rlog, blog, ra, ba, ua, va, p_avg, vel2, e_avg, ep
    cdef double f1x, f2x, f3x, f4x, f1y, f2y, f3y, f4y
    cdef double g1, g2, g3, g4, w1, w2

    with nogil:
        for kk in range(klo, khi):
            for p in range(npairs):
                m = im[p]
                n = inn[p]
                rm = prim[kk, m, 0]; um = prim[kk, m, 1]; vm = prim[kk, m, 2]
                bm = prim[kk, m, 3]; lrm = prim[kk, m, 4]; lbm = prim[kk, m, 5]
                rn = prim[kk, n, 0]; un = prim[kk, n, 1]; vn = prim[kk, n, 2]
                bn = prim[kk, n, 3]; lrn = prim[kk, n, 4]; lbn = prim[kk, n, 5]

                rlog = _log_mean(rm, rn, lrm, lrn)
                blog = _log_mean(bm, bn, lbm, lbn)
                ra = 0.5 * (rm + rn)
                ba = 0.5 * (bm + bn)
                ua = 0.5 * (um + un)
                va = 0.5 * (vm + vn)
                p_avg = 0.5 * ra / ba
                vel2 = um * un + vm * vn
                e_avg = rlog / (2.0 * blog * gm1) + 0.5 * rlog * vel2
                ep = e_avg + p_avg

                f1x = rlog * ua
                f1y = rlog * va
                f2x = f1x * ua + p_avg
                f3x = f1y * ua
                f4x = ep * ua
                f2y = f3x
                f3y = f1y * va + p_avg
                f4y = ep * va

                g1 = geo[kk, m, 0] + geo[kk, n, 0]
                g2 = geo[kk, m, 1] + geo[kk, n, 1]
                g3 = geo[kk, m, 2] + geo[kk, n, 2]
                g4 = geo[kk, m, 3] + geo[kk, n, 3]

                w1 = g1 * q1mn[p] + g2 * q2mn[p]
                w2 = g3 * q1mn[p] + g4 * q2mn[p]
                out[kk, m, 0] += w1 * f1x + w2 * f1y
                out[kk, m, 1] += w1 * f2x + w2 * f2y
                out[kk, m, 2] += w1 * f3x + w2 * f3y
                out[kk, m, 3] += w1 * f4x + w2 * f4y

                if m != n:
                    w1 = g1 * q1nm[p] + g2 * q2nm[p]
                    w2 = g3 * q1nm[p] + g4 * q2nm[p]
                    out[kk, n, 0] += w1 * f1x + w2 * f1y
                    out[kk, n, 1] += w1 * f2x + w2 * f2y
                    out[kk, n, 2] += w1 * f3x + w2 * f3y
                    out[kk, n, 3] += w1 * f4x + w2 * f4y
