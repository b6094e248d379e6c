# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Adaptive Dormand-Prince 5(4) stepper, compiled kernel.

Twin of ``glshoot._stepper_py``; the two are kept in sync statement for
statement so that they produce identical trajectories.
"""

from libc.math cimport sqrt, fabs, pow
from libc.stdlib cimport free, malloc, realloc

import numpy as np

TERM_X_MAX = 0
TERM_ESCAPED = 1
TERM_UNDERFLOW = 2
TERM_SAMPLE_CAP = 3

FIELD_NONE = 0
FIELD_PHI = 1
FIELD_CHI = 2

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0

cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0
cdef double A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0
cdef double A42 = -56.0 / 15.0
cdef double A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0
cdef double A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0
cdef double A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0
cdef double A62 = -355.0 / 33.0
cdef double A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0
cdef double A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0
cdef double B3 = 500.0 / 1113.0
cdef double B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0
cdef double B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0
cdef double E3 = -71.0 / 16695.0
cdef double E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0
cdef double E6 = 22.0 / 525.0
cdef double E7 = -1.0 / 40.0


cdef inline double _hermite(double y0, double y1, double f0, double f1,
                            double h, double t) nogil:
    return y0 + t * t * (3.0 - 2.0 * t) * (y1 - y0) + h * t * (1.0 - t) * (
        (1.0 - t) * f0 - t * f1
    )


cdef inline double _crossing(double y0, double y1, double f0, double f1,
                             double h, double radius) nogil:
    cdef double lo = 0.0
    cdef double hi = 1.0
    cdef double mid, val
    while (hi - lo) * h > 1e-9:
        mid = 0.5 * (lo + hi)
        val = _hermite(y0, y1, f0, f1, h, mid)
        if val > radius or val < -radius:
            hi = mid
        else:
            lo = mid
    return hi


cdef struct Buf:
    double *data
    Py_ssize_t n
    Py_ssize_t cap


cdef inline int _push(Buf *b, double val) except -1:
    cdef double *grown
    if b.n == b.cap:
        b.cap = b.cap * 2
        grown = <double *> realloc(b.data, b.cap * sizeof(double))
        if grown == NULL:
            raise MemoryError()
        b.data = grown
    b.data[b.n] = val
    b.n += 1
    return 0


cdef object _to_array(Buf *b):
    arr = np.empty(b.n, dtype=np.float64)
    cdef double[::1] mv = arr
    cdef Py_ssize_t i
    for i in range(b.n):
        mv[i] = b.data[i]
    return arr


def integrate_kernel(
    double eps1,
    double eps2,
    double lam1,
    double lam2,
    double mu1,
    double mu2,
    double x0,
    double phi0,
    double chi0,
    double z0,
    double v0,
    double rel_tol,
    double abs_tol,
    double h0,
    double max_step,
    double x_max,
    double radius,
    Py_ssize_t max_samples,
):
    """Integrate the coupled system from (phi0, chi0, z0, v0) at x0.

    Returns (xs, phis, chis, zs, vs, termination, escape_field, escape_sign)
    with the arrays as float64 numpy arrays.
    """
    cdef Buf xs, ps, cs, zs, vs
    cdef Buf *bufs[5]
    cdef int i
    bufs[0] = &xs
    bufs[1] = &ps
    bufs[2] = &cs
    bufs[3] = &zs
    bufs[4] = &vs
    for i in range(5):
        bufs[i].n = 0
        bufs[i].cap = 1024
        bufs[i].data = <double *> malloc(1024 * sizeof(double))
        if bufs[i].data == NULL:
            raise MemoryError()

    cdef int term = TERM_X_MAX
    cdef int fld = FIELD_NONE
    cdef int sgn = 0

    cdef double m1sq, m2sq, x, p, c, z, v
    cdef double k1p, k1c, k1z, k1v
    cdef double k2p, k2c, k2z, k2v
    cdef double k3p, k3c, k3z, k3v
    cdef double k4p, k4c, k4z, k4v
    cdef double k5p, k5c, k5z, k5v
    cdef double k6p, k6c, k6z, k6v
    cdef double k7p, k7c, k7z, k7v
    cdef double p2, c2, z2, v2, p3, c3, z3, v3, p4, c4, z4, v4
    cdef double p5, c5, z5, v5, p6, c6, z6, v6, pn, cn, zn, vn
    cdef double ep, ec, ez, ev, sp, sc, sz, sv, qp, qc, qz, qv
    cdef double err, fac, h, h_floor, x_new, xe, pe, ce, ze, ve, t, tp, tc, val
    cdef bint last, esc_p, esc_c

    try:
        _push(&xs, x0)
        _push(&ps, phi0)
        _push(&cs, chi0)
        _push(&zs, z0)
        _push(&vs, v0)

        if phi0 > radius or phi0 < -radius:
            term = TERM_ESCAPED
            fld = FIELD_PHI
            sgn = 1 if phi0 > 0.0 else -1
        elif chi0 > radius or chi0 < -radius:
            term = TERM_ESCAPED
            fld = FIELD_CHI
            sgn = 1 if chi0 > 0.0 else -1
        elif x0 >= x_max:
            term = TERM_X_MAX
        else:
            m1sq = mu1 * mu1
            m2sq = mu2 * mu2

            x = x0
            p = phi0
            c = chi0
            z = z0
            v = v0

            k1p = z
            k1c = v
            k1z = eps1 * (p * (c * c + lam1 * (p * p - m1sq)))
            k1v = eps2 * (c * (p * p + lam2 * (c * c - m2sq)))

            h = h0
            if h > max_step:
                h = max_step
            if h > x_max - x:
                h = x_max - x
            h_floor = 1e-14 * x_max

            while True:
                last = x + h >= x_max
                if last:
                    h = x_max - x

                p2 = p + h * (A21 * k1p)
                c2 = c + h * (A21 * k1c)
                z2 = z + h * (A21 * k1z)
                v2 = v + h * (A21 * k1v)
                k2p = z2
                k2c = v2
                k2z = eps1 * (p2 * (c2 * c2 + lam1 * (p2 * p2 - m1sq)))
                k2v = eps2 * (c2 * (p2 * p2 + lam2 * (c2 * c2 - m2sq)))

                p3 = p + h * (A31 * k1p + A32 * k2p)
                c3 = c + h * (A31 * k1c + A32 * k2c)
                z3 = z + h * (A31 * k1z + A32 * k2z)
                v3 = v + h * (A31 * k1v + A32 * k2v)
                k3p = z3
                k3c = v3
                k3z = eps1 * (p3 * (c3 * c3 + lam1 * (p3 * p3 - m1sq)))
                k3v = eps2 * (c3 * (p3 * p3 + lam2 * (c3 * c3 - m2sq)))

                p4 = p + h * (A41 * k1p + A42 * k2p + A43 * k3p)
                c4 = c + h * (A41 * k1c + A42 * k2c + A43 * k3c)
                z4 = z + h * (A41 * k1z + A42 * k2z + A43 * k3z)
                v4 = v + h * (A41 * k1v + A42 * k2v + A43 * k3v)
                k4p = z4
                k4c = v4
                k4z = eps1 * (p4 * (c4 * c4 + lam1 * (p4 * p4 - m1sq)))
                k4v = eps2 * (c4 * (p4 * p4 + lam2 * (c4 * c4 - m2sq)))

                p5 = p + h * (A51 * k1p + A52 * k2p + A53 * k3p + A54 * k4p)
                c5 = c + h * (A51 * k1c + A52 * k2c + A53 * k3c + A54 * k4c)
                z5 = z + h * (A51 * k1z + A52 * k2z + A53 * k3z + A54 * k4z)
                v5 = v + h * (A51 * k1v + A52 * k2v + A53 * k3v + A54 * k4v)
                k5p = z5
                k5c = v5
                k5z = eps1 * (p5 * (c5 * c5 + lam1 * (p5 * p5 - m1sq)))
                k5v = eps2 * (c5 * (p5 * p5 + lam2 * (c5 * c5 - m2sq)))

                p6 = p + h * (A61 * k1p + A62 * k2p + A63 * k3p + A64 * k4p + A65 * k5p)
                c6 = c + h * (A61 * k1c + A62 * k2c + A63 * k3c + A64 * k4c + A65 * k5c)
                z6 = z + h * (A61 * k1z + A62 * k2z + A63 * k3z + A64 * k4z + A65 * k5z)
                v6 = v + h * (A61 * k1v + A62 * k2v + A63 * k3v + A64 * k4v + A65 * k5v)
                k6p = z6
                k6c = v6
                k6z = eps1 * (p6 * (c6 * c6 + lam1 * (p6 * p6 - m1sq)))
                k6v = eps2 * (c6 * (p6 * p6 + lam2 * (c6 * c6 - m2sq)))

                pn = p + h * (B1 * k1p + B3 * k3p + B4 * k4p + B5 * k5p + B6 * k6p)
                cn = c + h * (B1 * k1c + B3 * k3c + B4 * k4c + B5 * k5c + B6 * k6c)
                zn = z + h * (B1 * k1z + B3 * k3z + B4 * k4z + B5 * k5z + B6 * k6z)
                vn = v + h * (B1 * k1v + B3 * k3v + B4 * k4v + B5 * k5v + B6 * k6v)
                k7p = zn
                k7c = vn
                k7z = eps1 * (pn * (cn * cn + lam1 * (pn * pn - m1sq)))
                k7v = eps2 * (cn * (pn * pn + lam2 * (cn * cn - m2sq)))

                ep = h * (E1 * k1p + E3 * k3p + E4 * k4p + E5 * k5p + E6 * k6p + E7 * k7p)
                ec = h * (E1 * k1c + E3 * k3c + E4 * k4c + E5 * k5c + E6 * k6c + E7 * k7c)
                ez = h * (E1 * k1z + E3 * k3z + E4 * k4z + E5 * k5z + E6 * k6z + E7 * k7z)
                ev = h * (E1 * k1v + E3 * k3v + E4 * k4v + E5 * k5v + E6 * k6v + E7 * k7v)

                sp = abs_tol + rel_tol * (fabs(p) if fabs(p) > fabs(pn) else fabs(pn))
                sc = abs_tol + rel_tol * (fabs(c) if fabs(c) > fabs(cn) else fabs(cn))
                sz = abs_tol + rel_tol * (fabs(z) if fabs(z) > fabs(zn) else fabs(zn))
                sv = abs_tol + rel_tol * (fabs(v) if fabs(v) > fabs(vn) else fabs(vn))
                qp = ep / sp
                qc = ec / sc
                qz = ez / sz
                qv = ev / sv
                err = sqrt(0.25 * (qp * qp + qc * qc + qz * qz + qv * qv))

                if not (err <= 1.0):
                    # rejected step (or non-finite stage values); shrink and retry
                    fac = SAFETY * pow(err, -0.2)
                    if not (fac >= MIN_FACTOR):
                        fac = MIN_FACTOR
                    h = h * fac
                    if h < h_floor:
                        term = TERM_UNDERFLOW
                        break
                    continue

                x_new = x_max if last else x + h

                esc_p = pn > radius or pn < -radius
                esc_c = cn > radius or cn < -radius
                if esc_p or esc_c:
                    tp = _crossing(p, pn, k1p, k7p, h, radius) if esc_p else 2.0
                    tc = _crossing(c, cn, k1c, k7c, h, radius) if esc_c else 2.0
                    if tp <= tc:
                        t = tp
                        fld = FIELD_PHI
                    else:
                        t = tc
                        fld = FIELD_CHI
                    xe = x + t * h
                    pe = _hermite(p, pn, k1p, k7p, h, t)
                    ce = _hermite(c, cn, k1c, k7c, h, t)
                    ze = _hermite(z, zn, k1z, k7z, h, t)
                    ve = _hermite(v, vn, k1v, k7v, h, t)
                    val = pe if fld == FIELD_PHI else ce
                    sgn = 1 if val > 0.0 else -1
                    _push(&xs, xe)
                    _push(&ps, pe)
                    _push(&cs, ce)
                    _push(&zs, ze)
                    _push(&vs, ve)
                    term = TERM_ESCAPED
                    break

                _push(&xs, x_new)
                _push(&ps, pn)
                _push(&cs, cn)
                _push(&zs, zn)
                _push(&vs, vn)

                x = x_new
                p = pn
                c = cn
                z = zn
                v = vn
                k1p = k7p
                k1c = k7c
                k1z = k7z
                k1v = k7v

                if last:
                    term = TERM_X_MAX
                    break
                if xs.n >= max_samples:
                    term = TERM_SAMPLE_CAP
                    break

                if err == 0.0:
                    fac = MAX_FACTOR
                else:
                    fac = SAFETY * pow(err, -0.2)
                    if not (fac >= MIN_FACTOR):
                        fac = MIN_FACTOR
                    elif fac > MAX_FACTOR:
                        fac = MAX_FACTOR
                h = h * fac
                if h > max_step:
                    h = max_step

        out = (
            _to_array(&xs),
            _to_array(&ps),
            _to_array(&cs),
            _to_array(&zs),
            _to_array(&vs),
            term,
            fld,
            sgn,
        )
    finally:
        for i in range(5):
            free(bufs[i].data)
    return out
