"""Adaptive Dormand-Prince 5(4) stepper, pure-Python kernel.

Fallback twin of the compiled module ``glshoot._stepper``; the two are kept
in sync statement for statement so that they produce identical trajectories.
Escape events (|phi| or |chi| crossing the escape radius) are located by
bisection on the cubic Hermite dense output to an x-resolution of 1e-9.
"""

import math

TERM_X_MAX = 0
TERM_ESCAPED = 1
TERM_UNDERFLOW = 2
TERM_SAMPLE_CAP = 3

FIELD_NONE = 0
FIELD_PHI = 1
FIELD_CHI = 2

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0

A21 = 1.0 / 5.0
A31 = 3.0 / 40.0
A32 = 9.0 / 40.0
A41 = 44.0 / 45.0
A42 = -56.0 / 15.0
A43 = 32.0 / 9.0
A51 = 19372.0 / 6561.0
A52 = -25360.0 / 2187.0
A53 = 64448.0 / 6561.0
A54 = -212.0 / 729.0
A61 = 9017.0 / 3168.0
A62 = -355.0 / 33.0
A63 = 46732.0 / 5247.0
A64 = 49.0 / 176.0
A65 = -5103.0 / 18656.0
B1 = 35.0 / 384.0
B3 = 500.0 / 1113.0
B4 = 125.0 / 192.0
B5 = -2187.0 / 6784.0
B6 = 11.0 / 84.0
E1 = 71.0 / 57600.0
E3 = -71.0 / 16695.0
E4 = 71.0 / 1920.0
E5 = -17253.0 / 339200.0
E6 = 22.0 / 525.0
E7 = -1.0 / 40.0


def _hermite(y0, y1, f0, f1, h, t):
    # y0 + t^2(3-2t)(y1-y0) + h t(1-t)((1-t) f0 - t f1); exact at t=0, 1 and
    # exactly constant for constant data.
    return y0 + t * t * (3.0 - 2.0 * t) * (y1 - y0) + h * t * (1.0 - t) * (
        (1.0 - t) * f0 - t * f1
    )


def _crossing(y0, y1, f0, f1, h, radius):
    # first t in (0, 1] with |H(t)| > radius, assuming |y1| > radius
    lo = 0.0
    hi = 1.0
    while (hi - lo) * h > 1e-9:
        mid = 0.5 * (lo + hi)
        val = _hermite(y0, y1, f0, f1, h, mid)
        if val > radius or val < -radius:
            hi = mid
        else:
            lo = mid
    return hi


def integrate_kernel(
    eps1,
    eps2,
    lam1,
    lam2,
    mu1,
    mu2,
    x0,
    phi0,
    chi0,
    z0,
    v0,
    rel_tol,
    abs_tol,
    h0,
    max_step,
    x_max,
    radius,
    max_samples,
):
    """Integrate the coupled system from (phi0, chi0, z0, v0) at x0.

    Returns (xs, phis, chis, zs, vs, termination, escape_field, escape_sign)
    with the arrays as plain lists of floats.
    """
    xs = [x0]
    ps = [phi0]
    cs = [chi0]
    zs = [z0]
    vs = [v0]

    if phi0 > radius or phi0 < -radius:
        return xs, ps, cs, zs, vs, TERM_ESCAPED, FIELD_PHI, (1 if phi0 > 0.0 else -1)
    if chi0 > radius or chi0 < -radius:
        return xs, ps, cs, zs, vs, TERM_ESCAPED, FIELD_CHI, (1 if chi0 > 0.0 else -1)
    if x0 >= x_max:
        return xs, ps, cs, zs, vs, TERM_X_MAX, FIELD_NONE, 0

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

    term = TERM_X_MAX
    fld = FIELD_NONE
    sgn = 0

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

        sp = abs_tol + rel_tol * (abs(p) if abs(p) > abs(pn) else abs(pn))
        sc = abs_tol + rel_tol * (abs(c) if abs(c) > abs(cn) else abs(cn))
        sz = abs_tol + rel_tol * (abs(z) if abs(z) > abs(zn) else abs(zn))
        sv = abs_tol + rel_tol * (abs(v) if abs(v) > abs(vn) else abs(vn))
        qp = ep / sp
        qc = ec / sc
        qz = ez / sz
        qv = ev / sv
        err = math.sqrt(0.25 * (qp * qp + qc * qc + qz * qz + qv * qv))

        if not (err <= 1.0):
            # rejected step (or non-finite stage values); shrink and retry
            fac = SAFETY * err ** -0.2
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
            xs.append(xe)
            ps.append(pe)
            cs.append(ce)
            zs.append(ze)
            vs.append(ve)
            term = TERM_ESCAPED
            break

        xs.append(x_new)
        ps.append(pn)
        cs.append(cn)
        zs.append(zn)
        vs.append(vn)

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
        if len(xs) >= max_samples:
            term = TERM_SAMPLE_CAP
            break

        if err == 0.0:
            fac = MAX_FACTOR
        else:
            fac = SAFETY * err ** -0.2
            if not (fac >= MIN_FACTOR):
                fac = MIN_FACTOR
            elif fac > MAX_FACTOR:
                fac = MAX_FACTOR
        h = h * fac
        if h > max_step:
            h = max_step

    return xs, ps, cs, zs, vs, term, fld, sgn
