# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dormand-Prince 5(4) stepper for the two-component systems.

Twin of ``_kernel_py.integrate_raw`` specialized to the right-hand-side
family described by ``_rhs.RhsSpec``: same tableau, same controller, same
dense-output coefficients, same operation order.  Only the closed-form
nonlinearities are representable here; anything else stays on the pure path.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, fabs, isfinite, pow, sin, sqrt

from .errors import NonFiniteState, StepSizeUnderflow

cnp.import_array()

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0

cdef double C2 = 1.0 / 5.0
cdef double C3 = 3.0 / 10.0
cdef double C4 = 4.0 / 5.0
cdef double C5 = 8.0 / 9.0

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

cdef double[7][4] P
P[0][0] = 1.0
P[0][1] = -8048581381.0 / 2820520608.0
P[0][2] = 8663915743.0 / 2820520608.0
P[0][3] = -12715105075.0 / 11282082432.0
P[1][0] = 0.0
P[1][1] = 0.0
P[1][2] = 0.0
P[1][3] = 0.0
P[2][0] = 0.0
P[2][1] = 131558114200.0 / 32700410799.0
P[2][2] = -68118460800.0 / 10900136933.0
P[2][3] = 87487479700.0 / 32700410799.0
P[3][0] = 0.0
P[3][1] = -1754552775.0 / 470086768.0
P[3][2] = 14199869525.0 / 1410260304.0
P[3][3] = -10690763975.0 / 1880347072.0
P[4][0] = 0.0
P[4][1] = 127303824393.0 / 49829197408.0
P[4][2] = -318862633887.0 / 49829197408.0
P[4][3] = 701980252875.0 / 199316789632.0
P[5][0] = 0.0
P[5][1] = -282668133.0 / 205662961.0
P[5][2] = 2019193451.0 / 616988883.0
P[5][3] = -1453857185.0 / 822651844.0
P[6][0] = 0.0
P[6][1] = 40617522.0 / 29380423.0
P[6][2] = -110615467.0 / 29380423.0
P[6][3] = 69997945.0 / 29380423.0


cdef struct Rhs:
    int kind            # 0 profile, 1 linearized, 2 cap
    double dim_n
    double c0
    double cr2
    double cap_lambda
    int nl_kind         # 0 torsion, 1 lane-emden, 2 linear
    double nl_p
    double nl_a
    double nl_b
    bint use_pot
    double* pot_u
    double* pot_du
    double spacing
    int pot_n


cdef inline double _nl_f(Rhs* r, double s) noexcept:
    if r.nl_kind == 0:
        return 1.0
    if r.nl_kind == 1:
        if s >= 0.0:
            return pow(s, r.nl_p)
        return -pow(-s, r.nl_p)
    return r.nl_a * s + r.nl_b


cdef inline double _nl_fp(Rhs* r, double s) noexcept:
    if r.nl_kind == 0:
        return 0.0
    if r.nl_kind == 1:
        return r.nl_p * pow(fabs(s), r.nl_p - 1.0)
    return r.nl_a


cdef inline double _hermite(Rhs* r, double x) noexcept:
    cdef double s = x / r.spacing
    cdef int i = <int>s
    cdef double w, w2, w3
    if i < 0:
        i = 0
    elif i > r.pot_n - 2:
        i = r.pot_n - 2
    w = s - i
    w2 = w * w
    w3 = w2 * w
    return (
        r.pot_u[i] * (2.0 * w3 - 3.0 * w2 + 1.0)
        + r.pot_du[i] * r.spacing * (w3 - 2.0 * w2 + w)
        + r.pot_u[i + 1] * (3.0 * w2 - 2.0 * w3)
        + r.pot_du[i + 1] * r.spacing * (w3 - w2)
    )


cdef inline void _eval(Rhs* r, double t, double ya, double yb,
                       double* oa, double* ob) noexcept:
    cdef double q, acc, sn, co, nm2
    if r.kind == 0:
        acc = -_nl_f(r, ya)
        if r.dim_n != 1.0:
            acc -= (r.dim_n - 1.0) * yb / t
        oa[0] = yb
        ob[0] = acc
    elif r.kind == 1:
        q = r.c0
        if r.use_pot:
            q += _nl_fp(r, _hermite(r, t))
        if r.cr2 != 0.0:
            q += r.cr2 / (t * t)
        acc = -q * ya
        if r.dim_n != 1.0:
            acc -= (r.dim_n - 1.0) * yb / t
        oa[0] = yb
        ob[0] = acc
    else:
        sn = sin(t)
        co = cos(t)
        nm2 = r.dim_n - 2.0
        oa[0] = yb
        ob[0] = -nm2 * (co / sn) * yb - (r.cap_lambda - nm2 / (sn * sn)) * ya


cdef inline double _rms2(double a, double b, double sa, double sb) noexcept:
    cdef double qa = a / sa
    cdef double qb = b / sb
    return sqrt((qa * qa + qb * qb) / 2.0)


cdef double _initial_step(Rhs* r, double t0, double ya, double yb,
                          double fa, double fb, double span,
                          double rtol, double atol) noexcept:
    cdef double sa = atol + rtol * fabs(ya)
    cdef double sb = atol + rtol * fabs(yb)
    cdef double d0 = _rms2(ya, yb, sa, sb)
    cdef double d1 = _rms2(fa, fb, sa, sb)
    cdef double h0, g1a, g1b, d2, h1
    cdef double f1a = 0.0, f1b = 0.0
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    if h0 > span:
        h0 = span
    g1a = ya + h0 * fa
    g1b = yb + h0 * fb
    _eval(r, t0 + h0, g1a, g1b, &f1a, &f1b)
    d2 = _rms2(f1a - fa, f1b - fb, sa, sb) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = 1e-6 if 1e-6 > h0 * 1e-3 else h0 * 1e-3
    else:
        h1 = pow(0.01 / (d1 if d1 > d2 else d2), 0.2)
    if 100.0 * h0 < h1:
        h1 = 100.0 * h0
    if h1 > span:
        h1 = span
    return h1


def integrate_c(int kind, double dim_n, double c0, double cr2, double cap_lambda,
                int nl_kind, double nl_p, double nl_a, double nl_b,
                double[::1] pot_u, double[::1] pot_du, double spacing, bint use_pot,
                double t0, double y0a, double y0b, double t1,
                double rtol, double atol, double max_step, int stop_comp):
    """Compiled twin of ``_kernel_py.integrate_raw`` for RhsSpec systems."""
    cdef Rhs r
    r.kind = kind
    r.dim_n = dim_n
    r.c0 = c0
    r.cr2 = cr2
    r.cap_lambda = cap_lambda
    r.nl_kind = nl_kind
    r.nl_p = nl_p
    r.nl_a = nl_a
    r.nl_b = nl_b
    r.use_pot = use_pot
    r.pot_u = &pot_u[0]
    r.pot_du = &pot_du[0]
    r.spacing = spacing
    r.pot_n = pot_u.shape[0]

    cdef double t = t0
    cdef double ya = y0a, yb = y0b
    cdef double k1a = 0.0, k1b = 0.0
    _eval(&r, t, ya, yb, &k1a, &k1b)
    if not (isfinite(k1a) and isfinite(k1b)):
        raise NonFiniteState(t)
    cdef double span = t1 - t0
    cdef double h = _initial_step(&r, t, ya, yb, k1a, k1b, span, rtol, atol)
    if h > max_step:
        h = max_step

    cdef int cap = 512
    ts_arr = np.empty(cap + 1, dtype=np.float64)
    ys_arr = np.empty((cap + 1, 2), dtype=np.float64)
    fs_arr = np.empty((cap, 2, 4), dtype=np.float64)
    cdef double[::1] tv = ts_arr
    cdef double[:, ::1] yv = ys_arr
    cdef double[:, :, ::1] fv = fs_arr
    cdef int m = 0
    tv[0] = t
    yv[0, 0] = ya
    yv[0, 1] = yb

    cdef int status = 0
    cdef double remaining, h_use, t_new
    cdef double y2a, y2b, y3a, y3b, y4a, y4b, y5a, y5b, y6a, y6b, yna, ynb
    cdef double k2a, k2b, k3a, k3b, k4a, k4b, k5a, k5b, k6a, k6b, k7a, k7b
    cdef double sa, sb, ea, eb, err, factor, aa, bb, lim
    cdef int j
    cdef bint crossed

    k2a = k2b = k3a = k3b = k4a = k4b = k5a = k5b = k6a = k6b = k7a = k7b = 0.0

    while t < t1:
        lim = fabs(t) if fabs(t) > fabs(t1) else fabs(t1)
        if h < 4.5e-15 * lim:
            raise StepSizeUnderflow(t)
        remaining = t1 - t
        if h >= remaining:
            h_use = remaining
            t_new = t1
        else:
            h_use = h
            t_new = t + h_use

        y2a = ya + h_use * (A21 * k1a)
        y2b = yb + h_use * (A21 * k1b)
        _eval(&r, t + C2 * h_use, y2a, y2b, &k2a, &k2b)
        y3a = ya + h_use * (A31 * k1a + A32 * k2a)
        y3b = yb + h_use * (A31 * k1b + A32 * k2b)
        _eval(&r, t + C3 * h_use, y3a, y3b, &k3a, &k3b)
        y4a = ya + h_use * (A41 * k1a + A42 * k2a + A43 * k3a)
        y4b = yb + h_use * (A41 * k1b + A42 * k2b + A43 * k3b)
        _eval(&r, t + C4 * h_use, y4a, y4b, &k4a, &k4b)
        y5a = ya + h_use * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a)
        y5b = yb + h_use * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b)
        _eval(&r, t + C5 * h_use, y5a, y5b, &k5a, &k5b)
        y6a = ya + h_use * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a)
        y6b = yb + h_use * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b)
        _eval(&r, t + h_use, y6a, y6b, &k6a, &k6b)
        yna = ya + h_use * (B1 * k1a + B3 * k3a + B4 * k4a + B5 * k5a + B6 * k6a)
        ynb = yb + h_use * (B1 * k1b + B3 * k3b + B4 * k4b + B5 * k5b + B6 * k6b)
        _eval(&r, t_new, yna, ynb, &k7a, &k7b)

        if not (isfinite(yna) and isfinite(ynb) and isfinite(k7a) and isfinite(k7b)):
            raise NonFiniteState(t_new)

        aa = fabs(ya) if fabs(ya) > fabs(yna) else fabs(yna)
        bb = fabs(yb) if fabs(yb) > fabs(ynb) else fabs(ynb)
        sa = atol + rtol * aa
        sb = atol + rtol * bb
        ea = h_use * (E1 * k1a + E3 * k3a + E4 * k4a + E5 * k5a + E6 * k6a + E7 * k7a)
        eb = h_use * (E1 * k1b + E3 * k3b + E4 * k4b + E5 * k5b + E6 * k6b + E7 * k7b)
        err = _rms2(ea, eb, sa, sb)

        if err <= 1.0:
            if m == cap:
                cap = cap * 2
                ts_new = np.empty(cap + 1, dtype=np.float64)
                ys_new = np.empty((cap + 1, 2), dtype=np.float64)
                fs_new = np.empty((cap, 2, 4), dtype=np.float64)
                ts_new[: m + 1] = ts_arr[: m + 1]
                ys_new[: m + 1] = ys_arr[: m + 1]
                fs_new[:m] = fs_arr[:m]
                ts_arr = ts_new
                ys_arr = ys_new
                fs_arr = fs_new
                tv = ts_arr
                yv = ys_arr
                fv = fs_arr
            for j in range(4):
                fv[m, 0, j] = h_use * (
                    k1a * P[0][j] + k3a * P[2][j] + k4a * P[3][j]
                    + k5a * P[4][j] + k6a * P[5][j] + k7a * P[6][j]
                )
                fv[m, 1, j] = h_use * (
                    k1b * P[0][j] + k3b * P[2][j] + k4b * P[3][j]
                    + k5b * P[4][j] + k6b * P[5][j] + k7b * P[6][j]
                )
            m += 1
            tv[m] = t_new
            yv[m, 0] = yna
            yv[m, 1] = ynb

            crossed = False
            if stop_comp == 0:
                crossed = (ya > 0.0 and yna <= 0.0) or (ya < 0.0 and yna >= 0.0)
            elif stop_comp == 1:
                crossed = (yb > 0.0 and ynb <= 0.0) or (yb < 0.0 and ynb >= 0.0)

            t = t_new
            ya = yna
            yb = ynb
            k1a = k7a
            k1b = k7b
            if crossed:
                status = 1
                break
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * pow(err, -0.2)
                if factor > MAX_FACTOR:
                    factor = MAX_FACTOR
            h = h_use * factor
            if h > max_step:
                h = max_step
        else:
            factor = SAFETY * pow(err, -0.2)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h = h_use * factor

    return ts_arr[: m + 1], ys_arr[: m + 1], fs_arr[:m], status
