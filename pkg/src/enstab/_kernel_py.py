"""Pure-Python Dormand-Prince 5(4) stepper with dense output.

Reference implementation of the integration kernel.  The compiled twin in
``_kernel_c.pyx`` follows the same algorithm with the same coefficients and
the same operation order, so the two produce matching trajectories; a parity
test holds them together.

The error estimate is the usual embedded fourth-order difference and the
interpolant is the quartic collocation polynomial associated with the pair,
giving locally fifth-order dense output between accepted nodes.
"""

import math

from .errors import NonFiniteState, StepSizeUnderflow

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0

C2 = 1.0 / 5.0
C3 = 3.0 / 10.0
C4 = 4.0 / 5.0
C5 = 8.0 / 9.0

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

# Dense-output matrix: column j of P maps the seven stage slopes to the
# coefficient of x^(j+1) in the scaled interpolation polynomial.
P = (
    (1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0),
    (0.0, 0.0, 0.0, 0.0),
    (0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0),
    (0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0),
    (0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0),
    (0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0),
    (0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0),
)


def _scaled_rms(vec, scale):
    n = len(vec)
    acc = 0.0
    for i in range(n):
        q = vec[i] / scale[i]
        acc += q * q
    return math.sqrt(acc / n)


def _initial_step(f, t0, y0, f0, span, rtol, atol):
    n = len(y0)
    scale = [atol + rtol * abs(y0[i]) for i in range(n)]
    d0 = _scaled_rms(y0, scale)
    d1 = _scaled_rms(f0, scale)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = [y0[i] + h0 * f0[i] for i in range(n)]
    f1 = f(t0 + h0, y1)
    d2 = _scaled_rms([f1[i] - f0[i] for i in range(n)], scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, span)


def integrate_raw(f, t0, y0, t1, rtol, atol, max_step=math.inf, stop_comp=-1):
    """March from t0 to t1, returning (ts, states, dense, status).

    ``ts`` and ``states`` list the accepted nodes; ``dense[k]`` holds, per
    component, the four polynomial coefficients interpolating step k.  The
    status is 0 when t1 was reached and 1 when the requested component
    changed sign inside the final recorded step.
    """
    n = len(y0)
    t = float(t0)
    y = [float(v) for v in y0]
    k1 = [float(v) for v in f(t, y)]
    for v in k1:
        if not math.isfinite(v):
            raise NonFiniteState(t)
    span = float(t1) - t
    h = min(_initial_step(f, t, y, k1, span, rtol, atol), max_step)

    ts = [t]
    states = [tuple(y)]
    dense = []
    status = 0

    while t < t1:
        if h < 4.5e-15 * max(abs(t), abs(t1)):
            raise StepSizeUnderflow(t)
        remaining = t1 - t
        if h >= remaining:
            h_use = remaining
            t_new = t1
        else:
            h_use = h
            t_new = t + h_use

        y2 = [y[i] + h_use * (A21 * k1[i]) for i in range(n)]
        k2 = f(t + C2 * h_use, y2)
        y3 = [y[i] + h_use * (A31 * k1[i] + A32 * k2[i]) for i in range(n)]
        k3 = f(t + C3 * h_use, y3)
        y4 = [y[i] + h_use * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]) for i in range(n)]
        k4 = f(t + C4 * h_use, y4)
        y5 = [
            y[i] + h_use * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            for i in range(n)
        ]
        k5 = f(t + C5 * h_use, y5)
        y6 = [
            y[i]
            + h_use * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
            for i in range(n)
        ]
        k6 = f(t + h_use, y6)
        ynew = [
            y[i] + h_use * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i])
            for i in range(n)
        ]
        k7 = f(t_new, ynew)

        bad = False
        for i in range(n):
            if not (math.isfinite(ynew[i]) and math.isfinite(k7[i])):
                bad = True
        if bad:
            raise NonFiniteState(t_new)

        scale = [atol + rtol * max(abs(y[i]), abs(ynew[i])) for i in range(n)]
        errv = [
            h_use * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            for i in range(n)
        ]
        err = _scaled_rms(errv, scale)

        if err <= 1.0:
            coeffs = []
            for i in range(n):
                row = []
                for j in range(4):
                    row.append(
                        h_use
                        * (
                            k1[i] * P[0][j]
                            + k3[i] * P[2][j]
                            + k4[i] * P[3][j]
                            + k5[i] * P[4][j]
                            + k6[i] * P[5][j]
                            + k7[i] * P[6][j]
                        )
                    )
                coeffs.append(tuple(row))
            dense.append(tuple(coeffs))
            ts.append(t_new)
            states.append(tuple(ynew))

            crossed = False
            if stop_comp >= 0:
                a = y[stop_comp]
                b = ynew[stop_comp]
                crossed = (a > 0.0 and b <= 0.0) or (a < 0.0 and b >= 0.0)

            t = t_new
            y = ynew
            k1 = k7
            if crossed:
                status = 1
                break
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = min(MAX_FACTOR, SAFETY * err ** -0.2)
            h = min(max_step, h_use * factor)
        else:
            h = h_use * max(MIN_FACTOR, SAFETY * err ** -0.2)

    return ts, states, dense, status
