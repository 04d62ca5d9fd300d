"""Pure-Python integration kernels.

Mirror of ``_kernels.pyx`` operation for operation, so either backend gives
the same trajectories up to the last few ulps. States are plain 6-tuples
``(x, y, z, vx, vy, vz)``; ``kind`` is 0 for geodesics and 1..4 for K1..K4.
"""

import math

OK, UNDERFLOW, NONFINITE, MAXSTEPS = 0, 1, 2, 3

# Dormand-Prince 5(4)
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0
PI_ALPHA = 0.7 / 5
PI_BETA = 0.4 / 5


def rhs(lam, kind, scale, s):
    x, y, z, vx, vy, vz = s
    a1 = vy
    a2 = vx / lam
    w = vz + x * vy
    if kind == 1:
        k1, k2, k3 = 0.0, 0.0, scale
    elif kind == 2:
        k1, k2, k3 = scale, 0.0, scale * x
    elif kind == 3:
        k1, k2, k3 = 0.0, scale / lam, -scale * y
    elif kind == 4:
        k1 = -scale * x
        k2 = scale * lam * y
        k3 = -0.5 * scale * (lam * lam * y * y + x * x)
    else:
        k1, k2, k3 = 0.0, 0.0, 0.0
    f1 = k2 * w - k3 * a2
    f2 = k3 * a1 - k1 * w
    f3 = k1 * a2 - k2 * a1
    ay = f1 - vx * w
    ax = lam * (f2 + lam * vy * w)
    az = f3 - vx * vy - x * ay
    return (vx, vy, vz, ax, ay, az)


def _axpy(s, h, *pairs):
    out = list(s)
    for c, k in pairs:
        hc = h * c
        for i in range(6):
            out[i] += hc * k[i]
    return tuple(out)


def rk4_segment(lam, kind, scale, s, t0, t1, n):
    """``n`` equal classical RK4 steps from ``t0`` to ``t1``."""
    h = (t1 - t0) / n
    for _ in range(n):
        k1 = rhs(lam, kind, scale, s)
        k2 = rhs(lam, kind, scale, _axpy(s, h, (0.5, k1)))
        k3 = rhs(lam, kind, scale, _axpy(s, h, (0.5, k2)))
        k4 = rhs(lam, kind, scale, _axpy(s, h, (1.0, k3)))
        s = tuple(s[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
                  for i in range(6))
    return s


def dopri_segment(lam, kind, scale, s, t, t_end, h, rtol, atol, max_steps, hmin,
                  err_prev, n_acc, n_rej):
    """Adaptive Dormand-Prince integration from ``t`` to exactly ``t_end``.

    Returns ``(state, h_next, err_prev, n_acc, n_rej, status)``. ``h`` is a
    positive step proposal; the last step is clipped to land on ``t_end``.
    """
    d = 1.0 if t_end >= t else -1.0
    k1 = rhs(lam, kind, scale, s)
    rejected_last = False
    while d * (t_end - t) > 0.0:
        if n_acc + n_rej >= max_steps:
            return s, h, err_prev, n_acc, n_rej, MAXSTEPS
        remaining = abs(t_end - t)
        clipped = h >= remaining
        hh = d * (remaining if clipped else h)
        if not clipped and h < hmin:
            return s, h, err_prev, n_acc, n_rej, UNDERFLOW
        k2 = rhs(lam, kind, scale, _axpy(s, hh, (A21, k1)))
        k3 = rhs(lam, kind, scale, _axpy(s, hh, (A31, k1), (A32, k2)))
        k4 = rhs(lam, kind, scale, _axpy(s, hh, (A41, k1), (A42, k2), (A43, k3)))
        k5 = rhs(lam, kind, scale, _axpy(s, hh, (A51, k1), (A52, k2), (A53, k3), (A54, k4)))
        k6 = rhs(lam, kind, scale, _axpy(s, hh, (A61, k1), (A62, k2), (A63, k3), (A64, k4),
                                          (A65, k5)))
        ynew = _axpy(s, hh, (B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6))
        k7 = rhs(lam, kind, scale, ynew)
        acc = 0.0
        finite = True
        for i in range(6):
            e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                      + E7 * k7[i])
            sc = atol + rtol * max(abs(s[i]), abs(ynew[i]))
            r = e / sc
            acc += r * r
            if not math.isfinite(ynew[i]):
                finite = False
        if not finite or not math.isfinite(acc):
            return s, h, err_prev, n_acc, n_rej, NONFINITE
        err = math.sqrt(acc / 6.0)
        if err <= 1.0:
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = SAFETY * err ** (-PI_ALPHA) * err_prev ** PI_BETA
                fac = min(FAC_MAX, max(FAC_MIN, fac))
            if rejected_last:
                fac = min(fac, 1.0)
            hnew = abs(hh) * fac
            if clipped:
                t = t_end
                h = max(h, hnew)
            else:
                t = t + hh
                h = hnew
            err_prev = max(err, 1e-4)
            s = ynew
            k1 = k7
            n_acc += 1
            rejected_last = False
        else:
            fac = max(FAC_MIN, SAFETY * err ** (-0.2))
            h = abs(hh) * fac
            n_rej += 1
            rejected_last = True
    return s, h, err_prev, n_acc, n_rej, OK
