# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integration kernels; same API and arithmetic as ``_pykernels``."""

from libc.math cimport sqrt, fabs, pow, isfinite

cdef enum:
    N = 6

cdef int OK = 0
cdef int UNDERFLOW = 1
cdef int NONFINITE = 2
cdef int MAXSTEPS = 3

cdef double C_A21 = 1.0 / 5
cdef double C_A31 = 3.0 / 40, C_A32 = 9.0 / 40
cdef double C_A41 = 44.0 / 45, C_A42 = -56.0 / 15, C_A43 = 32.0 / 9
cdef double C_A51 = 19372.0 / 6561, C_A52 = -25360.0 / 2187
cdef double C_A53 = 64448.0 / 6561, C_A54 = -212.0 / 729
cdef double C_A61 = 9017.0 / 3168, C_A62 = -355.0 / 33, C_A63 = 46732.0 / 5247
cdef double C_A64 = 49.0 / 176, C_A65 = -5103.0 / 18656
cdef double C_B1 = 35.0 / 384, C_B3 = 500.0 / 1113, C_B4 = 125.0 / 192
cdef double C_B5 = -2187.0 / 6784, C_B6 = 11.0 / 84
cdef double C_E1 = 71.0 / 57600, C_E3 = -71.0 / 16695, C_E4 = 71.0 / 1920
cdef double C_E5 = -17253.0 / 339200, C_E6 = 22.0 / 525, C_E7 = -1.0 / 40

cdef double SAFETY = 0.9
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 5.0
cdef double PI_ALPHA = 0.7 / 5
cdef double PI_BETA = 0.4 / 5


cdef inline void _rhs(double lam, int kind, double scale, double* s, double* out) nogil:
    cdef double x = s[0], y = s[1], vx = s[3], vy = s[4], vz = s[5]
    cdef double a1 = vy
    cdef double a2 = vx / lam
    cdef double w = vz + x * vy
    cdef double k1 = 0.0, k2 = 0.0, k3 = 0.0
    if kind == 1:
        k3 = scale
    elif kind == 2:
        k1 = scale
        k3 = scale * x
    elif kind == 3:
        k2 = scale / lam
        k3 = -scale * y
    elif kind == 4:
        k1 = -scale * x
        k2 = scale * lam * y
        k3 = -0.5 * scale * (lam * lam * y * y + x * x)
    cdef double f1 = k2 * w - k3 * a2
    cdef double f2 = k3 * a1 - k1 * w
    cdef double f3 = k1 * a2 - k2 * a1
    cdef double ay = f1 - vx * w
    cdef double ax = lam * (f2 + lam * vy * w)
    out[0] = vx
    out[1] = vy
    out[2] = vz
    out[3] = ax
    out[4] = ay
    out[5] = f3 - vx * vy - x * ay


cdef inline void _load(object s, double* out):
    cdef int i
    for i in range(N):
        out[i] = s[i]


cdef inline tuple _pack(double* s):
    return (s[0], s[1], s[2], s[3], s[4], s[5])


def rhs(double lam, int kind, double scale, s):
    cdef double st[N]
    cdef double out[N]
    _load(s, st)
    _rhs(lam, kind, scale, st, out)
    return _pack(out)


def rk4_segment(double lam, int kind, double scale, s, double t0, double t1, long n):
    cdef double y[N]
    cdef double tmp[N]
    cdef double k1[N]
    cdef double k2[N]
    cdef double k3[N]
    cdef double k4[N]
    cdef double h = (t1 - t0) / n
    cdef double hc
    cdef long step
    cdef int i
    _load(s, y)
    with nogil:
        for step in range(n):
            _rhs(lam, kind, scale, y, k1)
            hc = h * 0.5
            for i in range(N):
                tmp[i] = y[i] + hc * k1[i]
            _rhs(lam, kind, scale, tmp, k2)
            for i in range(N):
                tmp[i] = y[i] + hc * k2[i]
            _rhs(lam, kind, scale, tmp, k3)
            hc = h * 1.0
            for i in range(N):
                tmp[i] = y[i] + hc * k3[i]
            _rhs(lam, kind, scale, tmp, k4)
            for i in range(N):
                y[i] = y[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
    return _pack(y)


def dopri_segment(double lam, int kind, double scale, s, double t, double t_end,
                  double h, double rtol, double atol, long max_steps, double hmin,
                  double err_prev, long n_acc, long n_rej):
    cdef double y[N]
    cdef double ynew[N]
    cdef double tmp[N]
    cdef double k1[N]
    cdef double k2[N]
    cdef double k3[N]
    cdef double k4[N]
    cdef double k5[N]
    cdef double k6[N]
    cdef double k7[N]
    cdef double d = 1.0 if t_end >= t else -1.0
    cdef double remaining, hh, acc, e, sc, r, err, fac, hnew
    cdef bint clipped, finite, rejected_last = False
    cdef int i, status = OK
    _load(s, y)
    with nogil:
        _rhs(lam, kind, scale, y, k1)
        while d * (t_end - t) > 0.0:
            if n_acc + n_rej >= max_steps:
                status = MAXSTEPS
                break
            remaining = fabs(t_end - t)
            clipped = h >= remaining
            hh = d * (remaining if clipped else h)
            if not clipped and h < hmin:
                status = UNDERFLOW
                break
            for i in range(N):
                tmp[i] = y[i] + (hh * C_A21) * k1[i]
            _rhs(lam, kind, scale, tmp, k2)
            for i in range(N):
                tmp[i] = y[i] + (hh * C_A31) * k1[i]
                tmp[i] += (hh * C_A32) * k2[i]
            _rhs(lam, kind, scale, tmp, k3)
            for i in range(N):
                tmp[i] = y[i] + (hh * C_A41) * k1[i]
                tmp[i] += (hh * C_A42) * k2[i]
                tmp[i] += (hh * C_A43) * k3[i]
            _rhs(lam, kind, scale, tmp, k4)
            for i in range(N):
                tmp[i] = y[i] + (hh * C_A51) * k1[i]
                tmp[i] += (hh * C_A52) * k2[i]
                tmp[i] += (hh * C_A53) * k3[i]
                tmp[i] += (hh * C_A54) * k4[i]
            _rhs(lam, kind, scale, tmp, k5)
            for i in range(N):
                tmp[i] = y[i] + (hh * C_A61) * k1[i]
                tmp[i] += (hh * C_A62) * k2[i]
                tmp[i] += (hh * C_A63) * k3[i]
                tmp[i] += (hh * C_A64) * k4[i]
                tmp[i] += (hh * C_A65) * k5[i]
            _rhs(lam, kind, scale, tmp, k6)
            for i in range(N):
                ynew[i] = y[i] + (hh * C_B1) * k1[i]
                ynew[i] += (hh * C_B3) * k3[i]
                ynew[i] += (hh * C_B4) * k4[i]
                ynew[i] += (hh * C_B5) * k5[i]
                ynew[i] += (hh * C_B6) * k6[i]
            _rhs(lam, kind, scale, ynew, k7)
            acc = 0.0
            finite = True
            for i in range(N):
                e = hh * (C_E1 * k1[i] + C_E3 * k3[i] + C_E4 * k4[i] + C_E5 * k5[i]
                          + C_E6 * k6[i] + C_E7 * k7[i])
                sc = atol + rtol * max(fabs(y[i]), fabs(ynew[i]))
                r = e / sc
                acc += r * r
                if not isfinite(ynew[i]):
                    finite = False
            if not finite or not isfinite(acc):
                status = NONFINITE
                break
            err = sqrt(acc / 6.0)
            if err <= 1.0:
                if err == 0.0:
                    fac = FAC_MAX
                else:
                    fac = SAFETY * pow(err, -PI_ALPHA) * pow(err_prev, PI_BETA)
                    fac = min(FAC_MAX, max(FAC_MIN, fac))
                if rejected_last:
                    fac = min(fac, 1.0)
                hnew = fabs(hh) * fac
                if clipped:
                    t = t_end
                    h = max(h, hnew)
                else:
                    t = t + hh
                    h = hnew
                err_prev = max(err, 1e-4)
                for i in range(N):
                    y[i] = ynew[i]
                    k1[i] = k7[i]
                n_acc += 1
                rejected_last = False
            else:
                fac = max(FAC_MIN, SAFETY * pow(err, -0.2))
                h = fabs(hh) * fac
                n_rej += 1
                rejected_last = True
    return _pack(y), h, err_prev, n_acc, n_rej, status
