"""Closed-form solution of q'' = alpha q - 2 q^3 and its first two moments.

The orbit type follows from the energy E = q'^2/2 - alpha q^2/2 + q^4/2:

* E > 0, or alpha <= 0: q = A cn(W t + u0 | m), oscillating through zero;
* E < 0 (alpha > 0): q = s A dn(W t + u0 | m), trapped in one well;
* E = 0 (alpha > 0): q = s sqrt(alpha) sech(sqrt(alpha) t + u0);
* tiny amplitude (alpha < 0): q = q0 cos(W t) + v0 / W sin(W t).

Close to the separatrix (m near 1) cn and dn are evaluated as sech lattices.

``int_q`` and ``int_q2`` are the integrals of q and q^2 from 0 to t.
"""

import math
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq
from scipy.special import ellipeinc, ellipj, ellipk, ellipkinc, ellipkm1, elliprd

# squared amplitudes below this make the cubic term invisible
_LINEAR = 1e-250
# below this complementary parameter cn and dn are summed as sech lattices
_LATTICE_M1 = 1e-3


def _gaps(alpha, a2, q0, v0):
    """``(A^2 - q0^2, q0^2 + A^2 - alpha)``; their product is exactly v0^2.

    The larger factor is formed directly and the smaller recovered from the
    product, which keeps both accurate next to a turning point.
    """
    d1 = a2 - q0 * q0
    d2 = q0 * q0 + a2 - alpha
    if d1 >= d2:
        d1 = max(d1, 0.0)
        d2 = v0 * v0 / d1 if d1 > 0 else 0.0
    else:
        d2 = max(d2, 0.0)
        d1 = v0 * v0 / d2 if d2 > 0 else 0.0
    return d1, d2


def _jacobi(u, m):
    """sn, cn, dn, am by the arithmetic-geometric mean.

    scipy's ``ellipj`` switches to a first-order expansion in 1 - m once m
    passes 1 - 1e-9, whose error grows like exp(2|u|); near-separatrix orbits
    need large u there. dn^2 = (1 - m) + m cn^2 avoids the cancellation in
    1 - m sn^2 when m sn^2 is close to 1.
    """
    u = np.asarray(u, dtype=float)
    if m >= 1.0:
        sn, cn, dn, ph = ellipj(u, 1.0)
        return sn, cn, dn, ph
    a, b, c = 1.0, math.sqrt(1.0 - m), math.sqrt(m)
    ratios = []
    while abs(c) > 1e-17 * a and len(ratios) < 40:
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        ratios.append(c / a)
    ph = (2.0 ** len(ratios)) * a * u
    for r in reversed(ratios):
        ph = 0.5 * (ph + np.arcsin(r * np.sin(ph)))
    sn, cn = np.sin(ph), np.cos(ph)
    return sn, cn, np.sqrt((1.0 - m) + m * cn * cn), ph


def _incomplete_d(ph, m):
    """D(ph|m) = (F - E) / m, the integral of sn^2 in u, without cancellation."""
    ph = np.asarray(ph, dtype=float)
    k = np.rint(ph / math.pi)
    r = ph - k * math.pi
    s = np.sin(r)
    part = s ** 3 / 3 * elliprd(np.cos(r) ** 2, 1 - m * s * s, 1.0)
    return 2 * k * float(elliprd(0.0, 1.0 - m, 1.0)) / 3 + part


def _sech(v):
    e = np.exp(-np.abs(v))
    return 2 * e / (1 + e * e)


def _one_minus_tanh(v):
    e = np.exp(-2 * v)
    return 2 * e / (1 + e)


class _SechLattice:
    """cn or dn for m close to 1 as a sum of sech pulses spaced 2K apart.

    cn(u|m) = pi / (2 sqrt(m) K') sum_n (-1)^n sech(beta (u - 2nK)) and
    dn(u|m) = pi / (2 K') sum_n sech(beta (u - 2nK)), beta = pi / (2 K').
    Every term is relatively accurate and the tail falls off like the
    complementary nome, so a few pulses either side are enough. Squares use
    dn^2 = c0 + beta^2 sum_n sech^2(beta (u - 2nK)), whose right side minus
    the left has no poles and is therefore constant.
    """

    def __init__(self, m1, alternating):
        self.m1 = m1
        self.m = 1.0 - m1
        self.k = float(ellipkm1(m1))
        kp = float(ellipk(m1))
        self.beta = beta = math.pi / (2 * kp)
        self.alternating = alternating
        self.scale = beta / math.sqrt(self.m) if alternating else beta
        nome = math.exp(-math.pi * self.k / kp)
        self.reach = int(math.ceil(-37.0 / math.log(nome) / 2)) + 1 if nome > 0 else 1
        far = sum(float(_sech(beta * (2 * n - 1) * self.k)) ** 2
                  for n in range(1, self.reach + 2))
        self.c0 = m1 - 2 * beta * beta * far

    def _terms(self, u):
        u = np.asarray(u, dtype=float)
        centre = np.rint(u / (2 * self.k))
        for j in range(-self.reach, self.reach + 1):
            n = centre + j
            sgn = 1.0 - 2.0 * np.mod(n, 2) if self.alternating else 1.0
            yield sgn, self.beta * (u - 2 * n * self.k)

    def value(self, u):
        return self.scale * sum(sgn * _sech(v) for sgn, v in self._terms(u))

    def slope(self, u):
        return -self.scale * self.beta * sum(sgn * np.tanh(v) * _sech(v)
                                             for sgn, v in self._terms(u))

    def _crossings(self, u, u0):
        a = math.floor(u0 / (2 * self.k))
        b = np.floor(np.asarray(u, dtype=float) / (2 * self.k))
        return a, b

    def integral(self, u, u0):
        """Integral of the lattice function from u0 to u."""
        def tails(x):
            # gd(v) - pi/2 sign(v): decays on both sides, jumps by pi at v = 0
            return sum(sgn * np.where(v >= 0, -2.0, 2.0) * np.arctan(np.exp(-np.abs(v)))
                       for sgn, v in self._terms(x))
        a, b = self._crossings(u, u0)
        crossed = ((-1.0) ** (a + 1) + (-1.0) ** b) / 2 if self.alternating else b - a
        return self.scale / self.beta * (tails(u) - tails(u0) + math.pi * crossed)

    def square_integral(self, u, u0):
        """Integral of the squared lattice function from u0 to u."""
        def tails(x):
            # tanh(v) - sign(v)
            return sum(np.where(v >= 0, -1.0, 1.0) * _one_minus_tanh(np.abs(v))
                       for _, v in self._terms(x))
        a, b = self._crossings(u, u0)
        du = np.asarray(u, dtype=float) - u0
        dn2 = self.c0 * du + self.beta * (tails(u) - tails(u0) + 2 * (b - a))
        return (dn2 - self.m1 * du) / self.m if self.alternating else dn2


def _gd(u):
    return 2.0 * np.arctan(np.tanh(0.5 * u))


class Duffing:
    def __init__(self, alpha, q0, v0):
        self.alpha = alpha = float(alpha)
        self.q0 = q0 = float(q0)
        self.v0 = v0 = float(v0)
        # exact, since the orbit near the separatrix hangs on its last digits
        fa, fq, fv = Fraction(alpha), Fraction(q0), Fraction(v0)
        energy = float((fv * fv - fa * fq * fq + fq ** 4) / 2)
        self.energy = energy
        self.lattice = None
        if q0 == 0.0 and v0 == 0.0:
            self.kind = "rest"
            return
        if alpha > 0 and energy == 0.0:
            self.kind = "sech"
            self.sign = math.copysign(1.0, q0)
            ra = math.sqrt(alpha)
            self.omega = ra
            u = math.acosh(max(1.0, ra / abs(q0)))
            self.u0 = -u if (v0 != 0.0 and math.copysign(1.0, v0) == self.sign) else u
            return
        if alpha < 0 and q0 * q0 + v0 * v0 / -alpha < _LINEAR:
            # the cubic term is below rounding: plain harmonic motion
            self.kind = "harmonic"
            self.omega = math.sqrt(-alpha)
            return
        root = math.sqrt(max(0.0, alpha * alpha + 8.0 * energy))
        # a2 is the squared amplitude and gap = a2 - alpha, both without cancellation
        if alpha > 0:
            a2 = 0.5 * (alpha + root)
            gap = 4.0 * energy / (root + alpha)
        else:
            a2 = 4.0 * energy / (root - alpha)
            gap = 0.5 * (root - alpha)
        self.amp = math.sqrt(a2)
        if energy > 0 or alpha <= 0:
            self.kind = "cn"
            w2 = a2 + gap
            self.omega = math.sqrt(w2)
            self.m, m1 = a2 / w2, gap / w2
            # q falls from amp to -amp over u in [0, 2K]; q' < 0 there
            flip = v0 > 0
            target = q0 / self.amp
        else:
            self.kind = "dn"
            self.sign = math.copysign(1.0, q0)
            self.omega = self.amp
            m1 = min(1.0, -gap / a2)
            self.m = 1.0 - m1
            # |q| falls from amp to its minimum over u in [0, K]
            flip = v0 != 0.0 and math.copysign(1.0, v0) == self.sign
            target = abs(q0) / self.amp
        if m1 < _LATTICE_M1:
            self.lattice = lat = _SechLattice(m1, self.kind == "cn")
            top = 2 * lat.k if self.kind == "cn" else lat.k
            lo, hi = float(lat.value(top)), float(lat.value(0.0))
            target = min(max(target, lo), hi)
            u = 0.0 if target >= hi else top if target <= lo else brentq(
                lambda x: float(lat.value(x)) - target, 0.0, top, xtol=1e-14 * top)
            self.u0 = -u if flip else u
            self._polish_phase()
            return
        if self.kind == "cn":
            d1, _ = _gaps(alpha, a2, q0, v0)
            phi0 = math.atan2(math.sqrt(d1), q0)
        else:
            d1, d2 = _gaps(alpha, a2, q0, v0)
            phi0 = 0.0 if self.m < 1e-15 else math.atan2(math.sqrt(d1), math.sqrt(d2))
        u = float(ellipkinc(phi0, self.m))
        self.u0, self.phi0 = (-u, -phi0) if flip else (u, phi0)

    def _polish_phase(self):
        """Gauss-Newton on u0 so that (q, q') at t = 0 match the initial state.

        Inverting q alone loses accuracy next to a turning point; using q'
        as well keeps the phase well determined everywhere on the orbit.
        """
        w = self.omega
        for _ in range(4):
            q, dq = float(self.q(0.0)), float(self.dq(0.0))
            r0, r1 = q - self.q0, (dq - self.v0) / w
            j0, j1 = dq / w, (self.alpha * q - 2 * q ** 3) / (w * w)
            norm = j0 * j0 + j1 * j1
            if norm == 0.0:
                return
            self.u0 -= (r0 * j0 + r1 * j1) / norm

    def _arg(self, t):
        return self.omega * np.asarray(t, dtype=float) + self.u0

    def _harmonic(self, t):
        t = np.asarray(t, dtype=float)
        w = self.omega
        return t, w, self.q0, self.v0 / w, np.cos(w * t), np.sin(w * t)

    def q(self, t):
        if self.kind == "rest":
            return np.zeros_like(np.asarray(t, dtype=float))
        if self.kind == "harmonic":
            _, _, a, b, c, s = self._harmonic(t)
            return a * c + b * s
        u = self._arg(t)
        if self.kind == "sech":
            return self.sign * self.omega * _sech(u)
        if self.lattice is not None:
            return (1.0 if self.kind == "cn" else self.sign) * self.amp * self.lattice.value(u)
        sn, cn, dn, _ = _jacobi(u, self.m)
        if self.kind == "cn":
            return self.amp * cn
        return self.sign * self.amp * dn

    def dq(self, t):
        if self.kind == "rest":
            return np.zeros_like(np.asarray(t, dtype=float))
        if self.kind == "harmonic":
            _, w, a, b, c, s = self._harmonic(t)
            return w * (b * c - a * s)
        u = self._arg(t)
        if self.kind == "sech":
            return -self.sign * self.alpha * np.tanh(u) * _sech(u)
        if self.lattice is not None:
            sign = 1.0 if self.kind == "cn" else self.sign
            return sign * self.amp * self.omega * self.lattice.slope(u)
        sn, cn, dn, _ = _jacobi(u, self.m)
        if self.kind == "cn":
            return -self.amp * self.omega * sn * dn
        return -self.sign * self.amp * self.omega * self.m * sn * cn

    def int_q(self, t):
        if self.kind == "rest":
            return np.zeros_like(np.asarray(t, dtype=float))
        if self.kind == "harmonic":
            t, w, a, b, c, s = self._harmonic(t)
            return (a * s + b * 2 * np.sin(w * t / 2) ** 2) / w
        u = self._arg(t)
        if self.kind == "sech":
            return self.sign * (_gd(u) - _gd(self.u0))
        if self.lattice is not None:
            # amp / omega is sqrt(m) for cn orbits and 1 for dn orbits
            sign = 1.0 if self.kind == "cn" else self.sign
            return sign * self.amp / self.omega * self.lattice.integral(u, self.u0)
        sn, _, dn, ph = _jacobi(u, self.m)
        if self.kind == "cn":
            # arcsin(sqrt(m) sn), written with dn so it stays accurate as m -> 1
            rm, s0 = math.sqrt(self.m), math.sin(self.phi0)
            return np.arctan2(rm * sn, dn) - math.atan2(rm * s0, math.sqrt(1 - self.m * s0 * s0))
        return self.sign * (ph - self.phi0)

    def int_q2(self, t):
        if self.kind == "rest":
            return np.zeros_like(np.asarray(t, dtype=float))
        if self.kind == "harmonic":
            t, w, a, b, c, s = self._harmonic(t)
            return ((a * a + b * b) * t / 2 + (a * a - b * b) * s * c / (2 * w)
                    + a * b * s * s / w)
        u = self._arg(t)
        if self.kind == "sech":
            return self.omega * (np.tanh(u) - math.tanh(self.u0))
        if self.lattice is not None:
            return self.amp ** 2 / self.omega * self.lattice.square_integral(u, self.u0)
        _, _, _, ph = _jacobi(u, self.m)
        if self.kind == "cn":
            sn2 = _incomplete_d(ph, self.m) - _incomplete_d(self.phi0, self.m)
            return self.amp ** 2 / self.omega * (u - self.u0 - sn2)
        return self.amp * (ellipeinc(ph, self.m) - ellipeinc(self.phi0, self.m))
