"""Explicit curve families for the geodesic and Killing magnetic systems.

Each family comes in two variants:

``printed``
    The published formula, transcribed verbatim even where it fails to
    solve its system.
``corrected``
    A formula that solves the Levi-Civita system exactly. Where possible it
    starts from the same point and velocity at t = 0 as the printed curve, so
    the two can be compared directly.

The corrected K1 and geodesic families are helices: the velocity components
``(y', x'/lam)`` rotate at a constant rate while ``w = z' + x y'`` stays
fixed, and z follows from ``z' = w - x y'``. The corrected K2 and K3 families
reduce to Duffing oscillators, solved with Jacobi elliptic functions. The
corrected K4 family is the family of relative equilibria: circular motion in
the (x/lam, y) plane with a linear drift in z.
"""

import math
from dataclasses import asdict, dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from . import fd
from ._elliptic import Duffing
from .dynamics import State, SystemKind
from .geometry import ModelParams, PointH3


class DomainViolation(ValueError):
    """Constants or times outside the domain where a family is real and finite."""


class FamilyId(str, Enum):
    GEO_I = "GEO_I"
    GEO_II = "GEO_II"
    TK1_1 = "TK1_1"
    TK1_2 = "TK1_2"
    TK1_3 = "TK1_3"
    TK2 = "TK2"
    TK3 = "TK3"
    TK4 = "TK4"

    @property
    def tag(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().upper())
        except ValueError:
            raise DomainViolation(f"unknown family {name!r}") from None


VARIANTS = ("printed", "corrected")

_SYSTEM = {
    FamilyId.GEO_I: "geodesic", FamilyId.GEO_II: "geodesic",
    FamilyId.TK1_1: "k1", FamilyId.TK1_2: "k1", FamilyId.TK1_3: "k1",
    FamilyId.TK2: "k2", FamilyId.TK3: "k3", FamilyId.TK4: "k4",
}

_CONSTRAINTS = {
    FamilyId.GEO_I: "no constant c",
    FamilyId.GEO_II: "c != 0",
    FamilyId.TK1_1: "c = 1/λ",
    FamilyId.TK1_2: "c = -1/λ",
    FamilyId.TK1_3: "|λc| > 1",
    FamilyId.TK2: "c = 0",
    FamilyId.TK3: "c = 0; 2λc1 - 1 > 0",
    FamilyId.TK4: "c = 0; printed variant needs c1 - (1+λ²)t/(3λ) > 0",
}

_REL = 1e-12


@dataclass(frozen=True)
class ClosedFormSpec:
    """One curve: family, variant, metric parameter and family constants.

    ``c`` is the value of the first integral where the family has one. It is
    filled in automatically for families that fix it (TK1_1, TK1_2, TK2, TK3,
    TK4) and must be supplied for GEO_II and TK1_3. ``branch`` is the sign
    choice of TK4.
    """

    family: FamilyId
    variant: str = "corrected"
    lam: float = 1.0
    c: Optional[float] = None
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    c5: float = 0.0
    branch: int = 1

    def __post_init__(self):
        fam = FamilyId.parse(self.family)
        object.__setattr__(self, "family", fam)
        if self.variant not in VARIANTS:
            raise DomainViolation(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        lam = float(self.lam)
        if not (math.isfinite(lam) and lam > 0):
            raise DomainViolation(f"lambda must be positive and finite, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)
        for name in ("c1", "c2", "c3", "c4", "c5"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainViolation(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.branch not in (1, -1):
            raise DomainViolation(f"branch must be +1 or -1, got {self.branch!r}")
        object.__setattr__(self, "c", self._check_c(fam, lam))
        if fam is FamilyId.TK3 and not 2 * lam * self.c1 - 1 > 0:
            raise DomainViolation("TK3 needs 2*lambda*c1 - 1 > 0 for a real exponent")

    def _check_c(self, fam, lam):
        c = self.c
        if c is not None:
            c = float(c)
            if not math.isfinite(c):
                raise DomainViolation("c must be finite")
        fixed = {FamilyId.TK1_1: 1 / lam, FamilyId.TK1_2: -1 / lam,
                 FamilyId.TK2: 0.0, FamilyId.TK3: 0.0, FamilyId.TK4: 0.0}
        if fam in fixed:
            want = fixed[fam]
            if c is not None and abs(c - want) > _REL * max(1.0, abs(want)):
                raise DomainViolation(f"{fam.tag} fixes c = {want!r}, got {c!r}")
            return want
        if fam is FamilyId.GEO_I:
            if c is not None:
                raise DomainViolation("GEO_I has no constant c")
            return None
        if c is None:
            raise DomainViolation(f"{fam.tag} needs a value for c")
        if fam is FamilyId.GEO_II and c == 0:
            raise DomainViolation("GEO_II needs c != 0")
        if fam is FamilyId.TK1_3 and not abs(lam * c) > 1:
            raise DomainViolation(f"TK1_3 needs |lambda*c| > 1, got {lam * c!r}")
        return c

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.lam)

    @property
    def system(self) -> SystemKind:
        return SystemKind.parse(_SYSTEM[self.family])

    @property
    def constants(self) -> Tuple[float, ...]:
        return (self.c1, self.c2, self.c3, self.c4, self.c5)

    def replace(self, **changes) -> "ClosedFormSpec":
        d = asdict(self)
        d.update(changes)
        return ClosedFormSpec(**d)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        return d


class FamilyInfo(NamedTuple):
    family: FamilyId
    system: str
    constraint: str
    variants: Tuple[str, ...]


def families() -> List[FamilyInfo]:
    return [FamilyInfo(f, _SYSTEM[f], _CONSTRAINTS[f], VARIANTS) for f in FamilyId]


# --- printed transcriptions ----------------------------------------------


def _tk4_rate(lam):
    return (1 + lam * lam) / (3 * lam)


def pole_time(spec: ClosedFormSpec) -> Optional[float]:
    """Where the printed TK4 curve blows up; None for every other curve."""
    if spec.family is FamilyId.TK4 and spec.variant == "printed":
        return spec.c1 / _tk4_rate(spec.lam)
    return None


def _printed(spec, t):
    lam, c = spec.lam, spec.c
    c1, c2, c3, c4, c5 = spec.constants
    f = spec.family
    if f is FamilyId.GEO_I:
        return (c1 * t + c2, c3 * t + c4, c1 * c3 / 2 * t ** 2 + c2 * c3 * t + c5)
    if f is FamilyId.GEO_II:
        ep, em = np.exp(c * lam * t), np.exp(-c * lam * t)
        x = -c1 / c * ep - c2 / c * em + c3
        y = c1 / (c * lam) * ep - c2 / (c * lam) * em + c4
        z = ((2 * c1 * c2 + c * c) / c * t - c3 / (lam * c) * (c1 * ep - c2 * em)
             + (c1 ** 2 - c2 ** 2) / (2 * c * c * lam) * np.exp(-2 * c * lam * t))
        return (x, y, z)
    if f is FamilyId.TK1_1:
        x = c1 * t + c2
        y = -c1 / lam * t ** 2 + c3 * t + c4
        z = (2 * c1 ** 2 / (3 * lam) * t ** 3 + c1 * (c2 / lam - c3 / 2) * t ** 2
             + (1 / lam - c2 * c3) * t + c5)
        return (x, y, z)
    if f is FamilyId.TK1_2:
        x = c1 * lam * t ** 2 + c2 * t + c3
        y = c1 * t + c4
        z = c1 * c2 / 2 * t ** 2 + (-1 / lam + c3 * c1 - c1 ** 2 / 3 * lam) * t + c5
        return (x, y, z)
    if f is FamilyId.TK1_3:
        s = math.sqrt(lam * lam * c * c - 1)
        ep, em = np.exp(s * t), np.exp(-s * t)
        x = lam / (lam * c + 1) * (c1 * ep + c2 * em) + c3
        y = (c1 * ep - c2 * em) / s + c4
        z = ((c + 2 * lam * c1 * c2 / (lam * c + 1)) * t
             + (c3 * (c1 * em - c2 * ep)
                + lam / (2 * (lam * c + 1)) * (c1 ** 2 * em ** 2 - c2 ** 2 * ep ** 2)) / s
             + c5)
        return (x, y, z)
    if f is FamilyId.TK2:
        x = c1 * np.cos(t) - c2 * np.sin(t)
        y = (c1 * c2 / (2 * lam) * np.cos(2 * t) + (c1 ** 2 - c2 ** 2) / (4 * lam) * np.sin(2 * t)
             + (c1 ** 2 + c2 ** 2) / (2 * lam) * t)
        z = (c2 * (c1 ** 2 - c2 ** 2 / 3) / 4 * np.cos(3 * t)
             + c1 * (c1 ** 2 / 3 - c2 ** 2) / 4 * np.sin(3 * t)
             + (1 + 0.75 * (c2 ** 2 + c1 ** 2)) * (c2 * np.cos(t) + c1 * np.sin(t))) / lam
        return (x, y, z)
    if f is FamilyId.TK3:
        r = math.sqrt(2 * lam * c1 - 1)
        ep, em = np.exp(r / lam * t), np.exp(-r / lam * t)
        x = c1 * t + c2
        y = c3 * ep + c4 * em
        z = ((-c3 / r - c3 * (c2 - lam * c1 * r + c1 * t)) * ep
             + (c4 / r - c4 * (c2 + lam * c1 * r + c1 * t)) * em)
        return (x, y, z)
    k = _tk4_rate(lam)
    d = c1 - k * np.asarray(t, dtype=float)
    if np.any(d <= 0):
        raise DomainViolation(
            f"TK4 printed curve is undefined for t >= {c1 / k!r} (pole at t = {c1 / k!r})")
    x = 1 / (math.sqrt(2) * np.sqrt(d))
    y = spec.branch * x
    z = 0.75 * np.log(np.abs(k * t - c1)) + spec.branch / (4 * d) + c2
    return (x, y, z)


def _printed_velocity0(spec):
    """Exact (x'(0), y'(0)) of the printed GEO_II and TK1_3 curves."""
    lam, c = spec.lam, spec.c
    c1, c2 = spec.c1, spec.c2
    if spec.family is FamilyId.GEO_II:
        return lam * (c2 - c1), c1 + c2
    s = math.sqrt(lam * lam * c * c - 1)
    return lam * s * (c1 - c2) / (lam * c + 1), c1 + c2


# --- corrected variants ----------------------------------------------------


def _x_minus_sin(x):
    """x - sin(x) without cancellation for small |x|."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    series = x * x2 / 6 * (1 - x2 / 20 * (1 - x2 / 42 * (1 - x2 / 72 * (1 - x2 / 110 * (
        1 - x2 / 156)))))
    return np.where(np.abs(x) < 0.5, series, x - np.sin(x))


def _helix(t, lam, omega, w, x0, y0, z0, vx0, vy0):
    """Solution with constant w and (y', x'/lam) rotating at rate omega."""
    t = np.asarray(t, dtype=float)
    a, b = vy0, vx0 / lam
    if omega == 0.0:
        x = x0 + lam * b * t
        y = y0 + a * t
        z = z0 + w * t - a * x0 * t - lam * a * b * t * t / 2
        return (x, y, z)
    th = omega * t
    sw = np.sin(th)
    one_minus_cw = 2 * np.sin(th / 2) ** 2
    x = x0 + lam / omega * (a * one_minus_cw + b * sw)
    y = y0 + (a * sw - b * one_minus_cw) / omega
    # integral of x y' from 0 to t
    s1, s2 = _x_minus_sin(th), _x_minus_sin(2 * th)
    ixy = x0 * (y - y0) + lam / omega ** 2 * (
        a * a * (s2 / 4 - s1) - b * b * s2 / 4 + a * b * (1 - one_minus_cw) * one_minus_cw)
    return (x, y, z0 + w * t - ixy)


def tk4_frequency(lam: float, radius: float, branch: int) -> float:
    """Rotation rate of the K4 relative equilibrium of the given radius.

    Root of W^2 + lam^2 R^2 W - lam^2 R^2 / 2 = 0; ``branch`` picks the root.
    """
    q = (lam * radius) ** 2
    return (-q + branch * math.sqrt(q * q + 2 * q)) / 2


def _corrected(spec, t):
    lam, c = spec.lam, spec.c
    c1, c2, c3, c4, c5 = spec.constants
    f = spec.family
    if f is FamilyId.GEO_I:
        return _helix(t, lam, 0.0, 0.0, c2, c4, c5, c1, c3)
    if f in (FamilyId.GEO_II, FamilyId.TK1_3):
        x0, y0, z0 = (float(v) for v in _printed(spec, 0.0))
        vx0, vy0 = _printed_velocity0(spec)
        omega = lam * c if f is FamilyId.GEO_II else lam * c + 1
        if f is FamilyId.GEO_II:
            z0 += c5
        return _helix(t, lam, omega, c, x0, y0, z0, vx0, vy0)
    if f is FamilyId.TK1_1:
        return _helix(t, lam, 2.0, 1 / lam, c2, c4, c5, c1, c3)
    if f is FamilyId.TK1_2:
        return _helix(t, lam, 0.0, -1 / lam, c3, c4, c5, c2, c1)
    if f is FamilyId.TK2:
        _, y0, z0 = (float(v) for v in _printed(spec, 0.0))
        osc = Duffing(-1.0, c1, -c2)
        x = osc.q(t)
        y = y0 + c3 - osc.int_q2(t) / lam
        z = z0 + c4 + (osc.int_q(t) - (osc.dq(t) + c2)) / (2 * lam)
        return (x, y, z)
    if f is FamilyId.TK3:
        _, _, z0 = (float(v) for v in _printed(spec, 0.0))
        r = math.sqrt(2 * lam * c1 - 1)
        q0, v0 = c3 + c4, r / lam * (c3 - c4)
        osc = Duffing(r * r / (lam * lam), q0, v0)
        y = osc.q(t)
        x = c2 + c1 * np.asarray(t, dtype=float) - lam * osc.int_q2(t)
        z = (z0 + c5 - osc.int_q(t) / (2 * lam) - (x * y - c2 * q0)
             + lam * (osc.dq(t) - v0) / 2)
        return (x, y, z)
    radius = c1
    om = tk4_frequency(lam, radius, spec.branch)
    t = np.asarray(t, dtype=float)
    x = lam * radius * np.cos(om * t)
    y = -radius * np.sin(om * t)
    z = c2 + lam * radius ** 2 / 2 * (om - 1) * t + lam * radius ** 2 / 4 * np.sin(2 * om * t)
    return (x, y, z)


def eval_array(spec: ClosedFormSpec, ts) -> np.ndarray:
    """Positions at every time in ``ts`` as an ``(n, 3)`` array."""
    ts = np.asarray(ts, dtype=float)
    if not np.all(np.isfinite(ts)):
        raise DomainViolation("evaluation times must be finite")
    fn = _printed if spec.variant == "printed" else _corrected
    with np.errstate(over="ignore", invalid="ignore"):
        x, y, z = fn(spec, ts)
    out = np.stack([np.broadcast_to(x, ts.shape), np.broadcast_to(y, ts.shape),
                    np.broadcast_to(z, ts.shape)], axis=-1).astype(float)
    if not np.all(np.isfinite(out)):
        raise DomainViolation(f"{spec.family.tag} {spec.variant} is not finite on the requested times")
    return out


def eval(spec: ClosedFormSpec, t: float) -> PointH3:
    return PointH3(*(float(v) for v in eval_array(spec, float(t))))


def guard_band(t):
    """Distance to keep from a pole: the widest difference stencil plus margin."""
    return 4 * fd.STEP2_R * np.maximum(1.0, np.abs(t))


def to_initial_state(spec: ClosedFormSpec, t0: float) -> State:
    """Position and finite-difference velocity of the curve at ``t0``."""
    t0 = float(t0)
    tp = pole_time(spec)
    if tp is not None:
        guard = float(guard_band(t0))
        if t0 > tp - guard:
            raise DomainViolation(
                f"t0 = {t0!r} is within {guard:.3g} of the TK4 pole at t = {tp!r} or beyond it")
    pos = eval_array(spec, t0)
    vel = fd.derivative(lambda s: eval_array(spec, s), t0)
    return State(*(float(v) for v in pos), *(float(v) for v in vel))


def natural_span(spec: ClosedFormSpec) -> Tuple[float, float]:
    """Default verification interval: [0, 2], or a window left of the TK4 pole."""
    tp = pole_time(spec)
    if tp is None:
        return (0.0, 2.0)
    return (tp - 2.0, tp - 0.25)
