"""Lorentz-equation right-hand sides for geodesics and Killing magnetic curves.

A curve solves nabla_t t = K x t, with ``t`` its velocity and ``K`` a Killing
field (``K = 0`` gives geodesics). Writing ``w = z' + x y'`` for the e3
component of the velocity, the frame components of nabla_t t are

    (y'' + x' w,  x''/lam - lam y' w,  w')

and ``lorentz_rhs`` solves that linear relation for (x'', y'', z'').
"""

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .geometry import (FrameVector, KillingFieldId, ModelParams, coordinate_to_frame,
                       cross, killing_field_frame)


class State(NamedTuple):
    x: float
    y: float
    z: float
    vx: float
    vy: float
    vz: float

    @property
    def position(self):
        return (self.x, self.y, self.z)

    @property
    def velocity(self):
        return (self.vx, self.vy, self.vz)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self)))


@dataclass(frozen=True)
class SystemKind:
    """Geodesic flow (``field is None``) or the magnetic flow of a Killing field."""

    field: Optional[KillingFieldId] = None

    @classmethod
    def geodesic(cls):
        return cls(None)

    @classmethod
    def magnetic(cls, tag, scale=1.0):
        return cls(KillingFieldId(tag, scale))

    @classmethod
    def parse(cls, name: str):
        name = name.strip().lower()
        if name in ("geodesic", "g", "geo"):
            return cls.geodesic()
        if name in ("k1", "k2", "k3", "k4"):
            return cls.magnetic(name.upper())
        raise ValueError(f"unknown system {name!r}")

    @property
    def is_geodesic(self) -> bool:
        return self.field is None

    @property
    def code(self) -> int:
        """Kernel code: 0 for geodesics, 1..4 for K1..K4."""
        return 0 if self.field is None else self.field.index

    @property
    def scale(self) -> float:
        return 0.0 if self.field is None else self.field.scale

    @property
    def name(self) -> str:
        if self.field is None:
            return "geodesic"
        if self.field.scale == 1.0:
            return self.field.tag.lower()
        return f"{self.field.tag.lower()}*{self.field.scale!r}"


def speed_frame(p: ModelParams, s) -> FrameVector:
    return coordinate_to_frame(p, s[:3], s[3:6])


def covariant_accel_frame(p: ModelParams, s, ax, ay, az) -> FrameVector:
    """Frame components of nabla_t t given the coordinate acceleration."""
    x, _, _, vx, vy, vz = s
    lam = p.lam
    w = vz + x * vy
    dw = az + vx * vy + x * ay
    return FrameVector(ay + vx * w, ax / lam - lam * vy * w, dw)


def lorentz_force(p: ModelParams, sys: SystemKind, s) -> FrameVector:
    if sys.is_geodesic:
        return FrameVector(0.0, 0.0, 0.0)
    k = killing_field_frame(sys.field, p, s[:3])
    return cross(k, speed_frame(p, s))


def lorentz_rhs(p: ModelParams, sys: SystemKind, s):
    """Coordinate acceleration (x'', y'', z'') of the system at state ``s``."""
    x, _, _, vx, vy, vz = s
    lam = p.lam
    f1, f2, f3 = lorentz_force(p, sys, s)
    w = vz + x * vy
    ay = f1 - vx * w
    ax = lam * (f2 + lam * vy * w)
    az = f3 - vx * vy - x * ay
    return (ax, ay, az)


def state_derivative(p: ModelParams, sys: SystemKind, s) -> np.ndarray:
    ax, ay, az = lorentz_rhs(p, sys, s)
    return np.array([s[3], s[4], s[5], ax, ay, az])


def speed_squared(p: ModelParams, s) -> float:
    a1, a2, a3 = speed_frame(p, s)
    return a1 * a1 + a2 * a2 + a3 * a3


def first_integral(p: ModelParams, sys: SystemKind, s) -> float:
    """The conserved combination of ``w = z' + x y'`` for each system.

    ``w`` (geodesic, K1), ``w - x/lam`` (K2), ``w + y/lam`` (K3) and
    ``w + x^2/(2 lam) + lam y^2/2`` (K4). Scaled fields are rejected.
    """
    if sys.field is not None and sys.field.scale != 1.0:
        raise ValueError("first_integral is defined for unscaled Killing fields only")
    x, y, _, _, vy, vz = s
    lam = p.lam
    w = vz + x * vy
    tag = None if sys.field is None else sys.field.tag
    if tag in (None, "K1"):
        return w
    if tag == "K2":
        return w - x / lam
    if tag == "K3":
        return w + y / lam
    return w + x * x / (2 * lam) + lam * y * y / 2
