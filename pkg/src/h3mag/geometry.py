"""Left-invariant Riemannian geometry of the Heisenberg group H3.

Coordinates ``(x, y, z)`` cover all of H3. The metric is

    g = dx^2 / lam^2 + dy^2 + (x dy + dz)^2

with orthonormal frame ``e1 = d_y - x d_z``, ``e2 = lam d_x``, ``e3 = d_z``.
Frame components are the canonical representation for the Lorentz force;
coordinate components are canonical for Killing fields.

Everything here is a pure function of immutable inputs.
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Union

import numpy as np

from . import fd


@dataclass(frozen=True)
class ModelParams:
    """Metric parameter ``lam > 0``."""

    lam: float

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam <= 0:
            raise ValueError(f"lambda must be a finite positive real, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)


class PointH3(NamedTuple):
    x: float
    y: float
    z: float


class CoordVector(NamedTuple):
    """Components in the coordinate basis (d_x, d_y, d_z)."""

    dx: float
    dy: float
    dz: float


class FrameVector(NamedTuple):
    """Components in the orthonormal frame (e1, e2, e3)."""

    a1: float
    a2: float
    a3: float


KILLING_TAGS = ("K1", "K2", "K3", "K4")


@dataclass(frozen=True)
class KillingFieldId:
    tag: str
    scale: float = 1.0

    def __post_init__(self):
        if self.tag not in KILLING_TAGS:
            raise ValueError(f"unknown Killing field {self.tag!r}")
        if not np.isfinite(self.scale):
            raise ValueError("Killing field scale must be finite")

    @property
    def index(self) -> int:
        return KILLING_TAGS.index(self.tag) + 1


VectorField = Callable[[np.ndarray], np.ndarray]


def metric_matrix(p: ModelParams, pt) -> np.ndarray:
    x = pt[0]
    return np.array([
        [1.0 / p.lam ** 2, 0.0, 0.0],
        [0.0, 1.0 + x * x, x],
        [0.0, x, 1.0],
    ])


def inner(p: ModelParams, pt, u, v) -> float:
    # expanded quadratic form; exact zero for zero input
    x = pt[0]
    return (u[0] * v[0] / p.lam ** 2 + u[1] * v[1]
            + (x * u[1] + u[2]) * (x * v[1] + v[2]))


def coordinate_to_frame(p: ModelParams, pt, v) -> FrameVector:
    return FrameVector(v[1], v[0] / p.lam, v[2] + pt[0] * v[1])


def frame_to_coordinate(p: ModelParams, pt, w) -> CoordVector:
    return CoordVector(p.lam * w[1], w[0], w[2] - pt[0] * w[0])


def frame_field(p: ModelParams, i: int) -> VectorField:
    """Coordinate components of ``e_i`` (1-based) as a function of the point."""
    unit = np.zeros(3)
    unit[i - 1] = 1.0
    return lambda q: np.array(frame_to_coordinate(p, q, unit))


def connection_table(p: ModelParams) -> np.ndarray:
    """``table[i, j]`` holds the frame components of nabla_{e_{i+1}} e_{j+1}."""
    h = p.lam / 2
    t = np.zeros((3, 3, 3))
    t[0, 1] = (0, 0, h)
    t[0, 2] = (0, -h, 0)
    t[1, 0] = (0, 0, -h)
    t[1, 2] = (h, 0, 0)
    t[2, 0] = (0, -h, 0)
    t[2, 1] = (h, 0, 0)
    return t


def christoffel_numeric(p: ModelParams, pt) -> np.ndarray:
    """``gamma[k, i, j]`` from finite differences of the metric."""
    pt = np.asarray(pt, dtype=float)
    dg = fd.gradient_matrix(lambda q: metric_matrix(p, q), pt)  # dg[l, i, j]
    ginv = np.linalg.inv(metric_matrix(p, pt))
    # lowered: Gamma_{l i j} = (d_i g_jl + d_j g_il - d_l g_ij) / 2
    low = 0.5 * (np.einsum("ijl->lij", dg) + np.einsum("jil->lij", dg) - dg)
    return np.einsum("kl,lij->kij", ginv, low)


def covariant_derivative_numeric(p: ModelParams, field: VectorField, pt, u,
                                 gamma=None) -> np.ndarray:
    """Coordinate components of nabla_u V at ``pt``."""
    pt = np.asarray(pt, dtype=float)
    u = np.asarray(u, dtype=float)
    if gamma is None:
        gamma = christoffel_numeric(p, pt)
    v = np.asarray(field(pt), dtype=float)
    dv = fd.directional(field, pt, u) if np.any(u) else np.zeros(3)
    return dv + np.einsum("kij,i,j->k", gamma, u, v)


def frame_connection_numeric(p: ModelParams, i: int, j: int, pt) -> FrameVector:
    """nabla_{e_i} e_j rebuilt from numeric Christoffel symbols."""
    ei = frame_field(p, i)(np.asarray(pt, dtype=float))
    out = covariant_derivative_numeric(p, frame_field(p, j), pt, ei)
    return coordinate_to_frame(p, pt, out)


def cross(u, v) -> FrameVector:
    """Cross product in the frame, oriented so that e1 x e2 = e3."""
    return FrameVector(u[1] * v[2] - u[2] * v[1],
                       u[2] * v[0] - u[0] * v[2],
                       u[0] * v[1] - u[1] * v[0])


def volume_form(u, v, w) -> float:
    """Riemannian volume of three frame vectors (determinant of components)."""
    return float(np.dot(np.asarray(u, dtype=float), np.cross(v, w)))


def killing_field(kid: KillingFieldId, p: ModelParams, pt) -> CoordVector:
    x, y = pt[0], pt[1]
    lam2 = p.lam ** 2
    if kid.tag == "K1":
        v = (0.0, 0.0, 1.0)
    elif kid.tag == "K2":
        v = (0.0, 1.0, 0.0)
    elif kid.tag == "K3":
        v = (1.0, 0.0, -y)
    else:
        v = (lam2 * y, -x, -0.5 * (lam2 * y * y - x * x))
    s = kid.scale
    return CoordVector(s * v[0], s * v[1], s * v[2])


def killing_field_frame(kid: KillingFieldId, p: ModelParams, pt) -> FrameVector:
    return coordinate_to_frame(p, pt, killing_field(kid, p, pt))


def k4_printed_frame(p: ModelParams, pt) -> FrameVector:
    """The frame expansion of K4 as printed: -x e1 + lam y e2 - (lam^2 y^2 - 3x^2)/2 e3.

    Kept only so that it can be tested; it is not a Killing field.
    """
    x, y = pt[0], pt[1]
    return FrameVector(-x, p.lam * y, -0.5 * (p.lam ** 2 * y * y - 3 * x * x))


def as_field(p: ModelParams, field: Union[KillingFieldId, VectorField]) -> VectorField:
    if isinstance(field, KillingFieldId):
        return lambda q: np.array(killing_field(field, p, q))
    return field


def killing_residual(p: ModelParams, field, pt, u, v) -> float:
    """g(nabla_u K, v) + g(nabla_v K, u); vanishes for Killing fields.

    ``field`` is a :class:`KillingFieldId` or any callable returning the
    coordinate components of a vector field at a point.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.any(u) and np.any(v)):
        return 0.0
    f = as_field(p, field)
    gamma = christoffel_numeric(p, pt)
    du = covariant_derivative_numeric(p, f, pt, u, gamma)
    dv = covariant_derivative_numeric(p, f, pt, v, gamma)
    return float(inner(p, pt, du, v) + inner(p, pt, dv, u))


def k4_printed_field(p: ModelParams) -> VectorField:
    return lambda q: np.array(frame_to_coordinate(p, q, k4_printed_frame(p, q)))


def non_killing_control(q) -> np.ndarray:
    """d_y + z d_x: a field that is not Killing for any lam."""
    return np.array([q[2], 1.0, 0.0])


def lie_bracket_numeric(f: VectorField, g: VectorField, pt) -> np.ndarray:
    """Coordinate commutator [f, g], i.e. f(g) - g(f) applied componentwise."""
    pt = np.asarray(pt, dtype=float)
    fv, gv = f(pt), g(pt)
    return fd.directional(g, pt, fv) - fd.directional(f, pt, gv)


def frame_bracket_numeric(p: ModelParams, i: int, j: int, pt) -> FrameVector:
    if i not in (1, 2, 3) or j not in (1, 2, 3):
        raise ValueError("frame indices are 1, 2 or 3")
    if i == j:
        return FrameVector(0.0, 0.0, 0.0)
    br = lie_bracket_numeric(frame_field(p, i), frame_field(p, j), pt)
    return coordinate_to_frame(p, pt, br)


BRACKETS = {(1, 2): (0.0, 0.0, 1.0), (2, 1): (0.0, 0.0, -1.0)}


def frame_bracket_exact(p: ModelParams, i: int, j: int) -> FrameVector:
    """[e1, e2] = lam e3; all other brackets vanish."""
    b = BRACKETS.get((i, j), (0.0, 0.0, 0.0))
    return FrameVector(*(p.lam * c for c in b))
