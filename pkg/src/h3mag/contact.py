"""Almost-contact structure (phi, xi, eta) on H3 and numerical checks of it.

``xi = e3``, ``eta = x dy + dz`` (the third coframe form) and ``phi`` rotates
the e1/e2 plane: phi(e1) = e2, phi(e2) = -e1, phi(e3) = 0.
"""

from dataclasses import dataclass

import numpy as np

from . import fd
from .geometry import FrameVector, ModelParams, frame_to_coordinate, inner

XI = FrameVector(0.0, 0.0, 1.0)


def phi(w) -> FrameVector:
    return FrameVector(-w[1], w[0], 0.0)


def eta(p: ModelParams, pt, v) -> float:
    return pt[0] * v[1] + v[2]


def eta_frame(w) -> float:
    return w[2]


def d_eta(p: ModelParams, pt, u, v, base=fd.STEP1) -> float:
    """Exterior derivative of eta on coordinate vectors at ``pt``.

    Uses d eta(U, V) = U(eta(V)) - V(eta(U)) for constant-coefficient
    fields U, V (their brackets vanish). No 1/2 normalisation.
    """
    pt = np.asarray(pt, dtype=float)
    eu = lambda q: eta(p, q, u)
    ev = lambda q: eta(p, q, v)
    return float(fd.directional(ev, pt, u, base) - fd.directional(eu, pt, v, base))


def d_eta_closedness(p: ModelParams, pt, u, v, w) -> float:
    """Cyclic sum U(d eta(V, W)) + ...; zero when d eta is closed."""
    pt = np.asarray(pt, dtype=float)
    total = 0.0
    for a, b, c in ((u, v, w), (v, w, u), (w, u, v)):
        inner_d = lambda q, b=b, c=c: d_eta(p, q, b, c, fd.STEP_NESTED)
        total += float(fd.directional(inner_d, pt, a, fd.STEP_NESTED))
    return total


@dataclass(frozen=True)
class ContactReport:
    lam: float
    samples: int
    compat_minus_defect: float
    compat_plus_defect: float
    compat_plus_at_xi: float
    fitted_scale: float
    scale_fit_residual: float
    unit_scale_defect: float
    closedness_defect: float
    skew_defect: float
    phi_square_defect: float
    eta_xi: float

    def as_dict(self):
        return {k: (int(v) if k == "samples" else float(v)) for k, v in self.__dict__.items()}


def _coord(p, pt, w):
    return np.array(frame_to_coordinate(p, pt, w))


def contact_identity_report(p: ModelParams, samples: int, seed: int = 0) -> ContactReport:
    """Measure the contact identities on random points and frame vectors.

    Reports the defect of g(phi X, phi Y) = g(X, Y) - eta(X) eta(Y) and of
    the variant with ``+``, the least-squares scale ``s`` in
    d eta(X, Y) ~ s g(X, phi Y), and the closedness defect of d eta.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    minus = plus = skew = phisq = closed = 0.0
    num = den = 0.0
    lhs_all, rhs_all = [], []
    for _ in range(samples):
        pt = rng.uniform(-2, 2, 3)
        X, Y, Z = (FrameVector(*rng.normal(size=3)) for _ in range(3))
        gxy = inner(p, pt, _coord(p, pt, X), _coord(p, pt, Y))
        gpp = inner(p, pt, _coord(p, pt, phi(X)), _coord(p, pt, phi(Y)))
        ee = eta_frame(X) * eta_frame(Y)
        minus = max(minus, abs(gpp - (gxy - ee)))
        plus = max(plus, abs(gpp - (gxy + ee)))
        skew = max(skew, abs(inner(p, pt, _coord(p, pt, phi(X)), _coord(p, pt, Y))
                             + inner(p, pt, _coord(p, pt, X), _coord(p, pt, phi(Y)))))
        pp = np.array(phi(phi(X)))
        phisq = max(phisq, float(np.max(np.abs(pp - (-np.array(X) + eta_frame(X) * np.array(XI))))))
        a = d_eta(p, pt, _coord(p, pt, X), _coord(p, pt, Y))
        b = inner(p, pt, _coord(p, pt, X), _coord(p, pt, phi(Y)))
        lhs_all.append(a)
        rhs_all.append(b)
        num += a * b
        den += b * b
        closed = max(closed, abs(d_eta_closedness(p, pt, _coord(p, pt, X),
                                                  _coord(p, pt, Y), _coord(p, pt, Z))))
    s = num / den if den > 0 else float("nan")
    lhs_all, rhs_all = np.array(lhs_all), np.array(rhs_all)
    zero = np.zeros(3)
    at_xi = abs(inner(p, zero, _coord(p, zero, phi(XI)), _coord(p, zero, phi(XI)))
                - (inner(p, zero, _coord(p, zero, XI), _coord(p, zero, XI)) + 1.0))
    return ContactReport(
        lam=p.lam,
        samples=samples,
        compat_minus_defect=minus,
        compat_plus_defect=plus,
        compat_plus_at_xi=at_xi,
        fitted_scale=s,
        scale_fit_residual=float(np.max(np.abs(lhs_all - s * rhs_all))),
        unit_scale_defect=float(np.max(np.abs(lhs_all - rhs_all))),
        closedness_defect=closed,
        skew_defect=skew,
        phi_square_defect=phisq,
        eta_xi=eta_frame(XI),
    )
