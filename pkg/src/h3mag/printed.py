"""Literal transcriptions of the published ODE systems and cross products.

These exist to be checked, not trusted. Every function takes ``lam`` and a
2-jet ``j = (x, y, z, x', y', z', x'', y'', z'')`` (scalars or equal-shape
arrays) and returns the left-minus-right defect of each equation, so a curve
satisfies a system exactly when all returned components vanish.

The e2 component of the covariant derivative is published with
``+ lam y' w``; the Levi-Civita value is ``- lam y' w`` (see
``dynamics.covariant_accel_frame``). Every full system below inherits the
published sign, and ``LC_SYSTEMS`` holds the same systems rebuilt from the
Levi-Civita value for side-by-side comparison.
"""


def _w(j):
    x, _, _, _, dy, dz = j[:6]
    return dz + x * dy


def _dw(j):
    _, _, _, dx, dy, _, _, ddy, ddz = j
    x = j[0]
    return ddz + dx * dy + x * ddy


def covariant_accel(lam, j):
    """Frame components of nabla_t t with the published e2 sign."""
    dx, dy = j[3], j[4]
    ddx, ddy = j[6], j[7]
    w = _w(j)
    return (ddy + dx * w, ddx / lam + lam * dy * w, _dw(j))


def k1_cross(lam, j):
    return (-j[3] / lam, j[4], 0.0 * j[0])


def k2_cross(lam, j):
    x, dx, dy = j[0], j[3], j[4]
    return (-dx * x / lam, x * dy - _w(j), dx / lam)


def k3_cross(lam, j):
    y, dx, dy = j[1], j[3], j[4]
    return ((y * dx + _w(j)) / lam, -y * dy, -dy / lam)


def k4_cross(lam, j):
    x, y, dx, dy = j[0], j[1], j[3], j[4]
    w = _w(j)
    lam2 = lam * lam
    e1 = -(3 * x * x * dx - y * y * dx * lam2 - 2 * y * lam2 * w) / (2 * lam)
    e2 = -(-3 * x * x * dy + y * y * dy * lam2 - 2 * x * w) / 2
    e3 = -(x * dx + y * dy * lam2) / lam
    return (e1, e2, e3)


def system_geodesic(lam, j):
    dx, dy = j[3], j[4]
    w = _w(j)
    return (j[7] + dx * w, j[6] + lam * lam * dy * w, _dw(j))


def system_k1(lam, j):
    dx, dy = j[3], j[4]
    w = _w(j)
    return (j[7] + dx * (w + 1 / lam), j[6] + dy * (lam * lam * w - lam), _dw(j))


def system_k1_reduced(lam, c, j):
    """The K1 system after fixing ``w = c``; the third equation is ``w - c``."""
    dx, dy = j[3], j[4]
    return (j[7] + dx * (c + 1 / lam), j[6] + dy * lam * (lam * c - 1), _w(j) - c)


def system_k2(lam, j):
    x, dx, dy = j[0], j[3], j[4]
    w = _w(j)
    return (dx * w + j[7] + x * dx / lam,
            (lam * dy + 1) * w - x * dy + j[6] / lam,
            _dw(j) - dx / lam)


def system_k2_reduced(lam, c, j):
    """First-order y equation and second-order x equation after fixing c."""
    x, dy = j[0], j[4]
    return (dy + x * x / lam + x * c,
            j[6] - c * x * x * lam + x * (1 - c * c * lam * lam) + c * lam)


def system_k3(lam, j):
    y, dx, dy = j[1], j[3], j[4]
    w = _w(j)
    return (j[7] + dx * w - w / lam - y * dx / lam,
            j[6] / lam + lam * dy * w + y * dy,
            _dw(j) + dy / lam)


def system_k3_reduced(lam, c, j):
    y, dx = j[1], j[3]
    return (j[7] + 2 * lam * c * y * y + y * (1 / lam ** 2 - lam ** 2 * c * c) - c / lam,
            dx + lam * lam * c * y)


def system_k4(lam, j):
    x, y, dx, dy = j[0], j[1], j[3], j[4]
    w = _w(j)
    lam2 = lam * lam
    return (j[7] + dx * w - (1.5 / lam) * x * x * dx + 0.5 * lam * y * y * dx + lam * y * w,
            j[6] + lam2 * dy * w - 1.5 * lam * x * x * dy + 0.5 * lam ** 3 * y * y * dy
            - lam * x * w,
            _dw(j) + lam * y * dy + x * dx / lam)


def system_k4_reduced(lam, c, j):
    x, y, dx, dy = j[0], j[1], j[3], j[4]
    r2 = y * y * lam * lam + x * x
    return (j[7] - (2 / lam) * x * x * dx - 0.5 * y * r2 + c * (y * lam + dx),
            j[6] - 2 * dy * x * x * lam + 0.5 * x * r2 - c * (x * lam - c * dy * lam * lam))


SYSTEMS = {
    "geodesic": system_geodesic,
    "K1": system_k1,
    "K2": system_k2,
    "K3": system_k3,
    "K4": system_k4,
}

CROSSES = {"K1": k1_cross, "K2": k2_cross, "K3": k3_cross, "K4": k4_cross}


def _lc_system(cross_fn):
    def system(lam, j):
        dx, dy = j[3], j[4]
        w = _w(j)
        acc = (j[7] + dx * w, j[6] / lam - lam * dy * w, _dw(j))
        f = (0.0, 0.0, 0.0) if cross_fn is None else cross_fn(lam, j)
        return tuple(a - b for a, b in zip(acc, f))
    return system


def _true_k4_cross(lam, j):
    # the Killing K4 frame differs from the published one by -2x^2 e3, which adds
    # (2x^2 x'/lam, -2x^2 y', 0) to the cross product
    e1, e2, e3 = k4_cross(lam, j)
    x, dx, dy = j[0], j[3], j[4]
    return (e1 + 2 * x * x * dx / lam, e2 - 2 * x * x * dy, e3)


LC_SYSTEMS = {
    "geodesic": _lc_system(None),
    "K1": _lc_system(k1_cross),
    "K2": _lc_system(k2_cross),
    "K3": _lc_system(k3_cross),
    "K4": _lc_system(_true_k4_cross),
}
