"""Central finite differences with Richardson extrapolation.

Each Richardson level removes one even power of ``h`` from the truncation
error. Curves are differentiated with three levels (error O(h^8)); balancing
that against roundoff puts the default steps at ``eps**(1/9)`` for first
derivatives and ``eps**(1/10)`` for second derivatives, both scaled by
``max(1, |x|)``. The geometric checks use one level with their own steps.
"""

import numpy as np

EPS = np.finfo(float).eps
STEP1 = EPS ** (1.0 / 3.0)
STEP2 = EPS ** 0.25
# for derivatives of derivatives: balances eps/h^2 against the h^4 Richardson term
STEP_NESTED = EPS ** (1.0 / 6.0)
STEP1_R = EPS ** (1.0 / 9.0)
STEP2_R = EPS ** (1.0 / 10.0)


def _step(x, base):
    return base * max(1.0, abs(float(x)))


def _richardson(stencil, h, levels):
    table = [stencil(h / 2 ** k) for k in range(levels + 1)]
    for m in range(1, levels + 1):
        table = [(4 ** m * b - a) / (4 ** m - 1) for a, b in zip(table, table[1:])]
    return table[0]


def derivative(f, x, h=None, levels=3):
    """First derivative of a scalar-argument function at ``x``.

    ``f`` may return a scalar or an array; the result has the same shape.
    ``x`` and ``h`` may also be arrays of equal shape when ``f`` is vectorized.
    """
    h = _step(x, STEP1_R) if h is None else h
    return _richardson(
        lambda hh: (np.asarray(f(x + hh)) - np.asarray(f(x - hh))) / (2 * hh), h, levels)


def second_derivative(f, x, h=None, levels=3):
    h = _step(x, STEP2_R) if h is None else h
    f0 = np.asarray(f(x))
    return _richardson(
        lambda hh: (np.asarray(f(x + hh)) - 2 * f0 + np.asarray(f(x - hh))) / (hh * hh),
        h, levels)


def directional(f, point, direction, base=STEP1):
    """Derivative of ``f`` at ``point`` along ``direction`` (both length-3)."""
    point = np.asarray(point, dtype=float)
    direction = np.asarray(direction, dtype=float)
    scale = max(1.0, float(np.max(np.abs(point))))
    h = base * scale / max(1.0, float(np.linalg.norm(direction)))
    return derivative(lambda s: f(point + s * direction), 0.0, h=h, levels=1)


def gradient_matrix(f, point):
    """Jacobian-like stack: ``out[a] = d f / d x^a`` at ``point``."""
    point = np.asarray(point, dtype=float)
    eye = np.eye(len(point))
    return np.array([directional(f, point, eye[a]) for a in range(len(point))])
