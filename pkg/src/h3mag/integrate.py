"""Explicit Runge-Kutta integration of the six-dimensional first-order system.

Two methods: classical RK4 with a fixed step, and the Dormand-Prince 5(4)
embedded pair with a PI step-size controller. Output is produced on a uniform
sample grid by integrating exactly to every grid time (no dense output).

The stepping loops live in a compiled extension when it is available and fall
back to an equivalent pure-Python module otherwise. Set
``H3MAG_PURE_PYTHON=1`` to force the fallback.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from . import _pykernels
from .dynamics import State, SystemKind, first_integral, speed_squared
from .geometry import ModelParams

log = logging.getLogger(__name__)


def _load_compiled():
    if os.environ.get("H3MAG_PURE_PYTHON") == "1":
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
kernels = _compiled if _compiled is not None else _pykernels
BACKEND = "cython" if _compiled is not None else "python"


def get_kernels(backend: Optional[str] = None):
    """Kernel module by name: ``"cython"``, ``"python"`` or None for the default."""
    if backend is None:
        return kernels
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")


class IntegrationError(RuntimeError):
    """Base class; ``t`` is the time reached before the failure."""

    def __init__(self, msg, t=None):
        super().__init__(msg)
        self.t = t


class StepUnderflow(IntegrationError):
    pass


class NonFinite(IntegrationError):
    pass


class MaxStepsExceeded(IntegrationError):
    pass


METHODS = ("embedded-45", "fixed-rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "embedded-45"
    step: float = 1e-3
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    t_start: float = 0.0
    t_end: float = 1.0
    max_steps: int = 1_000_000
    sample_every: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ValueError("t_start and t_end must be finite")
        if self.t_end == self.t_start:
            raise ValueError("t_end must differ from t_start")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.rel_tol < 1e-14 or self.abs_tol < 1e-14:
            raise ValueError("tolerances must be >= 1e-14")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.sample_every is not None and not self.sample_every > 0:
            raise ValueError("sample_every must be positive")

    @property
    def span(self) -> float:
        return self.t_end - self.t_start

    def sample_times(self) -> np.ndarray:
        span = abs(self.span)
        every = self.sample_every if self.sample_every is not None else span / 100
        n = max(1, math.ceil(span / every - 1e-9))
        d = math.copysign(1.0, self.span)
        ts = [self.t_start + d * every * k for k in range(n)]
        ts.append(self.t_end)
        return np.array(ts)


@dataclass(frozen=True)
class Diagnostics:
    speed2_drift: float
    fi_drift: Optional[float]
    steps: int
    rejected: int


@dataclass
class Trajectory:
    params: ModelParams
    system: SystemKind
    times: np.ndarray
    states: np.ndarray
    speed2: np.ndarray
    first_integral: Optional[np.ndarray]
    diagnostics: Diagnostics
    backend: str = field(default=BACKEND)

    @property
    def samples(self):
        return [(float(t), State(*s)) for t, s in zip(self.times, self.states)]

    @property
    def final(self) -> State:
        return State(*self.states[-1])


def _norm(v, sc):
    return math.sqrt(sum((a / b) ** 2 for a, b in zip(v, sc)) / len(v))


def initial_step(kern, lam, kind, scale, s, direction, rtol, atol) -> float:
    """Starting step from the size of the state and of its derivative."""
    f0 = kern.rhs(lam, kind, scale, s)
    sc = [atol + rtol * abs(v) for v in s]
    d0, d1 = _norm(s, sc), _norm(f0, sc)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    s1 = tuple(a + direction * h0 * b for a, b in zip(s, f0))
    f1 = kern.rhs(lam, kind, scale, s1)
    d2 = _norm([a - b for a, b in zip(f1, f0)], sc) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def _raise_status(status, t):
    if status == _pykernels.UNDERFLOW:
        raise StepUnderflow(f"adaptive step fell below the minimum near t={t}", t)
    if status == _pykernels.NONFINITE:
        raise NonFinite(f"non-finite state near t={t}", t)
    if status == _pykernels.MAXSTEPS:
        raise MaxStepsExceeded(f"step budget exhausted near t={t}", t)


def integrate(p: ModelParams, sys: SystemKind, s0, cfg: IntegratorConfig,
              backend: Optional[str] = None) -> Trajectory:
    kern = get_kernels(backend)
    lam, kind, scale = p.lam, sys.code, sys.scale
    s = tuple(float(v) for v in s0)
    if not all(math.isfinite(v) for v in s):
        raise NonFinite("initial state is not finite", cfg.t_start)
    times = cfg.sample_times()
    states = [s]
    steps = rejected = 0
    if cfg.method == "fixed-rk4":
        for t0, t1 in zip(times[:-1], times[1:]):
            n = max(1, math.ceil(abs(t1 - t0) / cfg.step - 1e-9))
            if steps + n > cfg.max_steps:
                raise MaxStepsExceeded(f"step budget exhausted near t={t0}", float(t0))
            s = kern.rk4_segment(lam, kind, scale, s, float(t0), float(t1), n)
            steps += n
            if not all(math.isfinite(v) for v in s):
                raise NonFinite(f"non-finite state near t={t1}", float(t1))
            states.append(s)
    else:
        direction = math.copysign(1.0, cfg.span)
        h = initial_step(kern, lam, kind, scale, s, direction, cfg.rel_tol, cfg.abs_tol)
        hmin = 1e-13 * abs(cfg.span)
        err_prev = 1e-4
        for t0, t1 in zip(times[:-1], times[1:]):
            s, h, err_prev, steps, rejected, status = kern.dopri_segment(
                lam, kind, scale, s, float(t0), float(t1), h, cfg.rel_tol, cfg.abs_tol,
                cfg.max_steps, hmin, err_prev, steps, rejected)
            _raise_status(status, float(t0))
            states.append(s)
    arr = np.array(states)
    sp2 = np.array([speed_squared(p, st) for st in arr])
    if sys.field is None or sys.field.scale == 1.0:
        fi = np.array([first_integral(p, sys, st) for st in arr])
        fi_drift = float(np.max(np.abs(fi - fi[0])))
    else:
        fi, fi_drift = None, None
    diag = Diagnostics(float(np.max(np.abs(sp2 - sp2[0]))), fi_drift, steps, rejected)
    log.debug("integrated %s over [%g, %g]: %d steps, %d rejected", sys.name,
              cfg.t_start, cfg.t_end, steps, rejected)
    return Trajectory(p, sys, times, arr, sp2, fi, diag,
                      backend="python" if kern is _pykernels else "cython")


def sweep(params: Sequence[ModelParams], sys: SystemKind, initial: Sequence,
          cfg: IntegratorConfig, workers: int = 1,
          backend: Optional[str] = None) -> List[Union[Trajectory, IntegrationError]]:
    """Integrate each (params, initial state) pair; length-1 lists broadcast.

    Failed runs appear in the output as their :class:`IntegrationError`.
    """
    params, initial = list(params), list(initial)
    if not params or not initial:
        raise ValueError("sweep needs non-empty parameter and state lists")
    n = max(len(params), len(initial))
    if len(params) == 1:
        params = params * n
    if len(initial) == 1:
        initial = initial * n
    if len(params) != len(initial):
        raise ValueError("parameter and state lists have different lengths")

    def run(pair):
        p, s0 = pair
        try:
            return integrate(p, sys, s0, cfg, backend=backend)
        except IntegrationError as exc:
            return exc

    pairs = list(zip(params, initial))
    if workers <= 1:
        return [run(pr) for pr in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, pairs))
