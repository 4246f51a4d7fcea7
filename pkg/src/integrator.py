"""Adaptive Dormand-Prince 5(4) integration with dense output and events."""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from config import ABS_TOL, BLOW_UP_NORM, EVENT_XTOL, MAX_STEPS, MIN_STEP, REL_TOL
from errors import BlowUp, IntegratorError, InvalidParameters, OutOfRange, StepLimit

logger = logging.getLogger(__name__)

# Dormand-Prince tableau with its free 4th-order continuous extension
C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1])
A = np.array([
    [0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# proportional-integral exponents for an order-4 error estimate
PI_ALPHA = 0.7 / 5
PI_BETA = 0.4 / 5

DIRECTIONS = ('rising', 'falling', 'any')


@dataclass(frozen=True)
class EventSpec:
    """Zero of `guard(t, state)` to locate while integrating"""
    name: str
    guard: Callable[[float, np.ndarray], float]
    direction: str = 'any'
    terminal: bool = False

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise InvalidParameters(f"event direction must be one of {DIRECTIONS}")


@dataclass
class IntegrationConfig:
    rel_tol: float = REL_TOL
    abs_tol: float = ABS_TOL
    max_step: float = math.inf
    max_steps: int = MAX_STEPS
    events: Sequence[EventSpec] = ()
    first_step: Optional[float] = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise InvalidParameters("tolerances must be positive")
        if self.max_steps <= 0 or self.max_step <= 0:
            raise InvalidParameters("max_steps and max_step must be positive")


@dataclass(frozen=True)
class EventHit:
    name: str
    t: float
    state: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Integrated solution stored in ascending time with its dense interpolant"""
    t: np.ndarray
    states: np.ndarray
    events_hit: List[EventHit]
    termination: str
    direction: float
    seg_left: np.ndarray = field(repr=False)
    seg_right: np.ndarray = field(repr=False)
    seg_t0: np.ndarray = field(repr=False)
    seg_h: np.ndarray = field(repr=False)
    seg_y0: np.ndarray = field(repr=False)
    seg_q: np.ndarray = field(repr=False)

    @property
    def t_min(self) -> float:
        return float(self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @property
    def start(self) -> np.ndarray:
        """State at the time integration started"""
        return self.states[0] if self.direction > 0 else self.states[-1]

    @property
    def end(self) -> np.ndarray:
        """State where integration stopped"""
        return self.states[-1] if self.direction > 0 else self.states[0]

    def event(self, name: str) -> Optional[EventHit]:
        """First recorded hit of the named event"""
        for hit in self.events_hit:
            if hit.name == name:
                return hit
        return None


class _Recorder:
    """Accumulates accepted steps in integration order"""

    def __init__(self, t0, y0, direction):
        self.direction = direction
        self.times = [t0]
        self.states = [y0.copy()]
        self.segments = []
        self.events: List[EventHit] = []

    def add_step(self, t_old, h, y_old, q, t_new, y_new):
        self.segments.append((min(t_old, t_new), max(t_old, t_new), t_old, h, y_old.copy(), q))
        self.times.append(t_new)
        self.states.append(y_new.copy())

    def build(self, termination) -> Trajectory:
        times, states, segments = self.times, self.states, self.segments
        if self.direction < 0:
            times, states, segments = times[::-1], states[::-1], segments[::-1]
        d = len(states[0])
        if segments:
            left, right, t0, h, y0, q = (np.array(col) for col in zip(*segments))
        else:
            left = right = t0 = h = np.empty(0)
            y0 = np.empty((0, d))
            q = np.empty((0, d, 4))
        return Trajectory(
            t=np.array(times, dtype=float),
            states=np.array(states, dtype=float).reshape(len(states), d),
            events_hit=list(self.events),
            termination=termination,
            direction=self.direction,
            seg_left=left, seg_right=right, seg_t0=t0, seg_h=h,
            seg_y0=y0.reshape(len(segments), d), seg_q=q.reshape(len(segments), d, 4),
        )


def _rms(v):
    return float(np.sqrt(np.mean(np.square(v))))


def _initial_step(fun, t0, y0, f0, direction, cfg):
    """Starting step size from the local scale of the problem"""
    scale = cfg.abs_tol + np.abs(y0) * cfg.rel_tol
    d0 = _rms(y0 / scale)
    d1 = _rms(f0 / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = fun(t0 + h0 * direction, y1)
    d2 = _rms((f1 - f0) / scale) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def _rk_step(fun, t, y, f, h):
    """One Dormand-Prince step; returns new state, its derivative and the stage matrix"""
    K = np.empty((7, y.size))
    K[0] = f
    for s in range(1, 6):
        dy = h * (A[s, :s] @ K[:s])
        K[s] = fun(t + C[s] * h, y + dy)
    y_new = y + h * (B @ K[:6])
    f_new = fun(t + h, y_new)
    K[6] = f_new
    return y_new, f_new, K


def _crossed(g_old, g_new, direction):
    rising = g_old < 0 <= g_new
    falling = g_old > 0 >= g_new
    if direction == 'rising':
        return rising
    if direction == 'falling':
        return falling
    return rising or falling


def integrate(field: Callable, start, t0: float, t1: float,
              cfg: Optional[IntegrationConfig] = None) -> Trajectory:
    """Integrate `field(t, state)` from t0 to t1 (either direction)"""
    cfg = cfg or IntegrationConfig()
    if t0 == t1:
        raise InvalidParameters("t0 and t1 must differ")
    y = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    direction = 1.0 if t1 > t0 else -1.0

    def fun(t, state):
        return np.asarray(field(t, state), dtype=float).reshape(y.shape)

    f = fun(t0, y)
    if not (np.all(np.isfinite(f)) and np.all(np.isfinite(y))):
        raise IntegratorError("vector field is not finite at the start state")

    rec = _Recorder(t0, y, direction)
    h_abs = cfg.first_step or _initial_step(fun, t0, y, f, direction, cfg)
    g_old = [ev.guard(t0, y) for ev in cfg.events]
    t = t0
    err_prev = 1e-4
    steps = rejected = 0
    termination = 't_end_reached'

    while direction * (t1 - t) > 0:
        if steps >= cfg.max_steps:
            raise StepLimit(f"exceeded {cfg.max_steps} steps at t = {t}", trajectory=rec.build('step_limit'))
        h_min = max(MIN_STEP, 10 * np.spacing(abs(t)))
        h_abs = min(h_abs, cfg.max_step)
        step_rejected = False
        while True:
            if h_abs >= abs(t1 - t):
                t_new = t1
            else:
                t_new = t + direction * h_abs
            h = t_new - t
            y_new, f_new, K = _rk_step(fun, t, y, f, h)
            scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
            err = _rms(h * (E @ K) / scale)
            if err <= 1:
                if err == 0:
                    factor = MAX_FACTOR
                else:
                    factor = SAFETY * err ** -PI_ALPHA * err_prev ** PI_BETA
                    factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
                if step_rejected:
                    factor = min(1.0, factor)
                break
            rejected += 1
            step_rejected = True
            h_abs = abs(h) * max(MIN_FACTOR, SAFETY * err ** -0.2)
            if h_abs < h_min:
                raise StepLimit(f"step size fell below {h_min:g} at t = {t}",
                                trajectory=rec.build('step_limit'), reason='step_underflow')

        steps += 1
        if not np.all(np.isfinite(y_new)) or np.linalg.norm(y_new) > BLOW_UP_NORM:
            raise BlowUp(f"state norm exceeded {BLOW_UP_NORM:g} near t = {t_new}",
                         trajectory=rec.build('blow_up'))
        q = K.T @ P

        hits = []
        if cfg.events:
            def dense(tt, t=t, h=h, y=y, q=q):
                theta = (tt - t) / h
                return y + h * (q @ np.array([theta, theta ** 2, theta ** 3, theta ** 4]))

            for i, ev in enumerate(cfg.events):
                g_new = ev.guard(t_new, y_new)
                if _crossed(g_old[i], g_new, ev.direction):
                    if g_new == 0:
                        te = t_new
                    else:
                        lo, hi = min(t, t_new), max(t, t_new)
                        try:
                            te = brentq(lambda s, ev=ev: ev.guard(s, dense(s)), lo, hi,
                                        xtol=EVENT_XTOL, rtol=4 * np.finfo(float).eps)
                        except ValueError:
                            # interpolant endpoint lost the sign change to round-off
                            te = t_new
                    hits.append((direction * te, i, te, dense(te)))
                g_old[i] = g_new
            hits.sort(key=lambda item: item[0])

        stop = None
        for _, i, te, ye in hits:
            ev = cfg.events[i]
            rec.events.append(EventHit(ev.name, te, ye))
            logger.debug("event %s at t = %.12g", ev.name, te)
            if ev.terminal:
                stop = (te, ye)
                break
        if stop is not None:
            rec.add_step(t, h, y, q, stop[0], stop[1])
            termination = 'event'
            break

        rec.add_step(t, h, y, q, t_new, y_new)
        t, y, f = t_new, y_new, f_new
        err_prev = max(err, 1e-4)
        h_abs = abs(h) * factor

    logger.debug("integration finished (%s): %d steps, %d rejected", termination, steps, rejected)
    return rec.build(termination)


def sample(traj: Trajectory, times) -> np.ndarray:
    """Dense states at an array of times, shape (len(times), dim)"""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    lo, hi = traj.t_min, traj.t_max
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if np.any(times < lo - slack) or np.any(times > hi + slack):
        raise OutOfRange(f"requested times outside [{lo}, {hi}]")
    out = np.empty((times.size, traj.dim))
    if traj.seg_left.size == 0:
        out[:] = traj.states[0]
        return out
    j = np.clip(np.searchsorted(traj.seg_left, times, side='right') - 1, 0, traj.seg_left.size - 1)
    theta = (times - traj.seg_t0[j]) / traj.seg_h[j]
    powers = np.stack([theta, theta ** 2, theta ** 3, theta ** 4], axis=1)
    out[:] = traj.seg_y0[j] + traj.seg_h[j][:, None] * np.einsum('kdp,kp->kd', traj.seg_q[j], powers)
    # stored samples are returned exactly
    idx = np.clip(np.searchsorted(traj.t, times), 0, traj.t.size - 1)
    exact = traj.t[idx] == times
    out[exact] = traj.states[idx[exact]]
    return out


def dense_eval(traj: Trajectory, t: float) -> np.ndarray:
    """Interpolated state at time t"""
    return sample(traj, [t])[0]
