"""ε-family construction of complete steady solitons and the non-existence detector.

Case 1 (ρ < 1/2m) integrates dx/dy = F(x, y) from x(0) = 1 + ε, case 2 (ρ >= 1/m)
integrates dx/dz = G(x, z) from x(0) = 1 - ε. The ε -> 0 limit is the trajectory
leaving P = (1, 0) along its unstable direction. The profile is rebuilt by quadrature
along the accepted level; the unstable trajectory itself is integrated as a cross-check.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from itertools import repeat
from typing import List, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from config import (
    ANCHOR_TOL, ANCHOR_WINDOW, EPS_LADDER, FAMILY_GRID_START, GAP_TOL, MAX_SAMPLES,
    ORDER_FLOOR, SAMPLE_DT, SEED_OFFSET, SEED_OMEGA, SPAN_CASE1, SPAN_CASE1_NEGATIVE,
    SPAN_CASE2, SPAN_CIGAR, get_jobs,
)
from errors import (
    AnchoringFailed, BlowUp, InvalidParameters, NoEventWithinSpan, NonpositiveTipCurvature,
    NotConverged, NotSteady, OutOfRegime, ShootingError,
)
from integrator import EventSpec, IntegrationConfig, Trajectory, integrate, sample
from phase_system import (
    SolitonParams, nullcline_h, nullcline_k, scalar_field_F, scalar_field_G, steady_regime,
    unstable_direction,
)
from profile_store import RadialProfile
from warped_geometry import curvature, radial_derivative, relative_residual, tip_value

logger = logging.getLogger(__name__)

GRID_POINTS = 1200
RECONSTRUCT_REL_TOL = 1e-12
RECONSTRUCT_ABS_TOL = 1e-18
PHASE_TIME_LIMIT = 1e5
# family values below this sit at the integrator floor and carry no sign information
UNRESOLVED = ORDER_FLOOR


def _require_steady(p: SolitonParams):
    if p.lam != 0:
        raise NotSteady(f"shooting constructs steady solitons, got lambda = {p.lam}")
    if p.kappa != 1:
        raise InvalidParameters("shooting needs kappa = 1")


def _require_constructible(p: SolitonParams) -> str:
    _require_steady(p)
    regime = steady_regime(p)
    if regime == 'nonexistence':
        raise OutOfRegime(
            f"no complete steady solitons for {p.schouten_rho:g} <= rho < {p.cigar_rho:g} (rho = {p.rho})",
            reason='nonexistence_regime',
        )
    return regime


def default_span(p: SolitonParams) -> float:
    """Extent of |y| (case 1) or z (case 2) used when none is given"""
    if steady_regime(p) == 'case1':
        return SPAN_CASE1 if p.rho >= 0 else SPAN_CASE1_NEGATIVE
    return SPAN_CIGAR if p.is_cigar else SPAN_CASE2


def family_grid(span: float, start: float = FAMILY_GRID_START, points: int = GRID_POINTS) -> np.ndarray:
    if span <= start:
        raise InvalidParameters(f"span must exceed the grid start {start}")
    return np.geomspace(start, span, points)


def epsilon_trajectory(p: SolitonParams, eps: float, span: float) -> Trajectory:
    """Solution x_ε of the scalar phase ODE on [0, span]"""
    regime = _require_constructible(p)
    if not 0 < eps < 1:
        raise InvalidParameters(f"eps must lie in (0, 1), got {eps}")
    if span <= 0:
        raise InvalidParameters("span must be positive")
    if regime == 'case1':
        x0 = 1 + eps

        def field(s, x):
            return scalar_field_F(p, x, s)
    else:
        x0 = 1 - eps

        def field(s, x):
            return scalar_field_G(p, x, s)

    traj = integrate(field, x0, 0.0, span)
    logger.debug("x_eps for eps=%g: %d samples, x(span)=%.6g", eps, traj.t.size, traj.end[0])
    return traj


@dataclass
class EpsilonFamily:
    params: SolitonParams
    regime: str
    epsilons: tuple
    grid: np.ndarray
    values: np.ndarray
    trajectories: List[Trajectory] = field(repr=False)

    @property
    def span(self) -> float:
        return float(self.grid[-1])


def build_family(p: SolitonParams, epsilons: Sequence[float] = EPS_LADDER, span: float = None,
                 jobs: int = 1) -> EpsilonFamily:
    """Integrate every ε-level and sample it on a shared grid"""
    regime = _require_constructible(p)
    epsilons = tuple(sorted(float(e) for e in epsilons)[::-1])
    span = span or default_span(p)
    grid = family_grid(span)
    workers = min(get_jobs(jobs), len(epsilons))
    logger.info("building %s family for n=%d rho=%g over eps=%s (%d workers)",
                regime, p.n, p.rho, epsilons, workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trajectories = list(pool.map(epsilon_trajectory, repeat(p), epsilons, repeat(span)))
    else:
        trajectories = [epsilon_trajectory(p, eps, span) for eps in epsilons]
    values = np.vstack([sample(traj, grid)[:, 0] for traj in trajectories])
    return EpsilonFamily(p, regime, epsilons, grid, values, trajectories)


@dataclass
class FamilyOrderReport:
    ordered: bool
    bounded: bool
    order_violations: list
    bound_violations: list
    floor: float = ORDER_FLOOR

    @property
    def passed(self) -> bool:
        return self.ordered and self.bounded


def check_family_order(fam: EpsilonFamily, floor: float = ORDER_FLOOR) -> FamilyOrderReport:
    """Pointwise ordering of the ε-levels and, in case 1, the bounds h <= x_ε <= 1 + ε"""
    order_violations = []
    # epsilons are stored decreasing: row k+1 has the smaller ε
    for k in range(len(fam.epsilons) - 1):
        larger, smaller = fam.values[k], fam.values[k + 1]
        excess = smaller - larger if fam.regime == 'case1' else larger - smaller
        for i in np.flatnonzero(excess > floor):
            order_violations.append((fam.epsilons[k + 1], fam.epsilons[k], float(fam.grid[i]), float(excess[i])))
    bound_violations = []
    if fam.regime == 'case1':
        h = nullcline_h(fam.params, fam.grid)
        for k, eps in enumerate(fam.epsilons):
            below = h - fam.values[k] > floor
            above = fam.values[k] - (1 + eps) > floor
            for i in np.flatnonzero(below | above):
                bound_violations.append((eps, float(fam.grid[i]), float(fam.values[k][i])))
    report = FamilyOrderReport(not order_violations, not bound_violations, order_violations, bound_violations, floor)
    logger.info("family ordering: ordered=%s bounded=%s", report.ordered, report.bounded)
    return report


@dataclass
class LimitCurve:
    """Accepted ε-level x̄(s) on the family grid

    Between grid points x̄ is Hermite-interpolated with slopes from the scalar
    field; the segment [0, grid[0]] closes at P with the unstable slope. The
    deficit 1 - x̄ has its own spline so the tip keeps full relative precision.
    """
    params: SolitonParams
    regime: str
    grid: np.ndarray
    values: np.ndarray
    gaps: np.ndarray
    gap_history: np.ndarray
    tol: float

    @property
    def span(self) -> float:
        return float(self.grid[-1])

    @property
    def converged(self) -> np.ndarray:
        return self.gaps < self.tol

    def slope_field(self, x, s):
        if self.regime == 'case1':
            return scalar_field_F(self.params, x, s)
        return scalar_field_G(self.params, x, s)

    @property
    def slope_at_P(self) -> float:
        """dx̄/ds at s = 0 along the unstable direction"""
        _, v = unstable_direction(self.params)
        if v[1] == 0 or (v[1] > 0) != (self.regime == 'case1'):
            raise ShootingError(f"unstable direction at P does not move y the {self.regime} way")
        return float(v[0] / abs(v[1]))

    @cached_property
    def _splines(self):
        knots = np.concatenate(([0.0], self.grid))
        x = np.concatenate(([1.0], self.values))
        dx = np.concatenate(([self.slope_at_P], self.slope_field(self.values, self.grid)))
        return CubicHermiteSpline(knots, x, dx), CubicHermiteSpline(knots, 1 - x, -dx)

    def __call__(self, s):
        """Limit curve at y (case 1) or z (case 2)"""
        return self._splines[0](np.clip(s, 0.0, self.span))

    def deficit(self, s):
        """1 - x̄(s)"""
        return self._splines[1](np.clip(s, 0.0, self.span))

    def ode_residual(self) -> np.ndarray:
        """|dx̄/ds - F(x̄, s)| by finite differences on the grid"""
        slope = radial_derivative(self.grid, self.values)
        return np.abs(slope - self.slope_field(self.values, self.grid))

    def within_nullcline_bounds(self, floor: float = ORDER_FLOOR) -> bool:
        """h(y) <= x̄ <= 1 (case 1) or k(z) <= x̂ <= 1 (case 2)"""
        if self.regime == 'case1':
            lower = nullcline_h(self.params, self.grid)
        else:
            lower = nullcline_k(self.params, self.grid)
        return bool(np.all(self.values >= lower - floor) and np.all(self.values <= 1 + floor))


def extract_limit(fam: EpsilonFamily, tol: float = GAP_TOL) -> LimitCurve:
    """Smallest-ε level with its Cauchy gap against the previous one"""
    if len(fam.epsilons) < 3:
        raise InvalidParameters("limit extraction needs at least 3 eps levels")
    order = check_family_order(fam)
    if not order.ordered:
        raise ShootingError(f"eps-family ordering violated at {len(order.order_violations)} grid points")
    history = np.abs(np.diff(fam.values, axis=0))
    gaps = history[-1]
    bad = np.flatnonzero(gaps >= tol)
    if bad.size:
        points = ', '.join(f"{fam.grid[i]:.4g}" for i in bad[:10])
        raise NotConverged(f"Cauchy gap exceeds {tol:g} at {bad.size} grid points ({points})",
                           points=fam.grid[bad].tolist())
    logger.info("limit converged: max gap %.3g at eps=%g", float(gaps.max()), fam.epsilons[-1])
    return LimitCurve(fam.params, fam.regime, fam.grid, fam.values[-1].copy(), gaps, history, tol)


def _augmented_field(p: SolitonParams):
    """Steady field in (u, x, y, ω, r, f) over phase time

    u = 1 - x is carried next to x: 1 - x² is taken from u so the tip keeps full
    relative precision, products use x so its tail decay stays resolved.
    """
    c1, c2, c3, D = p.c1, p.c2, p.c3, p.denom

    def field(t, s):
        u, x, y, w = s[0], s[1], s[2], s[3]
        a = u * (2 - u)
        x_dot = (c1 * a - x * y) / D
        y_dot = (-c2 * a + c3 * x * y) / D
        return np.array([-x_dot, x_dot, y_dot, x * w, w, -y])

    return field


def unstable_trajectory(p: SolitonParams, span: float = None, delta: float = SEED_OFFSET,
                        omega0: float = SEED_OMEGA) -> Trajectory:
    """Trajectory leaving P along its unstable direction until |y| reaches the span"""
    _require_constructible(p)
    span = span or default_span(p)
    eigenvalue, v = unstable_direction(p)
    if v[0] >= 0:
        raise ShootingError("unstable direction at P does not decrease x")
    y0 = delta * v[1] / -v[0]
    start = np.array([delta, 1 - delta, y0, omega0, omega0, 0.0])
    cfg = IntegrationConfig(
        rel_tol=RECONSTRUCT_REL_TOL,
        abs_tol=RECONSTRUCT_ABS_TOL,
        events=[EventSpec('span', lambda t, s: abs(s[2]) - span, 'rising', terminal=True)],
    )
    logger.info("seeding at P + %g*(%.4f, %.4f), eigenvalue %.6g", delta, v[0], v[1], eigenvalue)
    traj = integrate(_augmented_field(p), start, 0.0, PHASE_TIME_LIMIT, cfg)
    if traj.termination != 'event':
        raise ShootingError(f"|y| did not reach {span} before t = {PHASE_TIME_LIMIT}")
    return traj


def cross_check(limit: LimitCurve, trajectory: Trajectory) -> float:
    """Sup deviation of the unstable trajectory of P from the limit curve on the family grid"""
    x, y = trajectory.states[:, 1], trajectory.states[:, 2]
    s = y if limit.regime == 'case1' else -y
    inside = (s >= limit.grid[0]) & (s <= limit.grid[-1])
    if not np.any(inside):
        raise ShootingError("trajectory does not overlap the limit curve's grid")
    deviation = float(np.max(np.abs(x[inside] - limit(s[inside]))))
    if deviation >= limit.tol:
        raise ShootingError(f"unstable trajectory departs from the limit curve by {deviation:.3g}")
    logger.info("unstable trajectory within %.2g of the limit curve", deviation)
    return deviation


def _quadrature_field(p: SolitonParams, limit: LimitCurve):
    """d/dσ of (t, ln ω, r, f) along the limit curve, σ = ln s

    dt = ds/|ẏ| with ẏ taken at (x̄(s), ±s); ω' = xω, dr = ω dt and df = -y dt.
    """
    c2, c3, D = p.c2, p.c3, p.denom
    sign = 1.0 if limit.regime == 'case1' else -1.0

    def field(sigma, state):
        s = math.exp(sigma)
        x, u = float(limit(s)), float(limit.deficit(s))
        y = sign * s
        y_dot = (-c2 * u * (2 - u) + c3 * x * y) / D
        if y_dot == 0:
            raise ShootingError(f"y stalls on the limit curve at s = {s:g}")
        q = s / abs(y_dot)
        return np.array([q, x * q, math.exp(state[1]) * q, -y * q])

    return field


def limit_quadrature(p: SolitonParams, limit: LimitCurve, delta: float = SEED_OFFSET,
                     omega0: float = SEED_OMEGA) -> Trajectory:
    """Phase time, ln ω, r and f along x̄ over σ = ln s up to the span"""
    if limit.params != p:
        raise InvalidParameters("limit curve belongs to different parameters")
    _, v = unstable_direction(p)
    # the seed sits where the unstable direction has moved x by delta
    s0 = delta * abs(v[1] / v[0])
    if not 0 < s0 < limit.grid[0]:
        raise InvalidParameters(f"seed s = {s0:g} must lie in (0, {limit.grid[0]:g})")
    start = np.array([0.0, math.log(omega0), omega0, 0.0])
    cfg = IntegrationConfig(rel_tol=RECONSTRUCT_REL_TOL, abs_tol=RECONSTRUCT_ABS_TOL)
    traj = integrate(_quadrature_field(p, limit), start, math.log(s0), math.log(limit.span), cfg)
    logger.debug("quadrature along the limit curve: %d steps, t in [0, %.4g]", traj.t.size, traj.end[0])
    return traj


def sample_uniform(traj: Trajectory, dt: float = SAMPLE_DT, max_samples: int = MAX_SAMPLES, column: int = None):
    """Samples spaced dt apart in the integration variable, or in a monotone state column

    Returns the integration-variable values and the states there, capped at max_samples.
    """
    clock = traj.t if column is None else traj.states[:, column]
    count = int(math.floor((clock[-1] - clock[0]) / dt)) + 1
    if count > max_samples:
        targets = np.linspace(clock[0], clock[-1], max_samples)
    else:
        targets = clock[0] + dt * np.arange(count)
    times = targets if column is None else np.interp(targets, clock, traj.t)
    return times, sample(traj, times)


def _limit_columns(p: SolitonParams, limit: LimitCurve, sigma: np.ndarray, states: np.ndarray) -> dict:
    s = np.exp(sigma)
    x, u = limit(s), limit.deficit(s)
    y = s if limit.regime == 'case1' else -s
    a = u * (2 - u)
    x_dot = (p.c1 * a - x * y) / p.denom
    y_dot = (-p.c2 * a + p.c3 * x * y) / p.denom
    return {'t': states[:, 0], 'u': u, 'x': x, 'y': y, 'omega': np.exp(states[:, 1]),
            'r': states[:, 2], 'f': states[:, 3], 'x_dot': x_dot, 'y_dot': y_dot}


def _check_invariants(regime: str, cols: dict):
    """Sign invariants of the constructed trajectory

    The x conditions are checked where x is resolved; the cigar tail decays
    like a Gaussian in t and drops below the family's integration floor.
    """
    x, x_dot, y_dot = cols['x'], cols['x_dot'], cols['y_dot']
    resolved = x > UNRESOLVED
    if np.any(x < -UNRESOLVED) or np.any(cols['u'] <= 0):
        raise ShootingError("omega' left [0, 1): sectional curvature is not positive")
    if not np.all(x_dot[resolved] < 0):
        raise ShootingError("x is not decreasing along the trajectory")
    if regime == 'case1' and not np.all(y_dot > 0):
        raise ShootingError("y is not strictly increasing along the case-1 trajectory")
    if regime == 'case2' and not np.all(y_dot < 0):
        raise ShootingError("y is not strictly decreasing along the case-2 trajectory")


def _anchor(r: np.ndarray, omega: np.ndarray, u: np.ndarray):
    """Fit ω ≈ slope (r - r_*) on the tip window"""
    window = max(3, int(ANCHOR_WINDOW * r.size))
    mask = np.zeros(r.size, dtype=bool)
    mask[:window] = True
    mask &= u < 1e-4
    if np.sum(mask) < 3:
        raise AnchoringFailed("too few samples near the tip to anchor omega")
    slope, intercept = np.polyfit(r[mask], omega[mask], 1)
    if abs(slope - 1) >= ANCHOR_TOL:
        raise AnchoringFailed(f"omega does not close smoothly at the tip (slope {slope:.6g})")
    return float(slope), float(-intercept / slope)


def reconstruct_profile(p: SolitonParams, limit: LimitCurve, dt: float = SAMPLE_DT) -> RadialProfile:
    """Rebuild (r, ω, f) by quadrature along the limit curve x̄"""
    traj = limit_quadrature(p, limit)
    sigma, states = sample_uniform(traj, dt, column=0)
    cols = _limit_columns(p, limit, sigma, states)
    _check_invariants(limit.regime, cols)

    w, x, y = cols['omega'], cols['x'], cols['y']
    omega_pp = cols['x_dot'] / w
    f_pp = -(cols['y_dot'] - x * y) / w ** 2
    slope, r_tip = _anchor(cols['r'], w, cols['u'])
    r = cols['r'] - r_tip
    f = cols['f'] - tip_value(r, cols['f'])
    prof = RadialProfile(
        params=p, r=r, omega=w, omega_p=x, omega_pp=omega_pp,
        f=f, f_p=-y / w, f_pp=f_pp, normalization='raw', tip=0.0,
    )
    logger.info("reconstructed %d samples, r in [%.3g, %.4g], anchor slope %.8f",
                r.size, r[0], r[-1], slope)
    return prof


def rescale_profile(prof: RadialProfile, c: float) -> RadialProfile:
    """Homothety g -> c²g: r -> cr, ω -> cω, λ -> λ/c²"""
    if c <= 0:
        raise InvalidParameters("scale factor must be positive")
    return prof.replace(
        params=prof.params.with_lambda(prof.params.lam / c ** 2),
        r=prof.r * c,
        omega=prof.omega * c,
        omega_pp=prof.omega_pp / c,
        f_p=prof.f_p / c,
        f_pp=prof.f_pp / c ** 2,
        tip=prof.tip * c,
    )


def tip_scalar_curvature(prof: RadialProfile) -> float:
    report = curvature(prof)
    return tip_value(report.r, report.R, prof.tip)


def normalize_profile(prof: RadialProfile) -> RadialProfile:
    """Rescale so that the scalar curvature at the tip is 1"""
    R0 = tip_scalar_curvature(prof)
    if not math.isfinite(R0) or R0 <= 0:
        raise NonpositiveTipCurvature(f"tip scalar curvature extrapolates to {R0}")
    return rescale_profile(prof, math.sqrt(R0)).replace(normalization='R_at_origin_one')


@dataclass
class ConstructionReport:
    params: SolitonParams
    regime: str
    epsilons: tuple
    span: float
    max_gap: float
    ordered: bool
    tip_R: float
    residual: float
    samples: int
    normalization: str
    unstable_deviation: float = None
    trajectory: Trajectory = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            'params': self.params.to_dict(),
            'regime': self.regime,
            'epsilons': list(self.epsilons),
            'span': self.span,
            'max_gap': self.max_gap,
            'ordered': self.ordered,
            'tip_R': self.tip_R,
            'residual': self.residual,
            'samples': self.samples,
            'normalization': self.normalization,
            'unstable_deviation': self.unstable_deviation,
        }


def construct_steady(p: SolitonParams, epsilons: Sequence[float] = EPS_LADDER, span: float = None,
                     normalize: bool = False, tol: float = GAP_TOL, jobs: int = 1):
    """ε-family -> limit curve -> profile, optionally normalized to R(O) = 1"""
    regime = _require_constructible(p)
    span = span or default_span(p)
    fam = build_family(p, epsilons, span, jobs)
    limit = extract_limit(fam, tol)
    prof = reconstruct_profile(p, limit)
    traj = unstable_trajectory(p, span=span)
    deviation = cross_check(limit, traj)
    if normalize:
        prof = normalize_profile(prof)
    report = ConstructionReport(
        params=p, regime=regime, epsilons=fam.epsilons, span=span,
        max_gap=float(limit.gaps.max()), ordered=True,
        tip_R=tip_scalar_curvature(prof), residual=relative_residual(prof),
        samples=len(prof), normalization=prof.normalization,
        unstable_deviation=deviation, trajectory=traj,
    )
    logger.info("constructed %s soliton n=%d rho=%g: %s", regime, p.n, p.rho, report.to_dict())
    return prof, report


@dataclass
class NonexistenceReport:
    params: SolitonParams
    mode: str
    integrated: bool
    t_event: Optional[float] = None
    state: Optional[list] = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'params': self.params.to_dict(),
            'mode': self.mode,
            'integrated': self.integrated,
            't_event': self.t_event,
            'state': self.state,
            'details': self.details,
        }


def _steady_plane_field(p: SolitonParams):
    c1, c2, c3, D = p.c1, p.c2, p.c3, p.denom

    def field(t, s):
        x, y = s
        a = 1 - x * x
        return np.array([(c1 * a - x * y) / D, (-c2 * a + c3 * x * y) / D])

    return field


def verify_nonexistence(p: SolitonParams, eps: float = SEED_OFFSET, t_span: float = 200.0) -> NonexistenceReport:
    """Exhibit the obstruction that rules out complete steady solitons for 1/2m <= ρ < 1/m"""
    _require_steady(p)
    if steady_regime(p) != 'nonexistence':
        raise OutOfRegime(f"rho = {p.rho} lies outside [1/2m, 1/m)")
    if p.is_schouten:
        # the divergence identity forces R_rr = 0, incompatible with R_rr > 0
        return NonexistenceReport(p, 'schouten_constraint', integrated=False,
                                  details={'constraint': 'R_rr * f\' = 0'})

    field_xy = _steady_plane_field(p)
    if p.is_traceless:
        # y and its time derivative have opposite signs near P, so |y| grows backwards in t
        growth = {}
        monotone = True
        escape = EventSpec('escape', lambda t, s: abs(s[1]) - 1e6, 'rising', terminal=True)
        for sign in (1, -1):
            cfg = IntegrationConfig(events=[escape])
            try:
                traj = integrate(field_xy, [1 - eps, sign * eps], 0.0, -t_span, cfg)
            except BlowUp as err:
                traj = err.trajectory
            # integration order is descending in t
            xs, ys = traj.states[::-1, 0], np.abs(traj.states[::-1, 1])
            keep = xs > 0
            monotone &= bool(np.all(np.diff(ys[keep]) > 0))
            growth['plus' if sign > 0 else 'minus'] = float(ys[keep][-1] / eps)
        mode = 'y_sign' if monotone else 'undetermined'
        logger.info("rho = 1/n: backward |y| growth %s (monotone=%s)", growth, monotone)
        return NonexistenceReport(p, mode, integrated=True,
                                  details={'backward_growth': growth, 'monotone': monotone})

    _, v = unstable_direction(p)
    start = np.array([1.0, 0.0]) + eps / -v[0] * v
    cfg = IntegrationConfig(events=[EventSpec('x_zero', lambda t, s: s[0], 'falling', terminal=True)])
    traj = integrate(field_xy, start, 0.0, t_span, cfg)
    hit = traj.event('x_zero')
    if hit is None:
        raise NoEventWithinSpan(f"x = 0 not reached within t_span = {t_span}")
    logger.info("x = 0 reached at t = %.6g for rho = %g", hit.t, p.rho)
    return NonexistenceReport(p, 'x_crossing', integrated=True, t_event=float(hit.t),
                              state=[float(v_) for v_ in hit.state],
                              details={'seed': start.tolist()})
