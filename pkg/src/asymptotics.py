"""Predicted and fitted growth exponents of complete steady solitons."""
import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.stats import linregress

from config import (
    CIGAR_FLATNESS, F_EXP_TOL, LIMIT_MIN_TAIL, LIMIT_TOL, OMEGA_EXP_TOL, TAIL_FRACTION, TIP_SINGULAR,
    TAIL_SENSITIVITY, VOL_EXP_TOL,
)
from errors import InvalidParameters, NonpositiveData, NotSteady, OutOfRegime, TailTooShort
from integrator import Trajectory
from phase_system import SolitonParams, steady_regime
from profile_store import RadialProfile
from warped_geometry import volume_profile

logger = logging.getLogger(__name__)

# x below this sits at the integrator's absolute tolerance and is left out of decay fits
X_FLOOR = 1e-14


@dataclass(frozen=True)
class AsymptoticPrediction:
    n: int
    rho: float
    omega_exp: float
    f_exp: float
    vol_exp: float
    regime: str

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            'rho': self.rho,
            'regime': self.regime,
            'omega_exp': self.omega_exp,
            'f_exp': self.f_exp,
            'vol_exp': self.vol_exp,
        }


def predicted_exponents(p: SolitonParams) -> AsymptoticPrediction:
    """Growth exponents of ω, |f| and Vol(B_r(O)) for a steady soliton"""
    if p.lam != 0:
        raise NotSteady("growth exponents are predicted for steady solitons")
    if math.isinf(p.rho):
        w = 1 / 3
        return AsymptoticPrediction(p.n, p.rho, w, 4 / 3, p.m * w + 1, 'power_law')
    if steady_regime(p) == 'nonexistence':
        raise OutOfRegime(f"no complete steady solitons for rho = {p.rho}", reason='nonexistence_regime')
    if p.is_cigar:
        return AsymptoticPrediction(p.n, p.rho, 0.0, 2.0, 1.0, 'cigar')
    mr = p.m * p.rho
    w = (1 - mr) / (2 - 3 * mr)
    return AsymptoticPrediction(p.n, p.rho, w, (2 - 4 * mr) / (2 - 3 * mr), p.m * w + 1, 'power_law')


class ExponentFit(NamedTuple):
    exponent: float
    stderr: float


def _tail(size: int, tail_fraction: float) -> slice:
    if not 0 < tail_fraction <= 0.5:
        raise InvalidParameters(f"tail fraction must lie in (0, 0.5], got {tail_fraction}")
    count = max(3, int(math.ceil(tail_fraction * size)))
    if count > size:
        raise InvalidParameters(f"need at least 3 samples, got {size}")
    return slice(size - count, size)


def fit_exponent(r, v, tail_fraction: float = TAIL_FRACTION) -> ExponentFit:
    """Least-squares slope of log v against log r over the tail of the samples"""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    tail = _tail(r.size, tail_fraction)
    rt, vt = r[tail], v[tail]
    if np.any(rt <= 0) or np.any(vt <= 0):
        raise NonpositiveData("log-log fit needs positive r and v on the tail")
    fit = linregress(np.log(rt), np.log(vt))
    return ExponentFit(float(fit.slope), float(fit.stderr))


def _profile_series(prof: RadialProfile):
    """Distance from the tip with ω, |f| and the ball volume, restricted to r > tip"""
    s = prof.r - prof.tip
    keep = s > 0
    return {
        'omega': (s[keep], prof.omega[keep]),
        'f': (s[keep], np.abs(prof.f[keep])),
        'volume': (s[keep], volume_profile(prof)[keep]),
    }


@dataclass
class ExponentReport:
    prediction: AsymptoticPrediction
    tail_fraction: float
    rows: list
    r_span: tuple

    @property
    def passed(self) -> bool:
        return all(row['passed'] for row in self.rows)

    def worst(self) -> dict:
        return max(self.rows, key=lambda row: row['error'] / row['tolerance'])

    def to_dict(self) -> dict:
        return {
            'prediction': self.prediction.to_dict(),
            'tail_fraction': self.tail_fraction,
            'r_span': list(self.r_span),
            'exponents': self.rows,
            'passed': self.passed,
        }


def exponent_report(prof: RadialProfile, tail_fraction: float = TAIL_FRACTION) -> ExponentReport:
    """Predicted vs fitted exponents, refitted at the sensitivity fractions"""
    pred = predicted_exponents(prof.params)
    series = _profile_series(prof)
    targets = (
        ('omega', pred.omega_exp, OMEGA_EXP_TOL),
        ('f', pred.f_exp, F_EXP_TOL),
        ('volume', pred.vol_exp, VOL_EXP_TOL),
    )
    rows = []
    for name, predicted, tol in targets:
        r, v = series[name]
        fit = fit_exponent(r, v, tail_fraction)
        sensitivity = {str(frac): fit_exponent(r, v, frac).exponent for frac in TAIL_SENSITIVITY}
        values = [fit.exponent, *sensitivity.values()]
        error = abs(fit.exponent - predicted)
        rows.append({
            'quantity': name,
            'predicted': predicted,
            'fitted': fit.exponent,
            'stderr': fit.stderr,
            'error': error,
            'tolerance': tol,
            'passed': error < tol,
            'sensitivity': sensitivity,
            'spread': max(values) - min(values),
        })
    r_all = series['omega'][0]
    report = ExponentReport(pred, tail_fraction, rows, (float(r_all[0]), float(r_all[-1])))
    logger.info("exponents for n=%d rho=%g: %s", pred.n, pred.rho,
                {row['quantity']: round(row['fitted'], 5) for row in rows})
    return report


@dataclass
class LimitDiagnostics:
    params: SolitonParams
    t_tail: tuple
    estimates: dict
    predicted: dict
    origin_free: dict
    x_decay: float = None
    tol: float = LIMIT_TOL
    errors: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(err < self.tol for err in self.errors.values())

    def to_dict(self) -> dict:
        return {
            'params': self.params.to_dict(),
            't_tail': list(self.t_tail),
            'estimates': self.estimates,
            'origin_free': self.origin_free,
            'predicted': self.predicted,
            'x_gaussian_rate': self.x_decay,
            'errors': self.errors,
            'tol': self.tol,
            'passed': self.passed,
        }


def _xy_columns(traj: Trajectory):
    if traj.dim == 6:
        return traj.states[:, 1], traj.states[:, 2]
    if traj.dim in (2, 3):
        return traj.states[:, 0], traj.states[:, 1]
    raise InvalidParameters(f"cannot read (x, y) from a {traj.dim}-dimensional trajectory")


def limit_diagnostics(traj: Trajectory, p: SolitonParams, tail_fraction: float = TAIL_FRACTION) -> LimitDiagnostics:
    """Tail estimates of y/t, t·x and x·y against their limits"""
    x, y = _xy_columns(traj)
    return _diagnose(p, traj.t, x, y, tail_fraction)


def profile_limit_diagnostics(prof: RadialProfile, tail_fraction: float = TAIL_FRACTION) -> LimitDiagnostics:
    """Same diagnostics with x = ω', y = -ωf' and t = ∫dr/ω read off a profile"""
    keep = prof.omega > TIP_SINGULAR
    r, w = prof.r[keep], prof.omega[keep]
    t = cumulative_trapezoid(1 / w, r, initial=0.0)
    return _diagnose(prof.params, t, prof.omega_p[keep], -w * prof.f_p[keep], tail_fraction)


def _diagnose(p: SolitonParams, t, x, y, tail_fraction) -> LimitDiagnostics:
    if p.lam != 0:
        raise NotSteady("limit diagnostics concern steady trajectories")
    if steady_regime(p) == 'nonexistence':
        raise OutOfRegime(f"no complete steady trajectory for rho = {p.rho}", reason='nonexistence_regime')
    t, x, y = (np.asarray(v, dtype=float) for v in (t, x, y))
    start = t[0] + (1 - tail_fraction) * (t[-1] - t[0])
    tail = t >= start
    if np.sum(tail) < LIMIT_MIN_TAIL or t[-1] <= 0:
        raise TailTooShort(f"only {int(np.sum(tail))} samples in the last {tail_fraction:.0%} of phase time")

    a = 1 - x * x
    x_dot = (p.c1 * a - x * y) / p.denom
    y_dot = (-p.c2 * a + p.c3 * x * y) / p.denom
    predicted = {
        'y_over_t': (p.n - 2) * p.denom,
        't_times_x': (1 - p.m * p.rho) / p.denom,
        'x_times_y': p.c1,
    }
    estimates = {
        'y_over_t': float(y[-1] / t[-1]),
        't_times_x': float(t[-1] * x[-1]),
        'x_times_y': float(x[-1] * y[-1]),
    }
    # derivative forms do not depend on where phase time starts
    resolved = tail & (x > 0) & (x_dot < 0)
    origin_free = {
        'y_over_t': float(np.mean(y_dot[tail])),
        't_times_x': float(np.median(x[resolved] ** 2 / -x_dot[resolved])) if np.any(resolved) else 0.0,
    }
    errors = {
        'y_over_t': abs(origin_free['y_over_t'] - predicted['y_over_t']) / max(1.0, abs(predicted['y_over_t'])),
        't_times_x': abs(origin_free['t_times_x'] - predicted['t_times_x']) / max(1.0, abs(predicted['t_times_x'])),
        'x_times_y': abs(estimates['x_times_y'] - predicted['x_times_y']) / max(1.0, abs(predicted['x_times_y'])),
    }

    x_decay = None
    if p.is_cigar:
        # ln x ≈ -(n-2) t²/2 + lower order
        fit_mask = (x > X_FLOOR) & (x < 1e-3)
        if np.sum(fit_mask) >= LIMIT_MIN_TAIL:
            x_decay = float(np.polyfit(t[fit_mask], np.log(x[fit_mask]), 2)[0])
            expected = -(p.n - 2) / 2
            errors['x_gaussian_rate'] = abs(x_decay - expected) / abs(expected)
            predicted['x_gaussian_rate'] = expected

    report = LimitDiagnostics(p, (float(start), float(t[-1])), estimates, predicted, origin_free,
                              x_decay=x_decay, errors=errors)
    logger.info("limit diagnostics n=%d rho=%g: %s vs %s", p.n, p.rho, origin_free, predicted)
    return report


@dataclass
class CigarReport:
    omega_mean: float
    omega_oscillation: float
    f_fit: ExponentFit
    volume_fit: ExponentFit
    flatness: float = CIGAR_FLATNESS

    @property
    def flat(self) -> bool:
        return self.omega_oscillation < self.flatness

    @property
    def passed(self) -> bool:
        return (self.flat
                and abs(self.f_fit.exponent - 2) < F_EXP_TOL
                and abs(self.volume_fit.exponent - 1) < VOL_EXP_TOL)

    def to_dict(self) -> dict:
        return {
            'omega_tail_mean': self.omega_mean,
            'omega_oscillation': self.omega_oscillation,
            'omega_flat': self.flat,
            'f_exponent': self.f_fit.exponent,
            'f_stderr': self.f_fit.stderr,
            'volume_exponent': self.volume_fit.exponent,
            'volume_stderr': self.volume_fit.stderr,
            'passed': self.passed,
        }


def cigar_checks(prof: RadialProfile, tail_fraction: float = TAIL_FRACTION) -> CigarReport:
    """Bounded ω, quadratic f and linear volume growth of a cigar-type profile"""
    p = prof.params
    if p.lam != 0 or not p.is_cigar:
        raise OutOfRegime(f"cigar checks need a steady profile with rho = 1/m = {p.cigar_rho}")
    series = _profile_series(prof)
    w = series['omega'][1][_tail(series['omega'][1].size, tail_fraction)]
    mean = float(np.mean(w))
    report = CigarReport(
        omega_mean=mean,
        omega_oscillation=float((w.max() - w.min()) / mean),
        f_fit=fit_exponent(*series['f'], tail_fraction),
        volume_fit=fit_exponent(*series['volume'], tail_fraction),
    )
    logger.info("cigar checks: %s", report.to_dict())
    return report
