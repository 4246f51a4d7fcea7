"""Pointwise geometry of warped products dr² + ω(r)² g_can with Ric_can = (m-1)κ g_can."""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.special import gamma

from config import GAUSS_TOL, IDENTITY_TOL, RESIDUAL_TOL, TIP_CLEARANCE, TIP_SINGULAR
from errors import CriticalLevel, InvalidParameters, OutOfRange, TipSingular
from profile_store import RadialProfile

logger = logging.getLogger(__name__)

# 4th-order stencils on five consecutive samples
D1_CENTER = np.array([1, -8, 0, 8, -1]) / 12
D1_EDGE = (np.array([-25, 48, -36, 16, -3]) / 12, np.array([-3, -10, 18, -6, 1]) / 12)
D1_TAIL = (np.array([-1, 6, -18, 10, 3]) / 12, np.array([3, -16, 36, -48, 25]) / 12)
D2_CENTER = np.array([-1, 16, -30, 16, -1]) / 12
D2_EDGE = (np.array([35, -104, 114, -56, 11]) / 12, np.array([11, -20, 6, 4, -1]) / 12)
D2_TAIL = (np.array([-1, 4, 6, -20, 11]) / 12, np.array([11, -56, 114, -104, 35]) / 12)


def _index_derivative(v, center, edge, tail):
    v = np.asarray(v, dtype=float)
    if v.size < 5:
        raise InvalidParameters("finite differences need at least 5 samples")
    out = np.empty_like(v)
    out[2:-2] = sum(w * v[k:v.size - 4 + k] for k, w in enumerate(center))
    out[0] = edge[0] @ v[:5]
    out[1] = edge[1] @ v[:5]
    out[-2] = tail[0] @ v[-5:]
    out[-1] = tail[1] @ v[-5:]
    return out


def radial_derivative(r, v):
    """dv/dr on a non-uniform grid via index-space stencils and the chain rule"""
    r_s = _index_derivative(r, D1_CENTER, D1_EDGE, D1_TAIL)
    v_s = _index_derivative(v, D1_CENTER, D1_EDGE, D1_TAIL)
    return v_s / r_s


def radial_second_derivative(r, v):
    """d²v/dr² on a non-uniform grid"""
    r_s = _index_derivative(r, D1_CENTER, D1_EDGE, D1_TAIL)
    r_ss = _index_derivative(r, D2_CENTER, D2_EDGE, D2_TAIL)
    v_s = _index_derivative(v, D1_CENTER, D1_EDGE, D1_TAIL)
    v_ss = _index_derivative(v, D2_CENTER, D2_EDGE, D2_TAIL)
    return (v_ss - v_s * r_ss / r_s) / r_s ** 2


def relative_gap(residual, *terms):
    """|residual| over the largest term magnitude, per sample"""
    scale = np.max(np.abs(np.vstack(terms)), axis=0)
    out = np.zeros_like(residual, dtype=float)
    nz = scale > 0
    out[nz] = np.abs(residual[nz]) / scale[nz]
    out[~nz] = np.abs(residual[~nz])
    return out


def _regular_mask(prof: RadialProfile) -> np.ndarray:
    mask = prof.omega >= TIP_SINGULAR
    if not np.any(mask):
        raise TipSingular("every sample has a vanishing warping factor")
    if not np.all(mask):
        logger.info("excluding %d tip-singular samples", int(np.sum(~mask)))
    return mask


def sphere_area(n: int) -> float:
    """Area of the unit (n-1)-sphere"""
    return 2 * np.pi ** (n / 2) / gamma(n / 2)


def tip_value(r, v, r_tip=0.0):
    """Quadratic extrapolation of the first three samples to the tip"""
    coeffs = np.polyfit(r[:3], v[:3], 2)
    return float(np.polyval(coeffs, r_tip))


@dataclass
class CurvatureReport:
    r: np.ndarray
    R: np.ndarray
    R_trace: np.ndarray
    Ric_rr: np.ndarray
    Ric_sph: np.ndarray
    K_rad: np.ndarray
    K_sph: np.ndarray
    H: np.ndarray
    R_sigma: np.ndarray
    residual_1: np.ndarray
    residual_2: np.ndarray
    excluded: List[float] = field(default_factory=list)

    @property
    def tip_R(self) -> float:
        return tip_value(self.r, self.R)

    def trace_deviation(self) -> float:
        """Relative gap between the scalar formula and the assembled trace"""
        return float(np.max(relative_gap(self.R - self.R_trace, self.R, self.R_trace)))


def curvature(prof: RadialProfile) -> CurvatureReport:
    p = prof.params
    m = p.m
    mask = _regular_mask(prof)
    w, wp, wpp = prof.omega[mask], prof.omega_p[mask], prof.omega_pp[mask]
    k_rad = -wpp / w
    k_sph = (p.kappa - wp ** 2) / w ** 2
    ric_rr = m * k_rad
    ric_sph = ((m - 1) * (p.kappa - wp ** 2) - w * wpp) / w ** 2
    R = -2 * m * wpp / w + m * (m - 1) * (p.kappa - wp ** 2) / w ** 2
    res1, res2 = soliton_residual(prof)
    return CurvatureReport(
        r=prof.r[mask],
        R=R,
        R_trace=ric_rr + m * ric_sph,
        Ric_rr=ric_rr,
        Ric_sph=ric_sph,
        K_rad=k_rad,
        K_sph=k_sph,
        H=m * wp / w,
        R_sigma=m * (m - 1) * p.kappa / w ** 2,
        residual_1=res1[mask],
        residual_2=res2[mask],
        excluded=prof.r[~mask].tolist(),
    )


@dataclass
class HessianReport:
    r: np.ndarray
    f_pp: np.ndarray
    laplacian: np.ndarray
    excluded: List[float] = field(default_factory=list)


def hessian_laplacian(prof: RadialProfile) -> HessianReport:
    """f'' and Δf = f'' + m(ω'/ω) f'"""
    mask = _regular_mask(prof)
    lap = prof.f_pp[mask] + prof.params.m * prof.omega_p[mask] / prof.omega[mask] * prof.f_p[mask]
    return HessianReport(r=prof.r[mask], f_pp=prof.f_pp[mask], laplacian=lap,
                         excluded=prof.r[~mask].tolist())


def _residual_terms(prof: RadialProfile):
    p = prof.params
    m, rho, lam, kappa = p.m, p.rho, p.lam, p.kappa
    w, wp, wpp = prof.omega, prof.omega_p, prof.omega_pp
    terms_1 = (
        prof.f_pp * w ** 2,
        -(m - 2 * m * rho) * w * wpp,
        m * (m - 1) * rho * wp ** 2,
        -lam * w ** 2,
        np.full_like(w, -m * (m - 1) * rho * kappa),
    )
    terms_2 = (
        prof.f_p * w * wp,
        -(1 - 2 * m * rho) * w * wpp,
        -(m - 1) * (1 - m * rho) * wp ** 2,
        -lam * w ** 2,
        np.full_like(w, (m - 1) * (1 - m * rho) * kappa),
    )
    return terms_1, terms_2


def soliton_residual(prof: RadialProfile) -> Tuple[np.ndarray, np.ndarray]:
    """Left-hand sides of the two reduced soliton equations"""
    terms_1, terms_2 = _residual_terms(prof)
    return sum(terms_1), sum(terms_2)


def relative_residual(prof: RadialProfile) -> float:
    """Sup over samples of both residuals relative to their largest term"""
    terms_1, terms_2 = _residual_terms(prof)
    rel_1 = relative_gap(sum(terms_1), *terms_1)
    rel_2 = relative_gap(sum(terms_2), *terms_2)
    return float(max(rel_1.max(), rel_2.max()))


def is_soliton(prof: RadialProfile, tol: float = RESIDUAL_TOL) -> bool:
    return relative_residual(prof) < tol


@dataclass
class IdentityReport:
    r: np.ndarray
    equ1: np.ndarray
    equ2: np.ndarray
    equ3: np.ndarray
    schouten: np.ndarray = None
    tip_clearance: float = TIP_CLEARANCE
    tol: float = IDENTITY_TOL

    def sup(self) -> dict:
        out = {
            'equ1': float(np.max(self.equ1)),
            'equ2': float(np.max(self.equ2)),
            'equ3': float(np.max(self.equ3)),
        }
        if self.schouten is not None:
            out['schouten_ric_grad_f'] = float(np.max(self.schouten))
        return out

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.sup().values())


@dataclass
class RadialWindow:
    """Regular part of a profile with its curvature, dR/dr and the sample mask used by FD checks"""
    profile: RadialProfile
    curvature: CurvatureReport
    dR: np.ndarray
    keep: np.ndarray
    clearance: float


def radial_window(prof: RadialProfile, tip_clearance: float = TIP_CLEARANCE) -> RadialWindow:
    mask = _regular_mask(prof)
    idx = np.flatnonzero(mask)
    if idx.size < 9:
        raise InvalidParameters("identity checks need at least 9 regular samples")
    sub = prof.replace(**{name: getattr(prof, name)[idx[0]:idx[-1] + 1]
                          for name in ('r', 'omega', 'omega_p', 'omega_pp', 'f', 'f_p', 'f_pp')})
    curv = curvature(sub)
    clearance = min(tip_clearance, 0.5 * float(np.max(sub.omega)))
    keep = sub.omega >= clearance
    keep[:2] = False
    keep[-2:] = False
    return RadialWindow(sub, curv, radial_derivative(sub.r, curv.R), keep, clearance)


def identity_checks(prof: RadialProfile, tip_clearance: float = TIP_CLEARANCE,
                    tol: float = IDENTITY_TOL) -> IdentityReport:
    """Radial forms of the trace, divergence and Laplacian identities of the soliton"""
    p = prof.params
    m, n, rho, lam = p.m, p.n, p.rho, p.lam
    win = radial_window(prof, tip_clearance)
    sub, curv, dR, keep = win.profile, win.curvature, win.dR, win.keep
    R, ric_rr, ric_sph = curv.R, curv.Ric_rr, curv.Ric_sph
    w, wp, fp = sub.omega, sub.omega_p, sub.f_p
    lap_f = hessian_laplacian(sub).laplacian
    ddR = radial_second_derivative(sub.r, R)
    lap_R = ddR + m * wp / w * dR
    ric_sq = ric_rr ** 2 + m * ric_sph ** 2

    equ1 = relative_gap(lap_f - (n * rho - 1) * R - n * lam, lap_f, (n * rho - 1) * R, np.full_like(R, n * lam))
    # |Ric||∇f| bounds Ric(∇f, ·) and sets the scale where both sides vanish
    grad_scale = 2 * np.sqrt(ric_sq) * np.abs(fp)
    equ2 = relative_gap(p.denom * dR - 2 * ric_rr * fp, p.denom * dR, 2 * ric_rr * fp, grad_scale)
    rhs3 = dR * fp + 2 * (rho * R ** 2 - ric_sq + lam * R)
    equ3 = relative_gap(p.denom * lap_R - rhs3, p.denom * ddR, p.denom * m * wp / w * dR,
                        dR * fp, 2 * rho * R ** 2, 2 * ric_sq, 2 * lam * R)

    schouten = np.abs(ric_rr * fp)[keep] if p.is_schouten else None
    report = IdentityReport(r=sub.r[keep], equ1=equ1[keep], equ2=equ2[keep], equ3=equ3[keep],
                            schouten=schouten, tip_clearance=win.clearance, tol=tol)
    logger.info("identity sup deviations: %s", report.sup())
    return report


@dataclass
class LevelSetReport:
    r: np.ndarray
    grad_f: np.ndarray
    H: np.ndarray
    h_norm2: np.ndarray
    h_norm2_riccati: np.ndarray
    R_sigma_gauss: np.ndarray
    R_sigma_direct: np.ndarray
    excluded: List[float] = field(default_factory=list)

    def gauss_gap(self) -> float:
        """max |R^Σ(Gauss) - R^Σ(direct)| / (1 + |R^Σ(direct)|)"""
        gap = np.abs(self.R_sigma_gauss - self.R_sigma_direct) / (1 + np.abs(self.R_sigma_direct))
        return float(np.max(gap))

    @property
    def passed(self) -> bool:
        return self.gauss_gap() < GAUSS_TOL


def level_set_geometry(prof: RadialProfile) -> LevelSetReport:
    """Second fundamental form, mean curvature and induced scalar curvature of the r-levels"""
    p = prof.params
    m = p.m
    regular = _regular_mask(prof)
    critical = prof.f_p == 0
    mask = regular & ~critical
    if not np.any(mask):
        raise CriticalLevel("f' vanishes at every regular sample")
    if np.any(critical & regular):
        logger.info("excluding %d critical samples (f' = 0)", int(np.sum(critical & regular)))
    w, wp, wpp = prof.omega[mask], prof.omega_p[mask], prof.omega_pp[mask]
    H = m * wp / w
    dH = m * (wpp / w - wp ** 2 / w ** 2)
    ric_rr = -m * wpp / w
    R = -2 * m * wpp / w + m * (m - 1) * (p.kappa - wp ** 2) / w ** 2
    h2_riccati = -dH - ric_rr
    return LevelSetReport(
        r=prof.r[mask],
        grad_f=np.abs(prof.f_p[mask]),
        H=H,
        h_norm2=m * (wp / w) ** 2,
        h_norm2_riccati=h2_riccati,
        R_sigma_gauss=R - 2 * ric_rr - h2_riccati + H ** 2,
        R_sigma_direct=m * (m - 1) * p.kappa / w ** 2,
        excluded=prof.r[~mask].tolist(),
    )


def volume_profile(prof: RadialProfile) -> np.ndarray:
    """Volume of B_r(O) at every sample, O being the profile tip"""
    n = prof.params.n
    integrand = prof.omega ** (n - 1)
    volume = cumulative_trapezoid(integrand, prof.r, initial=0.0)
    gap = prof.r[0] - prof.tip
    if gap > 0:
        # closure ω ≈ s between the tip and the first sample
        volume = volume + integrand[0] * gap / n
    return sphere_area(n) * volume


def ball_volume(prof: RadialProfile, r: float) -> float:
    """Volume of the ball of radius r about the tip"""
    end = prof.r[-1] - prof.tip
    if r < 0 or r > end:
        raise OutOfRange(f"radius {r} outside [0, {end}]")
    n = prof.params.n
    if r < prof.r[0] - prof.tip:
        return float(sphere_area(n) * r ** n / n)
    return float(np.interp(prof.tip + r, prof.r, volume_profile(prof)))


def derivative_consistency(prof: RadialProfile) -> dict:
    """Finite-difference cross-check of the carried derivative columns"""
    def gap(carried, values):
        estimate = radial_derivative(prof.r, values)[2:-2]
        carried = carried[2:-2]
        scale = max(1.0, float(np.max(np.abs(carried))))
        return float(np.max(np.abs(carried - estimate))) / scale

    checks = {
        'omega_p': gap(prof.omega_p, prof.omega),
        'omega_pp': gap(prof.omega_pp, prof.omega_p),
        'f_p': gap(prof.f_p, prof.f),
        'f_pp': gap(prof.f_pp, prof.f_p),
    }
    logger.debug("derivative consistency: %s", checks)
    return checks
