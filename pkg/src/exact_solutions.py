"""Closed-form warped solutions: cylinders, flat Gaussian-type solitons and local Schouten shrinkers."""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from errors import GaugeViolation, InvalidParameters, OutOfRegime
from phase_system import SolitonParams
from profile_store import RadialProfile
from warped_geometry import curvature

logger = logging.getLogger(__name__)

DEFAULT_EXTENT = 10.0
DEFAULT_SAMPLES = 401
GAUGE_TOL = 1e-10
MARGIN_TOL = 1e-12


def _grid(start, extent=DEFAULT_EXTENT, samples=DEFAULT_SAMPLES):
    return np.linspace(start, start + extent, samples)


@dataclass(frozen=True)
class CylinderSolution:
    """Cylinder ℝ × N(κ) with ω ≡ ω₀ and f quadratic in r"""
    n: int
    rho: float
    lam: float
    kappa: int
    omega0_sq: Optional[float]
    trivial: bool = False

    @property
    def name(self) -> str:
        return {1: 'round', 0: 'flat_fiber', -1: 'hyperbolic'}[self.kappa]

    @property
    def free_omega0(self) -> bool:
        return self.omega0_sq is None

    @property
    def params(self) -> SolitonParams:
        return SolitonParams(n=self.n, rho=self.rho, lam=self.lam, kappa=self.kappa)

    def f_coefficient(self, omega0: float = None) -> float:
        """Coefficient of r² in f"""
        m = self.n - 1
        if abs(self.rho - 1 / m) <= 1e-12:
            omega0_sq = self._omega0_sq(omega0)
            return (self.n - 2) * self.kappa / (2 * omega0_sq)
        return self.lam / (2 * (1 - m * self.rho))

    def _omega0_sq(self, omega0):
        if omega0 is not None:
            if omega0 <= 0:
                raise InvalidParameters("omega0 must be positive")
            return omega0 ** 2
        if self.omega0_sq is None:
            raise InvalidParameters(f"{self.name} cylinder has a free omega0; supply one")
        return self.omega0_sq

    def profile(self, r=None, omega0: float = None, a0: float = 0.0, b0: float = 0.0) -> RadialProfile:
        r = _grid(0.0) if r is None else np.asarray(r, dtype=float)
        w0 = math.sqrt(self._omega0_sq(omega0))
        coeff = self.f_coefficient(w0)
        zeros = np.zeros_like(r)
        return RadialProfile(
            params=self.params,
            r=r,
            omega=np.full_like(r, w0),
            omega_p=zeros,
            omega_pp=zeros,
            f=coeff * r ** 2 + a0 * r + b0,
            f_p=2 * coeff * r + a0,
            f_pp=np.full_like(r, 2 * coeff),
            tip=float(r[0]),
        )

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'n': self.n,
            'rho': self.rho,
            'lambda': self.lam,
            'kappa': self.kappa,
            'omega0_sq': self.omega0_sq if self.omega0_sq is not None else 'free',
            'f_coefficient': (self.f_coefficient() if not self.free_omega0
                              else f"{(self.n - 2) * self.kappa}/(2 omega0^2)"),
            'trivial': self.trivial,
        }


def cylinder_solutions(n: int, rho: float, lam: float) -> List[CylinderSolution]:
    """Every admissible cylinder for (n, ρ, λ)"""
    if n < 3:
        raise InvalidParameters("dimension must be >= 3")
    if abs(rho) <= 1e-12:
        raise InvalidParameters("rho = 0 is the gradient Ricci case; see ricci_cylinder")
    m = n - 1
    c = (m - 1) * (1 - m * rho)
    found = []
    if abs(rho - 1 / m) <= 1e-12:
        # the second equation forces λ = 0; then every κ works with ω₀ free
        if lam == 0:
            found.append(CylinderSolution(n, rho, lam, 1, None))
            found.append(CylinderSolution(n, rho, lam, 0, None, trivial=True))
            found.append(CylinderSolution(n, rho, lam, -1, None))
    elif lam == 0:
        found.append(CylinderSolution(n, rho, lam, 0, None, trivial=True))
    else:
        # λω₀² = (m-1)(1-mρ)κ picks the only fiber sign with ω₀² > 0
        kappa = 1 if c / lam > 0 else -1
        found.append(CylinderSolution(n, rho, lam, kappa, kappa * c / lam))
    logger.info("cylinders for n=%d rho=%g lambda=%g: %s", n, rho, lam, [s.name for s in found])
    return found


def ricci_cylinder(n: int, lam: float) -> CylinderSolution:
    """Shrinking gradient Ricci soliton ℝ × S^{n-1} with λω₀² = n - 2 and f = λr²/2"""
    if n < 3:
        raise InvalidParameters("dimension must be >= 3")
    if lam <= 0:
        raise InvalidParameters(f"a round Ricci cylinder needs lambda > 0, got {lam}")
    return CylinderSolution(n, 0.0, lam, 1, (n - 2) / lam)


def flat_gaussian(n: int, rho: float, lam: float, a0: float = 0.0, b0: float = 0.0,
                  extent: float = DEFAULT_EXTENT, samples: int = DEFAULT_SAMPLES) -> RadialProfile:
    """Flat ℝⁿ with f = λr²/2 + a₀r + b₀ and the tip at r = -a₀/λ"""
    if lam == 0:
        if a0 != 0:
            raise InvalidParameters("a flat steady soliton needs a0 = 0 (f' = λω)")
        tip = 0.0
    else:
        tip = -a0 / lam
    r = _grid(tip, extent, samples)
    omega = r - tip
    return RadialProfile(
        params=SolitonParams(n=n, rho=rho, lam=lam, kappa=1),
        r=r,
        omega=omega,
        omega_p=np.ones_like(r),
        omega_pp=np.zeros_like(r),
        f=lam / 2 * r ** 2 + a0 * r + b0,
        f_p=lam * r + a0,
        f_pp=np.full_like(r, lam),
        tip=tip,
    )


def schouten_shrinker_local(a: float, b: float, lam: float, n: int = 3, r0: float = 0.0,
                            c: float = 0.0, d: float = 0.0, e: float = 0.0,
                            extent: float = DEFAULT_EXTENT, samples: int = DEFAULT_SAMPLES) -> RadialProfile:
    """Local shrinking Schouten solution in dimension 3 with ω = a(r - r₀) + b"""
    if n != 3:
        raise InvalidParameters("local Schouten shrinkers are three-dimensional")
    if a < 0 or b <= 0:
        raise InvalidParameters(f"need a >= 0 and b > 0, got a={a}, b={b}")
    if lam <= 0:
        raise InvalidParameters("shrinking solutions need lambda > 0")
    params = SolitonParams(n=3, rho=0.25, lam=lam, kappa=1)
    r = _grid(r0, extent, samples)
    s = r - r0
    if a == 0:
        if abs(b * b - 1 / (2 * lam)) > 1e-12 * max(1.0, b * b):
            raise InvalidParameters(f"the cylinder form needs b^2 = 1/(2 lambda) = {1 / (2 * lam)}")
        return RadialProfile(
            params=params, r=r,
            omega=np.full_like(r, b), omega_p=np.zeros_like(r), omega_pp=np.zeros_like(r),
            f=lam * s ** 2 + c * s + d, f_p=2 * lam * s + c, f_pp=np.full_like(r, 2 * lam),
            tip=float(r0),
        )
    if abs(a - 1) > 1e-12:
        raise InvalidParameters(f"the flat form needs a = 1, got {a}")
    return RadialProfile(
        params=params, r=r,
        omega=a * s + b, omega_p=np.full_like(r, a), omega_pp=np.zeros_like(r),
        f=lam / 2 * s ** 2 + lam * b / a * s + e, f_p=lam * s + lam * b / a, f_pp=np.full_like(r, lam),
        tip=r0 - b / a,
    )


def canonical_profiles() -> dict:
    """Representative closed-form solutions across the cylinder, flat and Schouten cases"""
    profiles = {}
    for n, rho, lam in ((3, 0.25, 1.0), (3, 1.0, 1.0), (3, 0.1, -1.0), (4, 0.1, 2.0), (4, 1.0, -1.0)):
        for sol in cylinder_solutions(n, rho, lam):
            profiles[f"cylinder_{sol.name}_n{n}_rho{rho:g}_lam{lam:g}"] = sol.profile()
    profiles['ricci_cylinder_n4_lam2'] = ricci_cylinder(4, 2.0).profile()
    for kappa_sol in cylinder_solutions(3, 0.5, 0.0):
        profiles[f"cigar_cylinder_{kappa_sol.name}"] = kappa_sol.profile(omega0=1.5, a0=0.5)
    profiles['flat_steady'] = flat_gaussian(3, 0.3, 0.0)
    profiles['flat_schouten_shrinker'] = flat_gaussian(3, 0.25, 1.0)
    profiles['flat_expander'] = flat_gaussian(4, -1.0, -1.0, a0=2.0, b0=1.0)
    profiles['schouten_cylinder'] = schouten_shrinker_local(0.0, 1.0, 0.5)
    profiles['schouten_flat'] = schouten_shrinker_local(1.0, 1.0, 0.5)
    return profiles


@dataclass
class GradientInequalityReport:
    a: float
    f0: float
    fp0: float
    lower_margin: float
    upper_margin: float
    sufficient_margin: float

    @property
    def holds(self) -> bool:
        return self.lower_margin >= -MARGIN_TOL and self.upper_margin >= -MARGIN_TOL

    def to_dict(self) -> dict:
        return {
            'a': self.a,
            'f(0)': self.f0,
            "f'(0)": self.fp0,
            'lower_margin': self.lower_margin,
            'upper_margin': self.upper_margin,
            'sufficient_margin': self.sufficient_margin,
            'holds': self.holds,
        }


def gradient_inequality_check(prof: RadialProfile, a: float = None) -> GradientInequalityReport:
    """2λf + f'(0)² <= |∇f|² <= a f + f'(0)² on the samples with r > 0"""
    p = prof.params
    if p.lam <= 0:
        raise OutOfRegime("the gradient inequality concerns shrinking solitons (lambda > 0)")
    if not p.is_schouten:
        raise OutOfRegime(f"the gradient inequality concerns Schouten solitons (rho = {p.schouten_rho})")
    if not prof.r[0] <= 0 <= prof.r[-1]:
        raise GaugeViolation("profile does not contain r = 0")
    spline = CubicHermiteSpline(prof.r, prof.f, prof.f_p)
    f0 = float(spline(0.0))
    fp0 = float(spline(0.0, 1))
    if abs(f0) > GAUGE_TOL * max(1.0, float(np.max(np.abs(prof.f)))):
        raise GaugeViolation(f"f(0) = {f0} but the inequality assumes f(0) = 0")

    R = curvature(prof).R
    if a is None:
        # keeps a - 2λ - R/2 >= λ on the whole range
        a = 3 * p.lam + float(np.max(R)) / 2
    mask = prof.r > 0
    grad2 = prof.f_p[mask] ** 2
    f = prof.f[mask]
    lower = 2 * p.lam * f + fp0 ** 2
    upper = a * f + fp0 ** 2
    scale = np.maximum(1.0, np.maximum(np.abs(grad2), np.abs(upper)))
    report = GradientInequalityReport(
        a=a, f0=f0, fp0=fp0,
        lower_margin=float(np.min((grad2 - lower) / scale)),
        upper_margin=float(np.min((upper - grad2) / scale)),
        sufficient_margin=float(np.min(a - 2 * p.lam - R / 2)),
    )
    logger.info("gradient inequality: %s", report.to_dict())
    return report
