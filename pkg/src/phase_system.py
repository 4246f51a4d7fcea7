"""First-order phase system of warped-product gradient ρ-Einstein solitons.

With m = n - 1, x = ω', y = -ω f' and dt = dr/ω the soliton equations become

    (1-2mρ) x' = (m-1)(1-mρ)(κ-x²) - xy - λω²
    (1-2mρ) y' = -m(m-1)(1-(m+1)ρ)(κ-x²) + (1+m-4mρ)xy + (m-1)λω²
            ω' = xω
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from errors import DenominatorZero, InvalidParameters, OutOfRegime, SchoutenSingular, NotSteady

logger = logging.getLogger(__name__)

RHO_ATOL = 1e-12


def _same(a: float, b: float) -> bool:
    return abs(a - b) <= RHO_ATOL


@dataclass(frozen=True)
class SolitonParams:
    """Dimension, ρ, λ and fiber curvature sign of a soliton"""
    n: int
    rho: float
    lam: float = 0.0
    kappa: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise InvalidParameters(f"dimension must be an integer >= 3, got {self.n!r}")
        if self.kappa not in (-1, 0, 1):
            raise InvalidParameters(f"kappa must be -1, 0 or 1, got {self.kappa!r}")
        if math.isnan(self.rho) or not math.isfinite(self.lam):
            raise InvalidParameters("rho and lambda must be real numbers")

    @property
    def m(self) -> int:
        return self.n - 1

    # Coefficients of the phase system
    @property
    def c1(self) -> float:
        return (self.m - 1) * (1 - self.m * self.rho)

    @property
    def c2(self) -> float:
        return self.m * (self.m - 1) * (1 - (self.m + 1) * self.rho)

    @property
    def c3(self) -> float:
        return 1 + self.m - 4 * self.m * self.rho

    @property
    def denom(self) -> float:
        return 1 - 2 * self.m * self.rho

    @property
    def schouten_rho(self) -> float:
        return 1 / (2 * self.m)

    @property
    def cigar_rho(self) -> float:
        return 1 / self.m

    @property
    def traceless_rho(self) -> float:
        return 1 / self.n

    @property
    def is_schouten(self) -> bool:
        return _same(self.rho, self.schouten_rho)

    @property
    def is_cigar(self) -> bool:
        return _same(self.rho, self.cigar_rho)

    @property
    def is_traceless(self) -> bool:
        return _same(self.rho, self.traceless_rho)

    @property
    def kind(self) -> str:
        if self.lam == 0:
            return 'steady'
        return 'shrinking' if self.lam > 0 else 'expanding'

    @property
    def named_class(self) -> str:
        if _same(self.rho, 0.0):
            return 'ricci'
        if _same(self.rho, 0.5):
            return 'einstein'
        if self.is_schouten:
            return 'schouten'
        if self.is_traceless:
            return 'traceless_ricci'
        return 'rho_einstein'

    def with_lambda(self, lam: float) -> 'SolitonParams':
        return SolitonParams(n=self.n, rho=self.rho, lam=lam, kappa=self.kappa)

    def to_dict(self) -> dict:
        return {'n': self.n, 'rho': self.rho, 'lambda': self.lam, 'kappa': self.kappa}


@dataclass(frozen=True)
class PhaseState:
    """A point (x, y, ω) of the phase system at phase time t"""
    x: float
    y: float
    omega: float
    t: float = 0.0


@dataclass(frozen=True)
class Equilibrium(PhaseState):
    """Equilibrium state; `free` names coordinates that may take any value"""
    free: Tuple[str, ...] = ()
    extension: bool = False


def steady_regime(p: SolitonParams) -> str:
    """Classify a steady parameter set as case1, case2 or nonexistence"""
    if p.rho < p.schouten_rho and not p.is_schouten:
        return 'case1'
    if p.rho > p.cigar_rho or p.is_cigar:
        return 'case2'
    return 'nonexistence'


def vector_field_numerators(p: SolitonParams, s: PhaseState) -> Tuple[float, float, float]:
    """Right-hand sides before the division by (1-2mρ); defined for every ρ"""
    a = p.kappa - s.x * s.x
    xy = s.x * s.y
    lw2 = p.lam * s.omega * s.omega
    num_x = p.c1 * a - xy - lw2
    num_y = -p.c2 * a + p.c3 * xy + (p.m - 1) * lw2
    return num_x, num_y, s.x * s.omega


def vector_field(p: SolitonParams, s: PhaseState) -> Tuple[float, float, float]:
    if p.is_schouten:
        raise SchoutenSingular(f"rho = 1/(2m) = {p.schouten_rho} makes the phase system singular")
    num_x, num_y, d_omega = vector_field_numerators(p, s)
    return num_x / p.denom, num_y / p.denom, d_omega


def steady_vector_field(p: SolitonParams, s: PhaseState) -> Tuple[float, float, float]:
    """Vector field of the decoupled steady system (λ = 0, κ = 1)"""
    if p.lam != 0:
        raise NotSteady(f"steady system requires lambda = 0, got {p.lam}")
    if p.kappa != 1:
        raise InvalidParameters(f"steady system requires kappa = 1, got {p.kappa}")
    return vector_field(p, s)


def scalar_field_F(p: SolitonParams, x, y):
    """dx/dy along a steady trajectory"""
    a = 1 - np.square(x)
    num = p.c1 * a - x * y
    den = -p.c2 * a + p.c3 * x * y
    _check_denominator(den, x, y)
    return num / den


def scalar_field_G(p: SolitonParams, x, z):
    """dx/dz along a steady trajectory, z = -y"""
    a = 1 - np.square(x)
    num = p.c1 * a + x * z
    den = p.c2 * a + p.c3 * x * z
    _check_denominator(den, x, z)
    return num / den


def _check_denominator(den, x, y):
    zero = np.asarray(den) == 0
    if np.any(zero):
        if np.ndim(zero) == 0:
            raise DenominatorZero(float(x), float(y))
        i = np.flatnonzero(zero)[0]
        raise DenominatorZero(float(np.broadcast_to(x, zero.shape).flat[i]),
                              float(np.broadcast_to(y, zero.shape).flat[i]))


def nullcline_h(p: SolitonParams, y):
    """x-nullcline h(y) of the case-1 scalar ODE"""
    if p.rho >= p.cigar_rho or p.is_cigar:
        raise OutOfRegime(f"h(y) needs rho < 1/m = {p.cigar_rho}, got {p.rho}")
    c = p.c1
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise OutOfRegime(f"h(y) is defined for y >= 0, got min y = {float(np.min(y))}")
    # rationalized root, no cancellation for large y
    h = 2 * c / (y + np.sqrt(y * y + 4 * c * c))
    return float(h) if h.ndim == 0 else h


def nullcline_k(p: SolitonParams, z):
    """x-nullcline k(z) of the case-2 scalar ODE"""
    if not (p.rho > p.cigar_rho or p.is_cigar):
        raise OutOfRegime(f"k(z) needs rho >= 1/m = {p.cigar_rho}, got {p.rho}")
    z = np.asarray(z, dtype=float)
    if p.is_cigar:
        k = np.where(z > 0, 0.0, 1.0)
    else:
        c = abs(p.c1)
        k = 2 * c / (z + np.sqrt(z * z + 4 * c * c))
    return float(k) if k.ndim == 0 else k


def equilibria(p: SolitonParams) -> List[Equilibrium]:
    """All equilibria with ω >= 0, from the closed-form case analysis"""
    if p.is_schouten:
        raise SchoutenSingular(f"rho = 1/(2m) = {p.schouten_rho} makes the phase system singular")
    extension = not (p.kappa == 1 and p.lam == 0)
    # ω = 0: the linear system in (κ - x², xy) has determinant (m-1)(1-2mρ)² != 0
    found: List[Equilibrium] = []
    if p.kappa == 1:
        found.append(Equilibrium(1.0, 0.0, 0.0, extension=extension))
        found.append(Equilibrium(-1.0, 0.0, 0.0, extension=extension))
    elif p.kappa == 0:
        found.append(Equilibrium(0.0, 0.0, 0.0, free=('y',), extension=True))
        # x = 0, ω > 0 forces κ = 0 and then λω² = 0
        if p.lam == 0:
            found.append(Equilibrium(0.0, 0.0, 1.0, free=('y', 'omega'), extension=True))
    logger.debug("equilibria for %s: %s", p, found)
    return found


def steady_jacobian(p: SolitonParams, x: float, y: float) -> np.ndarray:
    """Jacobian of the steady (x, y) subsystem"""
    if p.is_schouten:
        raise SchoutenSingular("Jacobian undefined at rho = 1/(2m)")
    return np.array([
        [-2 * p.c1 * x - y, -x],
        [2 * p.c2 * x + p.c3 * y, p.c3 * x],
    ]) / p.denom


def unstable_direction(p: SolitonParams) -> Tuple[float, np.ndarray]:
    """Unstable eigenvalue and unit eigenvector at P, oriented with x decreasing"""
    values, vectors = np.linalg.eig(steady_jacobian(p, 1.0, 0.0))
    i = int(np.argmax(values.real))
    v = vectors[:, i].real
    v = v / np.linalg.norm(v)
    if v[0] > 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    return float(values[i].real), v
