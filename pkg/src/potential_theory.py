"""Generalized Ricci potentials: coefficient families, nondegeneracy and the rectifiability witness.

A generalized Ricci potential satisfies

    Ric + α ∇²f = β df⊗df + γ R g + ζ g + η P

with α, β, γ, ζ, η functions of f. The parallel tensor P never enters the checks.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np
import sympy

from config import IDENTITY_TOL, ND_THRESHOLD, GENERIC_FRACTION, GENERIC_DRAWS, SEED, TIP_CLEARANCE
from errors import EvaluationError, InvalidParameters
from profile_store import RadialProfile
from warped_geometry import relative_gap, radial_window, relative_residual

logger = logging.getLogger(__name__)

F = sympy.Symbol('f')
N = sympy.Symbol('n')
COEFFICIENTS = ('alpha', 'beta', 'gamma', 'zeta', 'eta')
VERDICTS = ('nondegenerate', 'degenerate', 'boundary')
DOMAIN_POINTS = 9

# family parameters
LAM, MU, RHO = sympy.symbols('lam mu rho')
A0, A1, A2 = sympy.symbols('a0 a1 a2')
B0, B1, B2 = sympy.symbols('b0 b1 b2')
W0, W1, W2 = sympy.symbols('w0 w1 w2')


def default_a(f):
    return A0 + A1 * f + A2 * f ** 2


def default_b(f):
    return B0 + B1 * f + B2 * f ** 2


def default_omega(f):
    return W0 + W1 * f + W2 * f ** 2


@dataclass(eq=False)
class CoefficientSet:
    """The five coefficient functions of a family, with value and derivative evaluators"""
    family_name: str
    label: str
    exprs: Dict[str, sympy.Expr]
    params: Dict[str, float]
    stated: str
    domain: tuple = (0.5, 3.0)
    _evaluators: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.exprs = {name: sympy.sympify(self.exprs.get(name, 0)) for name in COEFFICIENTS}
        free = set()
        for expr in self.exprs.values():
            free |= expr.free_symbols
        self._symbols = sorted((s for s in free if s not in (F, N)), key=lambda s: s.name)
        missing = [s.name for s in self._symbols if s.name not in self.params]
        if missing:
            raise InvalidParameters(f"{self.family_name}: no value for {missing}")
        args = (F, N, *self._symbols)
        for name, expr in self.exprs.items():
            for order in (0, 1, 2):
                self._evaluators[name, order] = sympy.lambdify(args, sympy.diff(expr, F, order), 'numpy')

    def with_params(self, **values) -> 'CoefficientSet':
        return CoefficientSet(self.family_name, self.label, dict(self.exprs),
                              {**self.params, **values}, self.stated, self.domain)

    def evaluate(self, name: str, f, n: int, order: int = 0):
        """d^order/df^order of one coefficient at f"""
        if name not in COEFFICIENTS or order not in (0, 1, 2):
            raise InvalidParameters(f"unknown coefficient {name!r} or order {order}")
        fn = self._evaluators[name, order]
        values = [self.params[s.name] for s in self._symbols]
        f = np.asarray(f, dtype=float)
        try:
            with np.errstate(divide='ignore', invalid='ignore'):
                out = np.broadcast_to(np.asarray(fn(f, n, *values), dtype=float), f.shape)
        except Exception as e:
            raise EvaluationError(f"{self.family_name}: {name}^({order}) failed at f={f}: {e}") from e
        return float(out) if out.ndim == 0 else out.copy()

    def values(self, f, n: int) -> tuple:
        return tuple(self.evaluate(name, f, n) for name in COEFFICIENTS)

    def to_dict(self) -> dict:
        return {
            'family': self.family_name,
            'label': self.label,
            'coefficients': {name: str(expr) for name, expr in self.exprs.items()},
            'params': dict(self.params),
            'stated': self.stated,
        }


def family_registry(lam: float = 1.0, mu: float = 0.5, rho: float = 0.25,
                    a: Callable = default_a, b: Callable = default_b, omega: Callable = default_omega,
                    a_params: dict = None, b_params: dict = None, omega_params: dict = None) -> List[CoefficientSet]:
    """The six example families; a, b and ω map the symbol f to a sympy expression"""
    a_params = {'a0': 1.0, 'a1': 0.5, 'a2': 1.0} if a_params is None else a_params
    b_params = {'b0': 1.0, 'b1': 1.0, 'b2': 0.0} if b_params is None else b_params
    omega_params = {'w0': 1.0, 'w1': 0.5, 'w2': 0.0} if omega_params is None else omega_params
    a_f = sympy.sympify(a(F))
    b_f = sympy.sympify(b(F))
    w_f = sympy.sympify(omega(F))
    da, dda, db = sympy.diff(a_f, F), sympy.diff(a_f, F, 2), sympy.diff(b_f, F)
    dw = sympy.diff(w_f, F)
    action_gamma = (da * db - 2 * dda * b_f + da ** 2 * (b_f / a_f)) / (
        2 * (N - 2) * b_f ** 2 + 2 * (N - 1) * da * db - 4 * (N - 1) * dda * b_f)
    return [
        CoefficientSet('gradient_ricci_soliton', '(1)',
                       {'alpha': 1, 'zeta': LAM}, {'lam': lam}, 'degenerate'),
        CoefficientSet('rho_einstein', '(2)',
                       {'alpha': 1, 'gamma': RHO, 'zeta': LAM}, {'lam': lam, 'rho': rho},
                       'nondegenerate_iff_rho_nonzero'),
        CoefficientSet('quasi_einstein', '(3)',
                       {'alpha': 1, 'beta': MU, 'zeta': LAM}, {'lam': lam, 'mu': mu}, 'degenerate'),
        CoefficientSet('fischer_marsden', '(4)',
                       {'alpha': -1 / F, 'gamma': 1 / (N - 1)}, {}, 'degenerate'),
        CoefficientSet('scalar_tensor_action', '(5)',
                       {'alpha': -da / a_f, 'beta': (dda - b_f) / a_f, 'gamma': action_gamma},
                       {**a_params, **b_params}, 'generic_nondegenerate'),
        CoefficientSet('bergmann_wagoner_nordtvedt', '(5-bis)',
                       {'alpha': -1 / F, 'beta': w_f / F ** 2,
                        'gamma': -dw * F / ((N - 2) * (3 + 2 * w_f) * w_f - 2 * (N - 1) * dw * F)},
                       dict(omega_params), 'generic_nondegenerate'),
    ]


def sign_flipped(c: CoefficientSet) -> CoefficientSet:
    """(α, β) -> (-α, -β) composed with f -> -f"""
    exprs = {name: expr.subs(F, -F) for name, expr in c.exprs.items()}
    exprs['alpha'] = -exprs['alpha']
    exprs['beta'] = -exprs['beta']
    return CoefficientSet(c.family_name + '_flipped', c.label, exprs, dict(c.params), c.stated,
                          (-c.domain[1], -c.domain[0]))


def _nd_terms(c: CoefficientSet, n: int, f):
    """nd1, nd2, nd3 assembled term by term on an array of f, with a magnitude scale for nd3"""
    f = np.atleast_1d(np.asarray(f, dtype=float))
    al, al1, al2 = (c.evaluate('alpha', f, n, k) for k in (0, 1, 2))
    be, be1 = c.evaluate('beta', f, n), c.evaluate('beta', f, n, 1)
    ga = c.evaluate('gamma', f, n)
    with np.errstate(divide='ignore', invalid='ignore'):
        nd1 = al
        nd2 = al ** 2 - al1 - be
        first = ((2 * al * al1 - al2 - be1) / nd2 + 2 * be / al) * ((1 - 2 * (n - 1) * ga) / 2)
        second = ((1 - n * ga) * (al1 + be) + al ** 2 * ga) / al
        nd3 = first - second
    scale = np.maximum(1.0, np.maximum(np.abs(first), np.abs(second)))
    return nd1, nd2, nd3, scale


def _vanishes(value, scale=1.0):
    # a NaN quantity comes from a vanishing earlier condition and is not evidence of nd != 0
    value = np.asarray(value, dtype=float)
    return np.isnan(value) | (np.abs(value) <= ND_THRESHOLD * np.asarray(scale))


@dataclass
class Nondegeneracy:
    family_name: str
    n: int
    f_value: float
    nd1: float
    nd2: float
    nd3: float
    verdict: str

    def to_dict(self) -> dict:
        return {
            'family': self.family_name,
            'n': self.n,
            'f': self.f_value,
            'nd1': self.nd1,
            'nd2': self.nd2,
            'nd3': self.nd3,
            'verdict': self.verdict,
        }


def nondegeneracy_check(c: CoefficientSet, n: int, f_value: float, points=None) -> Nondegeneracy:
    """Evaluate the three nondegeneracy conditions at f_value and classify"""
    if int(n) != n or n < 3:
        raise InvalidParameters(f"dimension must be an integer >= 3, got {n!r}")
    alpha = c.evaluate('alpha', f_value, n)
    if not np.isfinite(alpha):
        raise EvaluationError(f"{c.family_name}: alpha is not finite at f={f_value}")
    nd1, nd2, nd3, scale = (v[0] for v in _nd_terms(c, n, f_value))
    zero = [bool(_vanishes(nd1)), bool(_vanishes(nd2)), bool(_vanishes(nd3, scale))]
    if not any(zero):
        verdict = 'nondegenerate'
    else:
        grid = np.linspace(*c.domain, DOMAIN_POINTS) if points is None else np.asarray(points, dtype=float)
        g1, g2, g3, gscale = _nd_terms(c, n, grid)
        identically = (zero[0] and np.all(_vanishes(g1))
                       or zero[1] and np.all(_vanishes(g2))
                       or zero[2] and np.all(_vanishes(g3, gscale)))
        verdict = 'degenerate' if identically else 'boundary'
    result = Nondegeneracy(c.family_name, int(n), float(f_value), float(nd1), float(nd2), float(nd3), verdict)
    logger.debug("nondegeneracy %s", result.to_dict())
    return result


def _stated_verdict(c: CoefficientSet) -> str:
    if c.stated == 'nondegenerate_iff_rho_nonzero':
        return 'degenerate' if abs(c.params['rho']) <= ND_THRESHOLD else 'nondegenerate'
    if c.stated == 'generic_nondegenerate':
        return 'nondegenerate'
    return c.stated


def _random_params(label: str, rng: np.random.Generator) -> dict:
    if label in ('(1)', '(2)', '(3)'):
        rho = rng.uniform(0.05, 2.0) * rng.choice([-1.0, 1.0])
        return {'lam': rng.uniform(-2.0, 2.0), 'mu': rng.uniform(-2.0, 2.0), 'rho': rho}
    if label == '(5)':
        return {k: rng.uniform(-2.0, 2.0) for k in ('a0', 'a1', 'a2', 'b0', 'b1', 'b2')}
    if label == '(5-bis)':
        return {'w0': rng.uniform(0.5, 2.0), 'w1': rng.uniform(0.2, 2.0) * rng.choice([-1.0, 1.0]),
                'w2': rng.uniform(-1.0, 1.0)}
    return {}


def _random_dimension(label: str, rng: np.random.Generator) -> int:
    # n = 4 makes the (5-bis) condition vanish identically
    if label == '(5-bis)':
        return int(rng.choice([3, 5, 6]))
    return int(rng.integers(3, 7))


@dataclass
class FamilyAudit:
    family_name: str
    label: str
    stated: str
    verdicts: dict
    agreement: float
    generic_fraction: float = None

    @property
    def agrees(self) -> bool:
        if self.generic_fraction is not None:
            return self.generic_fraction >= GENERIC_FRACTION
        return self.agreement == 1.0

    def to_dict(self) -> dict:
        return {
            'family': self.family_name,
            'label': self.label,
            'stated': self.stated,
            'verdicts': self.verdicts,
            'agreement': self.agreement,
            'generic_fraction': self.generic_fraction,
            'agrees': self.agrees,
        }


def audit_registry(samples: int = 20, draws: int = GENERIC_DRAWS, seed: int = SEED) -> List[FamilyAudit]:
    """Computed verdicts at random admissible samples against the stated classification"""
    rng = np.random.default_rng(seed)
    audits = []
    for base in family_registry():
        counts = dict.fromkeys(VERDICTS, 0)
        matches = 0
        for _ in range(samples):
            params = {k: v for k, v in _random_params(base.label, rng).items() if k in base.params}
            c = base.with_params(**params)
            f_value = rng.uniform(*c.domain)
            result = nondegeneracy_check(c, _random_dimension(base.label, rng), f_value)
            counts[result.verdict] += 1
            matches += result.verdict == _stated_verdict(c)
        generic = None
        if base.stated == 'generic_nondegenerate':
            hits = 0
            for _ in range(draws):
                c = base.with_params(**_random_params(base.label, rng))
                result = nondegeneracy_check(c, _random_dimension(base.label, rng), rng.uniform(*c.domain))
                hits += result.verdict == 'nondegenerate'
            generic = hits / draws
        audit = FamilyAudit(base.family_name, base.label, base.stated, counts, matches / samples, generic)
        logger.info("audit %s %s: %s", base.label, base.family_name, audit.to_dict())
        audits.append(audit)
    return audits


def classify_families(n: int = 5, f_value: float = 2.0, **registry_args) -> List[dict]:
    """One entry per registry family with its coefficients at f_value and computed verdict"""
    entries = []
    for c in family_registry(**registry_args):
        nd = nondegeneracy_check(c, n, f_value)
        entries.append({
            **c.to_dict(),
            'values': dict(zip(COEFFICIENTS, c.values(f_value, n))),
            'nondegeneracy': nd.to_dict(),
            'matches_stated': nd.verdict == _stated_verdict(c),
        })
    return entries


@dataclass
class RectifiabilityReport:
    r: np.ndarray
    eq2: np.ndarray
    chain_structure: np.ndarray
    chain_eq2: np.ndarray
    eq2_lhs_sup: float
    eq2_rhs_sup: float
    residual: float
    tol: float = IDENTITY_TOL

    def sup(self) -> dict:
        return {
            'eq2': float(np.max(self.eq2)),
            'chain_structure': float(np.max(self.chain_structure)),
            'chain_eq2': float(np.max(self.chain_eq2)),
        }

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.sup().values())

    def to_dict(self) -> dict:
        return {
            'potential_radial': True,
            'tangential_gradient': 0.0,
            'sup': self.sup(),
            'eq2_lhs_sup': self.eq2_lhs_sup,
            'eq2_rhs_sup': self.eq2_rhs_sup,
            'soliton_residual': self.residual,
            'tol': self.tol,
            'passed': self.passed,
        }


def rectifiability_witness(prof: RadialProfile, tip_clearance: float = TIP_CLEARANCE,
                           tol: float = IDENTITY_TOL) -> RectifiabilityReport:
    """Radial form of (1-2mρ)∇R = 2Ric(∇f,·) and the |∇f|² chain built on it

    f depends on r alone, so |∇f| = |f'| is constant on level sets; what is checked is
    2f'f'' = 2(ρR + λ - Ric_rr) f' = 2(ρR + λ) f' - (1-2mρ) R'.
    """
    p = prof.params
    win = radial_window(prof, tip_clearance)
    sub, curv, dR, keep = win.profile, win.curvature, win.dR, win.keep
    R, ric_rr = curv.R, curv.Ric_rr
    fp, fpp = sub.f_p, sub.f_pp
    lhs = p.denom * dR
    rhs = 2 * ric_rr * fp
    grad_scale = 2 * np.sqrt(ric_rr ** 2 + p.m * curv.Ric_sph ** 2) * np.abs(fp)
    grad_sq = 2 * fp * fpp
    structural = 2 * (p.rho * R + p.lam - ric_rr) * fp
    via_eq2 = 2 * (p.rho * R + p.lam) * fp - lhs
    report = RectifiabilityReport(
        r=sub.r[keep],
        eq2=relative_gap(lhs - rhs, lhs, rhs, grad_scale)[keep],
        chain_structure=relative_gap(grad_sq - structural, grad_sq, structural, 2 * ric_rr * fp)[keep],
        chain_eq2=relative_gap(grad_sq - via_eq2, grad_sq, 2 * (p.rho * R + p.lam) * fp, lhs)[keep],
        eq2_lhs_sup=float(np.max(np.abs(lhs[keep]))),
        eq2_rhs_sup=float(np.max(np.abs(rhs[keep]))),
        residual=relative_residual(prof),
        tol=tol,
    )
    logger.info("rectifiability witness: %s", report.sup())
    return report
