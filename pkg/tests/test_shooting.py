from dataclasses import replace

import numpy as np
import pytest

from config import GAP_TOL, ORDER_FLOOR, RESIDUAL_TOL
from errors import InvalidParameters, NotSteady, OutOfRegime
from integrator import sample
from phase_system import SolitonParams, nullcline_h
from shooting import (
    LimitCurve, build_family, check_family_order, construct_steady, epsilon_trajectory, extract_limit,
    normalize_profile, reconstruct_profile, rescale_profile, tip_scalar_curvature, verify_nonexistence,
)
from warped_geometry import curvature, relative_residual, tip_value

LADDER = (1e-2, 1e-3, 1e-4)


def test_case1_trajectory_stays_between_nullcline_and_start():
    p = SolitonParams(n=3, rho=0.0)
    traj = epsilon_trajectory(p, 0.1, 50.0)
    y = np.geomspace(1e-2, 50.0, 400)
    x = sample(traj, y)[:, 0]
    assert np.all(x >= nullcline_h(p, y) - ORDER_FLOOR)
    assert np.all(x <= 1.1 + ORDER_FLOOR)


def test_case2_trajectory_peaks_below_one():
    p = SolitonParams(n=3, rho=1.0)
    traj = epsilon_trajectory(p, 0.1, 50.0)
    z = np.linspace(0.0, 50.0, 2001)
    x = sample(traj, z)[:, 0]
    peak = int(np.argmax(x))
    assert 0 < peak < x.size - 1
    assert np.all(np.diff(x[:peak + 1]) > 0)
    assert np.all(np.diff(x[peak:]) <= 0)
    assert x[-1] < x[peak] <= 1


def test_coarse_ladder_is_ordered():
    fam = build_family(SolitonParams(n=3, rho=0.0), (0.2, 0.1, 0.05), span=50.0)
    assert fam.epsilons == (0.2, 0.1, 0.05)
    assert check_family_order(fam).passed


@pytest.mark.slow
@pytest.mark.parametrize('rho', [0.0, -1.0, 0.5, 1.0])
def test_family_ordering(rho):
    report = check_family_order(build_family(SolitonParams(n=3, rho=rho), LADDER))
    assert report.ordered, report.order_violations[:5]
    assert report.bounded, report.bound_violations[:5]


@pytest.mark.slow
def test_limit_curve_of_case1_family():
    fam = build_family(SolitonParams(n=3, rho=0.0), LADDER)
    limit = extract_limit(fam)
    # Cauchy gaps shrink as ε decreases
    assert np.all(limit.gap_history[-1] <= limit.gap_history[-2] + ORDER_FLOOR)
    assert np.all(limit.converged)
    assert limit.within_nullcline_bounds()
    assert np.max(limit.ode_residual()) < 10 * GAP_TOL


def test_limit_needs_three_levels():
    fam = build_family(SolitonParams(n=3, rho=0.0), (0.2, 0.1), span=20.0)
    with pytest.raises(InvalidParameters):
        extract_limit(fam)


def _coarse_limit(p):
    fam = build_family(p, (0.2, 0.1, 0.05), span=50.0)
    values = fam.values[-1]
    return fam, LimitCurve(p, fam.regime, fam.grid, values, np.zeros_like(values),
                           np.zeros((2, values.size)), GAP_TOL)


def test_limit_curve_interpolates_its_values():
    p = SolitonParams(n=3, rho=0.0)
    fam, limit = _coarse_limit(p)
    assert np.allclose(limit(fam.grid), limit.values, rtol=0, atol=1e-14)
    assert limit(0.0) == 1
    assert limit.deficit(0.0) == 0
    # unstable eigenvector of P for n = 3, ρ = 0 is along (-1, 4)
    assert limit.slope_at_P == pytest.approx(-0.25)
    mid = np.sqrt(fam.grid[:-1] * fam.grid[1:])
    assert np.allclose(limit(mid), sample(fam.trajectories[-1], mid)[:, 0], rtol=0, atol=1e-8)
    assert np.allclose(limit.deficit(mid), 1 - limit(mid), rtol=0, atol=1e-12)


def test_reconstruction_rejects_a_foreign_limit():
    _, limit = _coarse_limit(SolitonParams(n=3, rho=0.0))
    with pytest.raises(InvalidParameters):
        reconstruct_profile(SolitonParams(n=3, rho=-1.0), limit)


@pytest.mark.slow
def test_reconstruction_follows_the_limit_values():
    p = SolitonParams(n=3, rho=0.0)
    limit = extract_limit(build_family(p, LADDER))
    base = reconstruct_profile(p, limit)
    # raise x̄ by 0.4·tol around s = 10, leaving the tip untouched
    bump = 0.4 * limit.tol * np.exp(-np.log(limit.grid / 10.0) ** 2)
    bumped = reconstruct_profile(p, replace(limit, values=limit.values + bump))
    assert relative_residual(bumped) < RESIDUAL_TOL
    r = 0.5 * min(base.r[-1], bumped.r[-1])
    shift = np.log(np.interp(r, bumped.r, bumped.omega) / np.interp(r, base.r, base.omega))
    assert abs(shift) > 1e-4


def test_construction_rejects_nonexistence_and_nonsteady():
    with pytest.raises(OutOfRegime) as info:
        construct_steady(SolitonParams(n=3, rho=0.3))
    assert info.value.reason == 'nonexistence_regime'
    with pytest.raises(NotSteady):
        epsilon_trajectory(SolitonParams(n=3, rho=0.0, lam=1.0), 0.1, 10.0)
    with pytest.raises(InvalidParameters):
        epsilon_trajectory(SolitonParams(n=3, rho=0.0), 1.5, 10.0)


@pytest.mark.slow
def test_bryant_profile(bryant):
    prof, report = bryant
    assert report.regime == 'case1'
    assert report.max_gap < GAP_TOL
    assert report.unstable_deviation < GAP_TOL
    assert abs(prof.omega_p[0] - 1) < 1e-3
    assert prof.r[0] > 0
    assert prof.omega[0] == pytest.approx(prof.r[0], rel=2e-3)
    # f is gauged to vanish at the tip
    assert abs(tip_value(prof.r, prof.f)) < 1e-12
    assert report.residual < RESIDUAL_TOL
    assert relative_residual(prof) == report.residual


@pytest.mark.slow
@pytest.mark.parametrize('name', ['bryant', 'negative_rho'])
def test_constructed_profiles_have_positive_curvature(name, request):
    prof, _ = request.getfixturevalue(name)
    interior = slice(1, -1)
    assert np.all((prof.omega_p[interior] > 0) & (prof.omega_p[interior] < 1))
    assert np.all(prof.omega_pp[interior] < 0)
    curv = curvature(prof)
    assert np.all(curv.K_sph[1:-1] > 0)


@pytest.mark.slow
def test_negative_rho_profile(negative_rho):
    prof, report = negative_rho
    assert report.residual < RESIDUAL_TOL
    traj = report.trajectory
    x, y = traj.states[:, 1], traj.states[:, 2]
    # x·y tends to (m-1)(1-mρ) = 3
    assert abs(x[-1] * y[-1] - 3) < 0.15
    assert np.all(np.diff(y) > 0)


@pytest.mark.slow
def test_cigar_profiles(cigar3, cigar4):
    for prof, report in (cigar3, cigar4):
        assert report.regime == 'case2'
        assert report.residual < RESIDUAL_TOL
        assert np.all(np.diff(report.trajectory.states[:, 2]) < 0)


@pytest.mark.slow
def test_normalization(bryant):
    prof, _ = bryant
    normalized = normalize_profile(prof)
    assert normalized.normalization == 'R_at_origin_one'
    assert abs(tip_scalar_curvature(normalized) - 1) < 1e-3
    again = normalize_profile(normalized)
    assert np.allclose(again.r, normalized.r, rtol=1e-10, atol=1e-12)
    assert np.allclose(again.omega, normalized.omega, rtol=1e-10, atol=1e-12)
    assert relative_residual(normalized) < RESIDUAL_TOL


@pytest.mark.slow
def test_homothety_scales_curvature(bryant):
    prof, _ = bryant
    c = 2.5
    scaled = rescale_profile(prof, c)
    assert scaled.params.lam == 0
    assert np.allclose(curvature(scaled).R, curvature(prof).R / c ** 2, rtol=1e-10)


@pytest.mark.slow
def test_homothety_covariance_of_curvature(bryant):
    prof, _ = bryant
    c = 2.0
    base, scaled = curvature(prof), curvature(rescale_profile(prof, c))
    assert np.allclose(scaled.K_rad, base.K_rad / c ** 2, rtol=1e-12, atol=0)
    assert np.allclose(scaled.K_sph, base.K_sph / c ** 2, rtol=1e-12, atol=0)
    assert np.allclose(scaled.H, base.H / c, rtol=1e-12, atol=0)
    assert np.allclose(scaled.r, c * base.r, rtol=1e-12, atol=0)


def test_rescale_rejects_nonpositive_factor():
    from exact_solutions import flat_gaussian
    with pytest.raises(InvalidParameters):
        rescale_profile(flat_gaussian(3, 0.0, 0.0), 0.0)


@pytest.mark.parametrize('rho', [0.26, 0.30, 0.40])
def test_nonexistence_by_x_crossing(rho):
    report = verify_nonexistence(SolitonParams(n=3, rho=rho))
    assert report.mode == 'x_crossing'
    assert report.integrated
    assert report.t_event > 0
    assert abs(report.state[0]) < 1e-9


def test_nonexistence_at_traceless_rho():
    report = verify_nonexistence(SolitonParams(n=3, rho=1 / 3))
    assert report.mode == 'y_sign'
    assert report.details['monotone']
    assert min(report.details['backward_growth'].values()) > 1


def test_nonexistence_at_schouten_rho():
    report = verify_nonexistence(SolitonParams(n=3, rho=0.25))
    assert report.mode == 'schouten_constraint'
    assert not report.integrated
    assert report.t_event is None


def test_nonexistence_outside_the_regime():
    with pytest.raises(OutOfRegime):
        verify_nonexistence(SolitonParams(n=3, rho=0.0))
    with pytest.raises(NotSteady):
        verify_nonexistence(SolitonParams(n=3, rho=0.3, lam=1.0))
