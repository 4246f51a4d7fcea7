import math

import numpy as np
import pytest

from config import GAUSS_TOL, IDENTITY_TOL
from errors import CriticalLevel, OutOfRange, TipSingular
from exact_solutions import cylinder_solutions, flat_gaussian, schouten_shrinker_local
from phase_system import SolitonParams
from profile_store import RadialProfile
from warped_geometry import (
    ball_volume, curvature, derivative_consistency, hessian_laplacian, identity_checks, is_soliton,
    level_set_geometry, radial_derivative, radial_second_derivative, relative_residual, soliton_residual,
    sphere_area, volume_profile,
)


def schouten_cylinder():
    """n = 3, ρ = 1/4, λ = 1 round cylinder with ω₀² = 1/2 and f = r²"""
    (sol,) = cylinder_solutions(3, 0.25, 1.0)
    return sol.profile()


def sphere_profile():
    r = np.linspace(0.1, 3.0, 300)
    return RadialProfile(
        params=SolitonParams(n=3, rho=0.0), r=r,
        omega=np.sin(r), omega_p=np.cos(r), omega_pp=-np.sin(r),
        f=np.zeros_like(r), f_p=np.zeros_like(r), f_pp=np.zeros_like(r),
    )


def test_finite_differences_on_a_nonuniform_grid():
    r = np.geomspace(0.5, 4.0, 400)
    assert np.max(np.abs(radial_derivative(r, np.sin(r)) - np.cos(r))) < 1e-6
    assert np.max(np.abs(radial_second_derivative(r, np.sin(r)) + np.sin(r))) < 1e-4


def test_round_cylinder_curvature():
    prof = schouten_cylinder()
    curv = curvature(prof)
    w2 = prof.omega[0] ** 2
    assert w2 == pytest.approx(0.5)
    assert np.all(curv.K_rad == 0)
    assert np.allclose(curv.K_sph, 1 / w2, rtol=1e-14)
    assert np.allclose(curv.R, 2 / w2, rtol=1e-14)
    assert curv.trace_deviation() < 1e-14


def test_flat_cone_curvature():
    prof = flat_gaussian(3, 0.0, 0.0)
    curv = curvature(prof)
    # the tip sample has ω = 0 and is excluded
    assert curv.excluded == [0.0]
    assert np.all(curv.K_rad == 0)
    assert np.max(np.abs(curv.K_sph)) < 1e-12
    assert np.max(np.abs(curv.R)) < 1e-12


def test_sphere_sectional_curvatures():
    curv = curvature(sphere_profile())
    assert np.allclose(curv.K_rad, 1.0, rtol=1e-12)
    assert np.allclose(curv.K_sph, 1.0, rtol=1e-12)
    assert np.allclose(curv.R, 6.0, rtol=1e-12)


def test_laplacian_of_flat_potential():
    lam = 0.7
    lap = hessian_laplacian(flat_gaussian(3, 0.0, lam)).laplacian
    assert np.allclose(lap, 3 * lam, rtol=1e-13)


def test_constant_potential_has_no_hessian():
    prof = schouten_cylinder()
    prof = prof.replace(f=np.full_like(prof.r, 2.0), f_p=np.zeros_like(prof.r), f_pp=np.zeros_like(prof.r))
    report = hessian_laplacian(prof)
    assert np.all(report.f_pp == 0)
    assert np.all(report.laplacian == 0)


def test_exact_solutions_have_zero_residual():
    for prof in (schouten_cylinder(), flat_gaussian(4, 0.3, 1.0, a0=1.0), flat_gaussian(3, 0.2, -1.0)):
        res1, res2 = soliton_residual(prof)
        assert np.max(np.abs(res1)) < 1e-12
        assert np.max(np.abs(res2)) < 1e-12
        assert is_soliton(prof)


def test_perturbed_cylinder_is_not_a_soliton():
    prof = schouten_cylinder()
    r = prof.r
    bumped = prof.replace(
        omega=prof.omega + 1e-3 * np.sin(r),
        omega_p=1e-3 * np.cos(r),
        omega_pp=-1e-3 * np.sin(r),
    )
    assert relative_residual(bumped) > 1e-4
    assert not is_soliton(bumped)


def test_identities_on_the_round_cylinder():
    report = identity_checks(schouten_cylinder())
    assert report.passed, report.sup()
    # ρ = 1/2m: Ric(∇f, ∂r) vanishes identically
    assert report.sup()['schouten_ric_grad_f'] == 0


def test_identities_on_flat_solutions():
    for prof in (flat_gaussian(3, 0.3, 1.0), flat_gaussian(4, -1.0, -1.0, a0=2.0)):
        report = identity_checks(prof)
        assert report.passed, report.sup()
        assert report.schouten is None


def test_identities_on_the_local_schouten_shrinker():
    report = identity_checks(schouten_shrinker_local(1.0, 1.0, 0.5))
    assert report.passed, report.sup()


@pytest.mark.slow
@pytest.mark.parametrize('name', ['bryant', 'negative_rho', 'cigar3'])
def test_identities_on_constructed_profiles(name, request):
    prof, _ = request.getfixturevalue(name)
    report = identity_checks(prof)
    assert all(v < IDENTITY_TOL for v in report.sup().values()), report.sup()
    assert level_set_geometry(prof).gauss_gap() < GAUSS_TOL


def test_level_sets_of_the_cylinder():
    prof = schouten_cylinder()
    report = level_set_geometry(prof)
    # f' = 2r vanishes at r = 0 only
    assert report.excluded == [0.0]
    assert np.all(report.H == 0)
    assert np.all(report.h_norm2 == 0)
    assert np.allclose(report.R_sigma_direct, curvature(prof).R[1:], rtol=1e-14)
    assert report.passed


def test_level_sets_of_a_sphere_profile():
    prof = sphere_profile()
    prof = prof.replace(f=prof.r, f_p=np.ones_like(prof.r))
    report = level_set_geometry(prof)
    assert np.allclose(report.R_sigma_direct, 2 / np.sin(prof.r) ** 2)
    assert np.allclose(report.h_norm2, report.h_norm2_riccati, rtol=1e-10)
    assert report.gauss_gap() < GAUSS_TOL


def test_critical_level_everywhere():
    prof = sphere_profile()
    with pytest.raises(CriticalLevel):
        level_set_geometry(prof)


def test_tip_singular_profile():
    r = np.linspace(0.0, 1.0, 10)
    zeros = np.zeros_like(r)
    prof = RadialProfile(SolitonParams(n=3, rho=0.0), r, zeros, zeros, zeros, zeros, zeros, zeros)
    with pytest.raises(TipSingular):
        curvature(prof)


def test_euclidean_ball_volume():
    prof = flat_gaussian(3, 0.0, 0.0)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert ball_volume(prof, 2.0) == pytest.approx(4 * math.pi / 3 * 8, rel=1e-3)
    with pytest.raises(OutOfRange):
        ball_volume(prof, 20.0)


def test_cylinder_volume_grows_linearly():
    prof = schouten_cylinder()
    volume = volume_profile(prof)
    slope = np.diff(volume) / np.diff(prof.r)
    assert np.allclose(slope, 4 * math.pi * 0.5, rtol=1e-10)


def test_carried_derivatives_match_finite_differences():
    checks = derivative_consistency(schouten_shrinker_local(1.0, 1.0, 0.5))
    assert max(checks.values()) < 1e-10
    bad = schouten_cylinder()
    bad = bad.replace(f_p=bad.f_p + 0.1)
    assert derivative_consistency(bad)['f_p'] > 1e-3
