import pytest

from phase_system import SolitonParams
from shooting import construct_steady


def _construct(n, rho, **kwargs):
    return construct_steady(SolitonParams(n=n, rho=rho), jobs=1, **kwargs)


@pytest.fixture(scope='session')
def bryant():
    """n = 3, ρ = 0 steady profile and its construction report"""
    return _construct(3, 0.0)


@pytest.fixture(scope='session')
def negative_rho():
    return _construct(3, -1.0)


@pytest.fixture(scope='session')
def cigar3():
    return _construct(3, 0.5)


@pytest.fixture(scope='session')
def cigar4():
    return _construct(4, 1 / 3)


@pytest.fixture(scope='session')
def case2_power():
    """n = 3, ρ = 1: the power-law regime beyond the cigar value"""
    return _construct(3, 1.0)
