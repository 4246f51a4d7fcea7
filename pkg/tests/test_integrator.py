import math

import numpy as np
import pytest

from errors import BlowUp, InvalidParameters, OutOfRange, StepLimit
from integrator import EventSpec, IntegrationConfig, dense_eval, integrate, sample
from phase_system import PhaseState, SolitonParams, steady_vector_field, unstable_direction


def exponential(t, x):
    return x


def test_exponential_reaches_e():
    traj = integrate(exponential, 1.0, 0.0, 1.0)
    assert traj.termination == 't_end_reached'
    assert abs(traj.end[0] - math.e) < 1e-9
    assert np.all(np.diff(traj.t) > 0)


def test_tighter_tolerance_does_not_hurt():
    loose = integrate(exponential, 1.0, 0.0, 1.0, IntegrationConfig(rel_tol=1e-6, abs_tol=1e-8))
    tight = integrate(exponential, 1.0, 0.0, 1.0, IntegrationConfig(rel_tol=1e-8, abs_tol=1e-10))
    assert abs(tight.end[0] - math.e) <= abs(loose.end[0] - math.e)


def test_gaussian_event_time():
    guard = EventSpec('half', lambda t, s: s[0] - 0.5, 'falling', terminal=True)
    traj = integrate(lambda t, x: -2 * t * x, 1.0, 0.0, 5.0, IntegrationConfig(events=[guard]))
    hit = traj.event('half')
    assert traj.termination == 'event'
    # x = exp(-t²) crosses 1/2 at t = sqrt(ln 2)
    assert abs(hit.t - math.sqrt(math.log(2))) < 1e-8
    assert abs(hit.state[0] - 0.5) < 1e-9
    assert traj.t_max == hit.t


def test_event_direction_filter():
    rising = EventSpec('up', lambda t, s: s[0] - 0.5, 'rising')
    traj = integrate(lambda t, x: -2 * t * x, 1.0, 0.0, 2.0, IntegrationConfig(events=[rising]))
    assert traj.event('up') is None
    with pytest.raises(InvalidParameters):
        EventSpec('bad', lambda t, s: 0.0, 'sideways')


def test_dense_output_at_stored_samples_is_exact():
    traj = integrate(exponential, 1.0, 0.0, 1.0)
    i = traj.t.size // 2
    assert np.array_equal(dense_eval(traj, traj.t[i]), traj.states[i])


def test_dense_output_of_linear_field():
    traj = integrate(lambda t, x: np.ones_like(x), [2.0], 0.0, 3.0)
    for t in (0.123, 1.5, 2.999):
        assert abs(dense_eval(traj, t)[0] - (2.0 + t)) < 1e-12


def test_dense_output_between_samples():
    traj = integrate(exponential, 1.0, 0.0, 1.0)
    mid = 0.5 * (traj.t[1:] + traj.t[:-1])
    assert np.max(np.abs(sample(traj, mid)[:, 0] - np.exp(mid))) < 1e-9


def test_dense_output_out_of_range():
    traj = integrate(exponential, 1.0, 0.0, 1.0)
    with pytest.raises(OutOfRange):
        dense_eval(traj, 1.5)


def test_backward_integration_is_stored_ascending():
    traj = integrate(exponential, 1.0, 0.0, -1.0)
    assert np.all(np.diff(traj.t) > 0)
    assert abs(traj.end[0] - math.exp(-1)) < 1e-10
    assert traj.start[0] == 1.0


def test_time_reversal_on_steady_plane():
    p = SolitonParams(n=3, rho=0.0)

    def field(t, s):
        dx, dy, _ = steady_vector_field(p, PhaseState(s[0], s[1], 1.0))
        return np.array([dx, dy])

    start = np.array([0.6, 1.5])
    forward = integrate(field, start, 0.0, 2.0)
    back = integrate(field, forward.end, 2.0, 0.0)
    assert np.max(np.abs(back.end - start)) < 1e-7


def test_steady_trajectory_keeps_x_inside_unit_interval():
    p = SolitonParams(n=3, rho=0.0)
    _, v = unstable_direction(p)
    delta = 1e-6
    start = [1 - delta, delta * v[1] / -v[0], 1e-3]

    def field(t, s):
        return np.array(steady_vector_field(p, PhaseState(*s)))

    stop = EventSpec('far', lambda t, s: s[1] - 50.0, 'rising', terminal=True)
    traj = integrate(field, start, 0.0, 1e4, IntegrationConfig(events=[stop]))
    assert traj.termination == 'event'
    assert np.all((traj.states[:, 0] > 0) & (traj.states[:, 0] < 1))


def test_blow_up_is_reported_with_partial_trajectory():
    with pytest.raises(BlowUp) as info:
        integrate(exponential, 1.0, 0.0, 100.0)
    assert info.value.trajectory.t_max > 20


def test_step_limit():
    with pytest.raises(StepLimit) as info:
        integrate(exponential, 1.0, 0.0, 20.0, IntegrationConfig(max_steps=5))
    assert info.value.trajectory.termination == 'step_limit'


def test_rejects_bad_configuration():
    with pytest.raises(InvalidParameters):
        IntegrationConfig(rel_tol=0.0)
    with pytest.raises(InvalidParameters):
        IntegrationConfig(max_steps=0)
    with pytest.raises(InvalidParameters):
        integrate(exponential, 1.0, 1.0, 1.0)
