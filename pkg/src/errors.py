"""Exception hierarchy shared by the lab; exit codes are read by main.py."""


class SolitonLabError(Exception):
    exit_code = 1
    reason = 'error'

    def __init__(self, message='', reason=None, **details):
        if reason:
            self.reason = reason
        super().__init__(message or self.reason)
        self.details = details


# Regime and parameter rejections (exit 2)

class RegimeError(SolitonLabError):
    exit_code = 2
    reason = 'regime'


class SchoutenSingular(RegimeError):
    reason = 'schouten_singular'


class NotSteady(RegimeError):
    reason = 'not_steady'


class OutOfRegime(RegimeError):
    reason = 'out_of_regime'


class InvalidParameters(RegimeError):
    reason = 'invalid_parameters'


class NonpositiveTipCurvature(RegimeError):
    reason = 'nonpositive_tip_curvature'


class GaugeViolation(RegimeError):
    reason = 'gauge_violation'


# Convergence failures (exit 3)

class ConvergenceError(SolitonLabError):
    exit_code = 3
    reason = 'convergence'


class NotConverged(ConvergenceError):
    reason = 'not_converged'


class NoEventWithinSpan(ConvergenceError):
    reason = 'no_event_within_span'


class AnchoringFailed(ConvergenceError):
    reason = 'anchoring_failed'


class TailTooShort(ConvergenceError):
    reason = 'tail_too_short'


class ShootingError(ConvergenceError):
    reason = 'shooting_failed'


class IntegratorError(ConvergenceError):
    reason = 'integrator'

    def __init__(self, message='', trajectory=None, reason=None, **details):
        super().__init__(message, reason=reason, **details)
        self.trajectory = trajectory


class BlowUp(IntegratorError):
    reason = 'blow_up'


class StepLimit(IntegratorError):
    reason = 'step_limit'


class OutOfRange(IntegratorError):
    reason = 'out_of_range'


# Check failures and pointwise conditions (exit 1)

class CheckFailure(SolitonLabError):
    reason = 'check_failed'


class NonpositiveData(SolitonLabError):
    reason = 'nonpositive_data'


class EvaluationError(SolitonLabError):
    reason = 'evaluation_error'


class DenominatorZero(SolitonLabError):
    reason = 'denominator_zero'

    def __init__(self, x, y):
        super().__init__(f"denominator vanishes at ({x!r}, {y!r})", x=x, y=y)
        self.x = x
        self.y = y


class TipSingular(SolitonLabError):
    reason = 'tip_singular'


class CriticalLevel(SolitonLabError):
    reason = 'critical_level'
