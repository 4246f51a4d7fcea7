import argparse
import json
import logging
import signal
import sys
from pathlib import Path

import numpy as np

from asymptotics import cigar_checks, exponent_report, profile_limit_diagnostics
from config import EPS_LADDER, GAP_TOL, GAUSS_TOL, IDENTITY_TOL, SEED, TAIL_FRACTION, get_jobs, setup_logging
from errors import CheckFailure, CriticalLevel, InvalidParameters, OutOfRegime, SolitonLabError
from exact_solutions import cylinder_solutions, flat_gaussian, ricci_cylinder, schouten_shrinker_local
from phase_system import PhaseState, SolitonParams, nullcline_h, nullcline_k, vector_field
from potential_theory import audit_registry, classify_families, rectifiability_witness
from profile_store import ProfileStore, dumps
from shooting import construct_steady, verify_nonexistence
from warped_geometry import curvature, identity_checks, level_set_geometry, relative_residual

logger = logging.getLogger('main')

TRACE_TOL = 1e-10
REQUIRED = {
    'construct': ('n', 'rho'),
    'verify': ('profile',),
    'asymptotics': ('profile',),
    'phase-portrait': ('n', 'rho'),
}


def signal_handler(signum, frame):
    """Handle shutdown signals gracefully"""
    print("\nReceived shutdown signal. Stopping.", file=sys.stderr)
    sys.exit(1)


def emit(record: dict):
    """Machine-readable status line on stdout"""
    print(dumps(record))


def banner(*lines):
    for line in lines:
        logger.info(line)
    logger.info("-" * 50)


def cmd_construct(args) -> int:
    p = SolitonParams(n=args.n, rho=args.rho, lam=0.0, kappa=1)
    banner("Constructing steady soliton", f"n = {p.n}, rho = {p.rho:g}", f"eps ladder: {args.eps_ladder}")
    store = ProfileStore()
    try:
        prof, report = construct_steady(p, args.eps_ladder, span=args.span, normalize=args.normalize,
                                        tol=args.gap_tol, jobs=get_jobs(args.jobs))
    except OutOfRegime as e:
        if e.reason == 'nonexistence_regime':
            try:
                e.details['obstruction'] = verify_nonexistence(p).to_dict()
            except SolitonLabError as inner:
                logger.info("obstruction not exhibited: %s", inner)
        raise
    path = store.save_profile(prof, args.output)
    if args.report:
        store.save_report(report.to_dict(), args.report)
    emit({'status': 'ok', 'profile': str(path), 'samples': len(prof), 'max_gap': report.max_gap,
          'residual': report.residual, 'tip_R': report.tip_R})
    return 0


def _worst(checks: dict):
    return max(checks.items(), key=lambda item: item[1]['value'] / item[1]['tol'])


def cmd_verify(args) -> int:
    store = ProfileStore()
    prof = store.load_profile(args.profile)
    tol = args.tol
    banner("Verifying profile", f"file: {args.profile}", f"tolerance: {tol:g}")
    checks = {
        'soliton_residual': {'value': relative_residual(prof), 'tol': tol},
        'trace': {'value': curvature(prof).trace_deviation(), 'tol': TRACE_TOL},
    }
    for name, value in identity_checks(prof, tol=tol).sup().items():
        checks[f"identity_{name}"] = {'value': value, 'tol': tol}
    try:
        checks['gauss_riccati'] = {'value': level_set_geometry(prof).gauss_gap(), 'tol': GAUSS_TOL}
    except CriticalLevel as e:
        logger.info("level sets skipped: %s", e)
    for name, value in rectifiability_witness(prof, tol=tol).sup().items():
        checks[f"rectifiability_{name}"] = {'value': value, 'tol': tol}
    for check in checks.values():
        check['passed'] = check['value'] < check['tol']
    passed = all(check['passed'] for check in checks.values())
    worst_name, worst = _worst(checks)
    report = {'profile': str(args.profile), 'params': prof.params.to_dict(), 'checks': checks,
              'worst': {'check': worst_name, **worst}, 'passed': passed}
    if args.output:
        store.save_report(report, args.output)
    emit({'status': 'ok' if passed else 'failed', 'reason': None if passed else CheckFailure.reason,
          'worst': report['worst']})
    return 0 if passed else 1


def cmd_asymptotics(args) -> int:
    store = ProfileStore()
    prof = store.load_profile(args.profile)
    banner("Asymptotic exponents", f"file: {args.profile}", f"tail fraction: {args.tail_fraction:g}")
    exponents = exponent_report(prof, args.tail_fraction)
    report = {'profile': str(args.profile), 'exponents': exponents.to_dict()}
    passed = exponents.passed
    report['limits'] = profile_limit_diagnostics(prof, args.tail_fraction).to_dict()
    if prof.params.is_cigar:
        cigar = cigar_checks(prof, args.tail_fraction)
        report['cigar'] = cigar.to_dict()
        passed = passed and cigar.passed
    report['passed'] = passed
    if args.output:
        store.save_report(report, args.output)
    for row in exponents.rows:
        logger.info("%-8s predicted %.6f fitted %.6f (%s)", row['quantity'], row['predicted'], row['fitted'],
                    'pass' if row['passed'] else 'FAIL')
    emit({'status': 'ok' if passed else 'failed', 'reason': None if passed else 'exponent_mismatch',
          'exponents': {row['quantity']: row['fitted'] for row in exponents.rows}})
    return 0 if passed else 1


def portrait_rows(p: SolitonParams, x_range, y_range, grid: int, omega: float = 1.0):
    """Vector field on a grid plus the x-nullcline of the steady scalar ODE"""
    xs = np.linspace(*x_range, grid)
    ys = np.linspace(*y_range, grid)
    X, Y = np.meshgrid(xs, ys, indexing='ij')
    dx, dy, _ = vector_field(p, PhaseState(X.ravel(), Y.ravel(), omega))
    rows = [('field', x, y, u, v) for x, y, u, v in zip(X.ravel(), Y.ravel(), dx, dy)]
    if p.lam != 0 or p.kappa != 1:
        return rows
    if p.rho < p.cigar_rho and not p.is_cigar:
        if y_range[1] > 0:
            s = np.linspace(max(y_range[0], 0.0), y_range[1], grid)
            kind, x_line, y_line = 'nullcline_h', nullcline_h(p, s), s
        else:
            return rows
    elif -y_range[0] > 0:
        s = np.linspace(max(-y_range[1], 0.0), -y_range[0], grid)
        kind, x_line, y_line = 'nullcline_k', nullcline_k(p, s), -s
    else:
        return rows
    ndx, ndy, _ = vector_field(p, PhaseState(x_line, y_line, omega))
    rows.extend((kind, x, y, u, v) for x, y, u, v in zip(x_line, y_line, ndx, ndy))
    return rows


def cmd_phase_portrait(args) -> int:
    p = SolitonParams(n=args.n, rho=args.rho, lam=args.lam, kappa=args.kappa)
    banner("Phase portrait", f"n = {p.n}, rho = {p.rho:g}, lambda = {p.lam:g}, kappa = {p.kappa}")
    rows = portrait_rows(p, args.x_range, args.y_range, args.grid, args.omega)
    path = ProfileStore().save_portrait(rows, args.output)
    emit({'status': 'ok', 'portrait': str(path), 'rows': len(rows)})
    return 0


def _cylinders(n: int, rho: float, lam: float):
    if rho == 0:
        return [ricci_cylinder(n, lam)]
    return cylinder_solutions(n, rho, lam)


def cmd_classify(args) -> int:
    if args.what == 'cylinders':
        if args.n is None or args.rho is None:
            raise InvalidParameters("classify cylinders needs --n and --rho")
        entries = [sol.to_dict() for sol in _cylinders(args.n, args.rho, args.lam)]
    else:
        entries = classify_families(n=args.n or 5, f_value=args.f)
        if args.audit:
            entries = {'families': entries, 'audit': [a.to_dict() for a in audit_registry(seed=args.seed)]}
    if args.output:
        ProfileStore().save_report(entries, args.output)
    print(dumps(entries, indent=2))
    return 0


def cmd_exact(args) -> int:
    grid = {'extent': args.extent, 'samples': args.samples}
    if args.kind == 'cylinder':
        if args.n is None or args.rho is None:
            raise InvalidParameters("exact cylinder needs --n and --rho")
        found = [s for s in _cylinders(args.n, args.rho, args.lam)
                 if args.kappa is None or s.kappa == args.kappa]
        if not found:
            raise OutOfRegime(f"no cylinder for n={args.n} rho={args.rho} lambda={args.lam} kappa={args.kappa}",
                              reason='no_cylinder')
        r = np.linspace(0.0, args.extent, args.samples)
        prof = found[0].profile(r, omega0=args.omega0, a0=args.a0, b0=args.b0)
    elif args.kind == 'flat':
        if args.n is None or args.rho is None:
            raise InvalidParameters("exact flat needs --n and --rho")
        prof = flat_gaussian(args.n, args.rho, args.lam, a0=args.a0, b0=args.b0, **grid)
    else:
        prof = schouten_shrinker_local(args.a, args.b, args.lam, r0=args.r0, c=args.c, d=args.d, e=args.e, **grid)
    path = ProfileStore().save_profile(prof, args.output)
    emit({'status': 'ok', 'profile': str(path), 'samples': len(prof), 'residual': relative_residual(prof)})
    return 0


COMMANDS = {
    'construct': cmd_construct,
    'verify': cmd_verify,
    'asymptotics': cmd_asymptotics,
    'phase-portrait': cmd_phase_portrait,
    'classify': cmd_classify,
    'exact': cmd_exact,
}


def _floats(text: str):
    return tuple(float(v) for v in text.split(','))


def build_parser():
    parser = argparse.ArgumentParser(prog='rho-soliton-lab',
                                     description="Warped-product gradient rho-Einstein soliton laboratory")
    parser.add_argument('--config', type=Path, help="JSON file of defaults; explicit flags win")
    parser.add_argument('--jobs', type=int, default=None, help="worker processes for the eps-family")
    sub = parser.add_subparsers(dest='command', required=True)
    commands = sub.choices

    p = sub.add_parser('construct', help="build a complete steady soliton by eps-family shooting")
    p.add_argument('--n', type=int)
    p.add_argument('--rho', type=float)
    p.add_argument('--eps-ladder', type=_floats, default=EPS_LADDER)
    p.add_argument('--span', type=float)
    p.add_argument('--gap-tol', type=float, default=GAP_TOL)
    p.add_argument('--normalize', action='store_true')
    p.add_argument('--output', default='profile.json')
    p.add_argument('--report')

    p = sub.add_parser('verify', help="soliton residuals and identity suite of a profile")
    p.add_argument('--profile')
    p.add_argument('--tol', type=float, default=IDENTITY_TOL)
    p.add_argument('--output')

    p = sub.add_parser('asymptotics', help="predicted vs fitted growth exponents of a profile")
    p.add_argument('--profile')
    p.add_argument('--tail-fraction', type=float, default=TAIL_FRACTION)
    p.add_argument('--output')

    p = sub.add_parser('phase-portrait', help="sample the phase field and its nullcline as CSV")
    p.add_argument('--n', type=int)
    p.add_argument('--rho', type=float)
    p.add_argument('--lambda', dest='lam', type=float, default=0.0)
    p.add_argument('--kappa', type=int, default=1)
    p.add_argument('--omega', type=float, default=1.0)
    p.add_argument('--x-range', type=float, nargs=2, default=(-1.5, 1.5))
    p.add_argument('--y-range', type=float, nargs=2, default=(-5.0, 5.0))
    p.add_argument('--grid', type=int, default=50)
    p.add_argument('--output', default='portrait.csv')

    p = sub.add_parser('classify', help="enumerate cylinders or classify potential families")
    p.add_argument('what', choices=('cylinders', 'families'))
    p.add_argument('--n', type=int)
    p.add_argument('--rho', type=float)
    p.add_argument('--lambda', dest='lam', type=float, default=0.0)
    p.add_argument('--f', type=float, default=2.0)
    p.add_argument('--audit', action='store_true')
    p.add_argument('--seed', type=int, default=SEED)
    p.add_argument('--output')

    p = sub.add_parser('exact', help="write a closed-form profile")
    p.add_argument('kind', choices=('cylinder', 'flat', 'schouten'))
    p.add_argument('--n', type=int)
    p.add_argument('--rho', type=float)
    p.add_argument('--lambda', dest='lam', type=float, default=0.0)
    p.add_argument('--kappa', type=int)
    p.add_argument('--omega0', type=float)
    p.add_argument('--a0', type=float, default=0.0)
    p.add_argument('--b0', type=float, default=0.0)
    p.add_argument('--a', type=float, default=0.0)
    p.add_argument('--b', type=float, default=1.0)
    p.add_argument('--r0', type=float, default=0.0)
    p.add_argument('--c', type=float, default=0.0)
    p.add_argument('--d', type=float, default=0.0)
    p.add_argument('--e', type=float, default=0.0)
    p.add_argument('--extent', type=float, default=10.0)
    p.add_argument('--samples', type=int, default=401)
    p.add_argument('--output', default='profile.json')
    return parser, commands


def parse_args(argv=None) -> argparse.Namespace:
    """Parse flags; a --config file supplies defaults that explicit flags override"""
    parser, commands = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        overrides = json.loads(args.config.read_text(encoding='utf-8'))
        if not isinstance(overrides, dict):
            raise InvalidParameters(f"{args.config}: config must be a JSON object")
        overrides = {key.replace('-', '_'): value for key, value in overrides.items()}
        if 'lambda' in overrides:
            overrides['lam'] = overrides.pop('lambda')
        if 'jobs' in overrides:
            parser.set_defaults(jobs=overrides.pop('jobs'))
        commands[args.command].set_defaults(**overrides)
        args = parser.parse_args(argv)
    if getattr(args, 'eps_ladder', None) is not None:
        args.eps_ladder = tuple(float(v) for v in args.eps_ladder)
    missing = [name for name in REQUIRED.get(args.command, ()) if getattr(args, name, None) is None]
    if missing:
        raise InvalidParameters(f"{args.command} needs --{', --'.join(m.replace('_', '-') for m in missing)}")
    return args


def main(argv=None) -> int:
    # Set up signal handlers for graceful shutdown
    signal.signal(signal.SIGINT, signal_handler)
    signal.signal(signal.SIGTERM, signal_handler)
    try:
        setup_logging()
    except ValueError as e:
        emit({'status': 'error', 'reason': 'invalid_parameters', 'message': str(e)})
        return 2
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except SolitonLabError as e:
        logger.error("%s: %s", e.reason, e)
        emit({'status': 'error', 'reason': e.reason, 'message': str(e), **e.details})
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
