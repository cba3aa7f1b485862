#!/usr/bin/env python3
"""
Spectral Solver Runner
======================
Command-line front end: single solves, benchmark suites, performance
profiles and gradient checks.

Exit codes: 0 success, 1 non-convergence (or failed gradient check),
2 usage / configuration error, 3 file error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.bench.profiles import METRICS, default_tau_grid, export_profile, export_ratios, perf_profile
from src.bench.suite import export_records, format_table, load_records, run_suite
from src.spectral.diagnostics import append_report, rate_report
from src.spectral.errors import ConfigError, FileError, SpectralError
from src.spectral.linesearch import RELAX_FORMS, LineSearchConfig
from src.spectral.problems import check_gradient, get_problem, list_problems, standard_collection
from src.spectral.solver import TOL_MODES, SolverConfig, export_trace, minimize
from src.spectral.stepsize import SafeguardConfig, StepSizeRule

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CONVERGED = 1
EXIT_USAGE = 2
EXIT_IO = 3

ALL_RULES = ",".join(r.value for r in StepSizeRule)


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter, argparse.RawDescriptionHelpFormatter):
    pass


# =============================================================================
# ARGUMENTS
# =============================================================================

def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _logging_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_mutually_exclusive_group()
    group.add_argument('--verbose', '-v', action='store_true', help='Log every iteration (DEBUG)')
    group.add_argument('--quiet', '-q', action='store_true', help='Only log warnings and errors')
    return parent


def _config_parent() -> argparse.ArgumentParser:
    """One flag per SolverConfig field; defaults come from the config dataclasses."""
    sg, ls, sc = SafeguardConfig(), LineSearchConfig(), SolverConfig()
    parent = argparse.ArgumentParser(add_help=False)

    group = parent.add_argument_group('safeguard')
    group.add_argument('--alpha-min', type=float, default=sg.alpha_min, help='Lower step bound')
    group.add_argument('--alpha-max', type=float, default=sg.alpha_max, help='Upper step bound')
    group.add_argument('--sigma1', type=float, default=sg.sigma1, help='Lower curvature factor, in (0,1)')
    group.add_argument('--sigma2', type=float, default=sg.sigma2, help='Upper curvature factor, in (1,2)')
    group.add_argument('--alpha0', type=float, default=sc.alpha0, help='Initial safeguarded step')

    group = parent.add_argument_group('line search')
    group.add_argument('--mu1', type=float, default=ls.mu1, help='Sufficient-decrease constant')
    group.add_argument('--mu2', type=float, default=ls.mu2, help='Rejection constant (mu1 <= mu2)')
    group.add_argument('--omega', type=float, default=ls.omega, help='Backtracking factor')
    group.add_argument('--relax', type=float, default=ls.relax_factor,
                       help='Relaxation factor theta in [0,1]; 0 gives plain generalized Armijo')
    group.add_argument('--gamma1', type=float, default=ls.gamma1, help='Certificate constant for p = 0')
    group.add_argument('--gamma2', type=float, default=ls.gamma2, help='Certificate constant for p >= 1')
    group.add_argument('--max-backtracks', type=int, default=ls.max_backtracks, help='Backtracking budget')
    group.add_argument('--ls-form', choices=RELAX_FORMS, default=ls.relax_form,
                       help='scaled: relaxation term multiplied by mu1*lambda; unscaled: added as is')

    group = parent.add_argument_group('stopping')
    group.add_argument('--tol', type=float, default=sc.tol, help='Gradient tolerance')
    group.add_argument('--tol-mode', choices=sorted(TOL_MODES), default='rel',
                       help='rel: |g_k| < tol*|g_0|; abs: |g_k| <= tol')
    group.add_argument('--max-iters', type=int, default=sc.max_iters, help='Iteration budget')
    group.add_argument('--max-time', type=float, default=sc.max_time_seconds, help='Wall-clock budget in seconds')
    return parent


def build_parser() -> argparse.ArgumentParser:
    log_parent = _logging_parent()
    cfg_parent = _config_parent()

    parser = argparse.ArgumentParser(
        prog='run_tbb',
        description='Two-point and three-point spectral gradient solvers',
        formatter_class=_HelpFormatter,
        epilog="""
Examples:
  python src/run_tbb.py solve --problem ext_rosenbrock --n 10000 --rule tbb2p --tol-mode abs --tol 1e-4
  python src/run_tbb.py bench --problems all --n 1000,10000 --rules bb1,tbb1p --out records.csv
  python src/run_tbb.py profile --in records.csv --metric iters --out profile.csv
  python src/run_tbb.py check-grad --problem block_chained --n 50
  python src/run_tbb.py list-problems
        """,
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('solve', parents=[log_parent, cfg_parent], formatter_class=_HelpFormatter,
                       help='Run one solve and print `status iters f_final gnorm time_s`')
    p.add_argument('--problem', required=True, help='Collection name (see list-problems)')
    p.add_argument('--n', type=int, required=True, help='Dimension')
    p.add_argument('--rule', required=True, help=f'Step-size rule ({ALL_RULES})')
    p.add_argument('--trace', help='Write the iteration trace CSV here')
    p.add_argument('--diagnose', action='store_true',
                   help='Append rate diagnostics to the trace CSV (requires --trace)')

    p = sub.add_parser('bench', parents=[log_parent, cfg_parent], formatter_class=_HelpFormatter,
                       help='Run a problems x rules suite and write a records CSV')
    p.add_argument('--problems', default='all', help='Comma-separated names, or "all"')
    p.add_argument('--n', type=_int_list, default=[1000], help='Comma-separated dimensions')
    p.add_argument('--rules', default=ALL_RULES, help='Comma-separated step-size rules')
    p.add_argument('--out', required=True, help='Records CSV path')
    p.add_argument('--workers', type=int, default=1, help='Parallel solver threads')

    p = sub.add_parser('profile', parents=[log_parent], formatter_class=_HelpFormatter,
                       help='Compute performance profiles from a records CSV')
    p.add_argument('--in', dest='in_path', required=True, help='Records CSV produced by bench')
    p.add_argument('--metric', choices=list(METRICS), default='iters', help='Cost metric')
    p.add_argument('--out', required=True, help='Profile CSV path')
    p.add_argument('--tau-max', type=float, default=16.0, help='Largest tau in the grid')
    p.add_argument('--tau-points', type=int, default=50, help='Number of log-spaced tau values')
    p.add_argument('--ratios', help='Also write the ratio matrix CSV here')

    p = sub.add_parser('check-grad', parents=[log_parent], formatter_class=_HelpFormatter,
                       help='Compare the analytic gradient with central differences')
    p.add_argument('--problem', required=True, help='Collection name')
    p.add_argument('--n', type=int, required=True, help='Dimension')
    p.add_argument('--points', type=int, default=10, help='Random points besides x0')
    p.add_argument('--seed', type=int, default=0, help='Random seed')

    sub.add_parser('list-problems', parents=[log_parent], formatter_class=_HelpFormatter,
                   help='Print `name,dim_constraint` for every collection member')
    return parser


def solver_config(args: argparse.Namespace, rule: StepSizeRule = StepSizeRule.TBB1,
                  keep_points: bool = False) -> SolverConfig:
    return SolverConfig(
        rule=rule,
        safeguard=SafeguardConfig(
            alpha_min=args.alpha_min, alpha_max=args.alpha_max, sigma1=args.sigma1, sigma2=args.sigma2,
        ),
        linesearch=LineSearchConfig(
            mu1=args.mu1, mu2=args.mu2, omega=args.omega, relax_factor=args.relax,
            max_backtracks=args.max_backtracks, gamma1=args.gamma1, gamma2=args.gamma2,
            relax_form=args.ls_form,
        ),
        tol=args.tol,
        tol_mode=args.tol_mode,
        max_iters=args.max_iters,
        max_time_seconds=args.max_time,
        alpha0=args.alpha0,
        keep_points=keep_points,
    )


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_solve(args: argparse.Namespace) -> int:
    if args.diagnose and not args.trace:
        raise ConfigError("--diagnose appends to the trace CSV and needs --trace")
    problem = get_problem(args.problem, args.n)
    cfg = solver_config(args, StepSizeRule.from_name(args.rule), keep_points=args.diagnose)
    result = minimize(problem, cfg)
    print(result.summary_line())

    if args.trace:
        export_trace(result, args.trace)
    if args.diagnose:
        if problem.known_opt_point is None:
            logger.warning(f"{problem.name} has no known minimizer, diagnostics skipped")
        else:
            append_report(rate_report(result, problem), args.trace)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def cmd_bench(args: argparse.Namespace) -> int:
    names = None if args.problems.strip().lower() == 'all' else [
        n.strip() for n in args.problems.split(',') if n.strip()
    ]
    rules = [StepSizeRule.from_name(r) for r in args.rules.split(',') if r.strip()]
    if not args.n:
        raise ValueError("--n needs at least one dimension")

    problems = []
    for n in args.n:
        problems.extend(standard_collection(n, names))
    if not problems:
        raise ValueError("no problem accepts the requested dimensions")

    records = run_suite(problems, rules, solver_config(args), workers=args.workers)
    export_records(records, args.out)
    print(format_table(records))
    return EXIT_OK


def cmd_profile(args: argparse.Namespace) -> int:
    records = load_records(args.in_path)
    profile = perf_profile(records, args.metric, default_tau_grid(args.tau_max, args.tau_points))
    export_profile(profile, args.out)
    if args.ratios:
        export_ratios(profile, args.ratios)

    print("solver P(1) solved")
    solved = profile.solved_fraction()
    for j, name in enumerate(profile.solver_names):
        print(f"{name} {profile.values[0, j]:.4f} {solved[name]:.4f}")
    return EXIT_OK


def cmd_check_grad(args: argparse.Namespace) -> int:
    problem = get_problem(args.problem, args.n)
    report = check_gradient(problem, n_random=args.points, seed=args.seed, progress=not args.quiet)
    print(f"{report.max_rel_error:.6e}")
    if not report.passed:
        logger.error(f"{problem.name}: gradient mismatch {report.max_rel_error:.3e} > {report.tolerance:g}")
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_list_problems(args: argparse.Namespace) -> int:
    for name, rule in list_problems():
        print(f"{name},{rule}")
    return EXIT_OK


COMMANDS = {
    'solve': cmd_solve,
    'bench': cmd_bench,
    'profile': cmd_profile,
    'check-grad': cmd_check_grad,
    'list-problems': cmd_list_problems,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )

    try:
        return COMMANDS[args.command](args)
    except FileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except (SpectralError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
