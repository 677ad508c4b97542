"""Command line entry point: `analyze`, `simulate`, `compare` and `verify`."""

import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import attr
import numpy as np
import pandas as pd
import psutil
from attrs_strict import type_validator
from loguru import logger

from . import __pkg_name__, __version__, analytic, solver
from .config import ScenarioFile, load_scenario
from .errors import AuctionError, CheckFailure, ConfigError, ConvergenceError, DomainError, NumericError
from .montecarlo import SimulationConfig, draw_intrinsic_profiles, estimate_payoffs
from .strategies import AnalyticEquilibriumStrategy
from .utils_data import format_number, write_csv, write_pretty_json
from .utils_helpers import StrictArgumentParser, UsageError, debug_time, non_negative_float, parse_beta_list

EXIT_OK = 0
"""Successful command."""

EXIT_USAGE = 1
"""Malformed command line or invalid scenario file."""

EXIT_NUMERIC = 2
"""Numeric failure, non-convergence, or a failed verification check."""

CSV_HEADER = ['name', 'estimate', 'stderr', 'replications', 'seed']
"""Column order of the simulation report."""

REGRET_TOLERANCE = 1e-12
"""Largest accepted gain from misreporting in `verify`."""

EQUILIBRIUM_TOLERANCE = 2e-3
"""Largest accepted sup-norm distance between the best-response grid and the analytic equilibrium."""

REVELATION_PROFILES = 1000
"""Number of random intrinsic profiles compared in `verify`."""

DEVIATION_TYPES = 20
"""Number of random adjusted types scanned for profitable deviations in `verify`."""

# ----------------------------------------------------------------------------------------------------------------------
# Shared


def resolve_control(settings: ScenarioFile) -> float:
    """Return the numeric control value of a scenario, optimizing it when requested.

    Args:
        settings: ScenarioFile

    Returns:
        float: control value

    Raises:
        ConfigError: if `optimal` is requested outside the two-bidder setting

    """
    if not settings.wants_optimal_control:
        return float(settings.control_value)
    if settings.n_bidders != 2:
        raise ConfigError('control_value `optimal` requires n_bidders = 2', key='control_value')

    def payoff(control: float) -> float:
        return analytic.seller_expected_payoff(settings.beta, control)

    control, _value = solver.maximize_control(payoff, solver.default_control_bracket(settings.beta))
    return control


def _flag(value: bool) -> str:
    return 'true' if value else 'false'


# ----------------------------------------------------------------------------------------------------------------------
# analyze


def cmd_analyze(beta: float) -> List[str]:
    """Report the closed-form optimum and the Pareto verdict for one impact coefficient.

    Args:
        beta: impact coefficient

    Returns:
        list: output lines

    """
    comparison = analytic.pareto_compare(beta)
    rows = [
        ('beta', f'{beta:.6f}'),
        ('optimal_control', f'{analytic.optimal_control(beta):.6f}'),
        ('seller_payoff_initial', f'{analytic.seller_expected_payoff(beta, 0):.6f}'),
        ('seller_payoff_optimal', f'{comparison.seller_adjusted:.6f}'),
        ('bidder_payoff_optimal', f'{comparison.bidder_adjusted:.6f}'),
        ('seller_benchmark', f'{comparison.seller_benchmark:.6f}'),
        ('bidder_benchmark', f'{comparison.bidder_benchmark:.6f}'),
        ('seller_improves', _flag(comparison.seller_improves)),
        ('bidder_improves', _flag(comparison.bidder_improves)),
        ('pareto', _flag(comparison.pareto_optimal)),
    ]
    return [f'{name:<24}{value}' for name, value in rows]


# ----------------------------------------------------------------------------------------------------------------------
# simulate


def _with_extension(path: Path, extension: str) -> Path:
    """Append `extension` to the full file name, keeping any dots already in it."""
    return path.with_name(path.name + extension)


def cmd_simulate(config_path: Path, workers: int = 1, show_progress: bool = False) -> Tuple[Path, Path]:
    """Estimate payoffs for a scenario file and write `<output_path>.csv` and `<output_path>.json`.

    Args:
        config_path: path to the scenario file
        workers: number of worker threads. Default is 1
        show_progress: if True, show a progress bar. Default is False

    Returns:
        tuple: paths of the CSV and JSON reports

    Raises:
        ConfigError: if the reports cannot be written

    """
    settings = load_scenario(config_path)
    control = resolve_control(settings)
    start = debug_time('start simulate')
    report = estimate_payoffs(SimulationConfig(
        scenario=settings.scenario(control),
        replications=settings.replications,
        seed=settings.seed,
        workers=workers,
        show_progress=show_progress,
    ))
    debug_time('simulate', start)

    quantities = report.quantities()
    csv_path = _with_extension(settings.output_path, '.csv')
    json_path = _with_extension(settings.output_path, '.json')
    document = {
        'scenario': {
            'beta': settings.beta,
            'control_value': control,
            'n_bidders': settings.n_bidders,
            'replications': settings.replications,
            'seed': settings.seed,
        },
        'quantities': quantities,
    }
    rows = [CSV_HEADER] + [
        [row['name'], format_number(row['estimate']), format_number(row['stderr']), row['replications'], row['seed']]
        for row in quantities
    ]
    try:
        settings.output_path.parent.mkdir(parents=True, exist_ok=True)
        write_csv(csv_path, rows)
        write_pretty_json(json_path, document)
    except OSError as err:
        raise ConfigError(f'Cannot write output_path `{settings.output_path}`: {err}', key='output_path') from None
    logger.info('Wrote {csv_path} and {json_path}', csv_path=csv_path, json_path=json_path)
    return csv_path, json_path


# ----------------------------------------------------------------------------------------------------------------------
# compare


def cmd_compare(betas: Sequence[float]) -> str:
    """Tabulate the Pareto comparison for several impact coefficients.

    Args:
        betas: non-empty list of impact coefficients

    Returns:
        str: table followed by the two threshold values

    Raises:
        UsageError: if `betas` is empty

    """
    if not betas:
        raise UsageError('compare needs at least one beta value')
    records = []
    for beta in betas:
        comparison = analytic.pareto_compare(beta)
        records.append({
            'beta': comparison.beta,
            'seller_adjusted': comparison.seller_adjusted,
            'seller_benchmark': comparison.seller_benchmark,
            'bidder_adjusted': comparison.bidder_adjusted,
            'bidder_benchmark': comparison.bidder_benchmark,
            'seller_improves': _flag(comparison.seller_improves),
            'bidder_improves': _flag(comparison.bidder_improves),
            'pareto': _flag(comparison.pareto_optimal),
        })
    table = pd.DataFrame.from_records(records).to_string(index=False, float_format=lambda value: f'{value:.6f}')
    thresholds = [
        f'seller_threshold_beta   {analytic.SELLER_THRESHOLD_BETA:.6f}',
        f'bidder_threshold_beta   {analytic.BIDDER_THRESHOLD_BETA:.6f}',
    ]
    return '\n'.join([table, *thresholds])


# ----------------------------------------------------------------------------------------------------------------------
# verify


@attr.s(frozen=True)
class CheckResult:  # noqa: H601
    """Outcome of one verification check."""

    name: str = attr.ib(validator=type_validator())
    status: str = attr.ib(validator=attr.validators.in_({'pass', 'fail', 'skipped'}))
    residual: float = attr.ib(converter=float)
    detail: str = attr.ib(default='', validator=type_validator())

    def line(self) -> str:
        """Format the result as one table row.

        Returns:
            str: row text

        """
        return f'{self.name:<16}{self.status:<9}{self.residual:<12.3e}{self.detail}'.rstrip()


def _check_regret(settings: ScenarioFile, control: float) -> CheckResult:
    regret = solver.ic_regret_search(settings.scenario(control), truth_grid=101, deviation_grid=101)
    return CheckResult(
        name='ic_regret',
        status='pass' if regret.max_regret <= REGRET_TOLERANCE else 'fail',
        residual=regret.max_regret,
        detail=f'truth={regret.argmax_truth:.2f} report={regret.argmax_deviation:.2f}',
    )


def _check_concavity(settings: ScenarioFile) -> CheckResult:
    lo, hi = solver.default_control_bracket(settings.beta)
    verdict = solver.check_concavity(lambda control: analytic.seller_expected_payoff(settings.beta, control), lo, hi)
    return CheckResult(
        name='concavity',
        status='pass' if verdict.satisfied else 'fail',
        residual=verdict.max_second_difference,
        detail=f'regime {verdict.regime.value} (slope at 0+: {verdict.initial_slope:.6f})',
    )


def _check_revelation(settings: ScenarioFile, control: float) -> CheckResult:
    scenario = settings.scenario(control)
    profiles = draw_intrinsic_profiles(scenario, settings.seed, 0, REVELATION_PROFILES)
    consistent = solver.revelation_consistency(scenario, profiles)
    return CheckResult(
        name='revelation',
        status='pass' if consistent else 'fail',
        residual=0.0 if consistent else 1.0,
        detail=f'{REVELATION_PROFILES} profiles',
    )


def _check_best_response(settings: ScenarioFile, control: float) -> CheckResult:
    scenario = settings.scenario(control)
    try:
        grid = solver.best_response_iteration(scenario, grid_size=512, tol=1e-6)
    except ConvergenceError as err:
        return CheckResult(name='best_response', status='fail', residual=err.residual, detail='no convergence')

    def equilibrium(types: np.ndarray) -> np.ndarray:
        return AnalyticEquilibriumStrategy().bids(types, scenario)

    distance = grid.distance_to(equilibrium)
    sample = draw_intrinsic_profiles(scenario, settings.seed, 0, DEVIATION_TYPES)[:, 0]
    gain = solver.deviation_scan(scenario, grid, scenario.type_function.evaluate(sample, control))
    passed = distance < EQUILIBRIUM_TOLERANCE and gain <= 10 * grid.spacing
    return CheckResult(
        name='best_response',
        status='pass' if passed else 'fail',
        residual=distance,
        detail=f'deviation gain {gain:.3e}',
    )


def cmd_verify(config_path: Path) -> List[CheckResult]:
    """Run the incentive, concavity, revelation and equilibrium checks for a scenario file.

    Checks that need the two-bidder closed forms are reported as skipped for other bidder counts.

    Args:
        config_path: path to the scenario file

    Returns:
        list: one CheckResult per check

    """
    settings = load_scenario(config_path)
    control = resolve_control(settings)
    results = []
    if settings.n_bidders == 2:
        results.extend([_check_regret(settings, control), _check_concavity(settings)])
    else:
        results.extend([
            CheckResult(name=name, status='skipped', residual=0.0, detail='needs two bidders')
            for name in ('ic_regret', 'concavity')
        ])
    results.extend([_check_revelation(settings, control), _check_best_response(settings, control)])
    return results


def require_all_passed(results: Sequence[CheckResult]) -> None:
    """Raise for the first failed check.

    Args:
        results: CheckResults from `cmd_verify`

    Raises:
        CheckFailure: naming the first failed check

    """
    for result in results:
        if result.status == 'fail':
            raise CheckFailure(f'Check `{result.name}` failed (residual {result.residual:.3e})', check=result.name)


# ----------------------------------------------------------------------------------------------------------------------
# Main


def build_parser() -> StrictArgumentParser:
    """Configure the CLI options.

    Returns:
        StrictArgumentParser: parser with one sub-command per verb

    """
    parser = StrictArgumentParser(prog='adjustable-auction', description='Type-adjustable first-price auction lab.')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='Increase log verbosity (-v, -vv)')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=StrictArgumentParser)

    analyze = commands.add_parser('analyze', help='Closed-form optimum and Pareto verdict')
    analyze.add_argument('--beta', required=True, type=non_negative_float, help='Impact coefficient')

    simulate = commands.add_parser('simulate', help='Monte Carlo estimates written as CSV and JSON')
    simulate.add_argument('--config', required=True, type=Path, help='Scenario file')
    simulate.add_argument('--workers', type=int, default=1, help='Worker threads. 0 uses every physical core')
    simulate.add_argument('--progress', action='store_true', help='Show a progress bar')

    compare = commands.add_parser('compare', help='Pareto comparison table')
    compare.add_argument('--beta', required=True, type=parse_beta_list, help='Comma-separated impact coefficients')

    verify = commands.add_parser('verify', help='Incentive, concavity, revelation and equilibrium checks')
    verify.add_argument('--config', required=True, type=Path, help='Scenario file')
    return parser


def _dispatch(args) -> None:
    if args.command == 'analyze':
        print('\n'.join(cmd_analyze(args.beta)))  # noqa: T001
    elif args.command == 'simulate':
        if args.workers < 0:
            raise UsageError(f'--workers must be non-negative, but received `{args.workers}`')
        workers = args.workers or psutil.cpu_count(logical=False) or 1
        csv_path, json_path = cmd_simulate(args.config, workers=workers, show_progress=args.progress)
        print(f'{csv_path}\n{json_path}')  # noqa: T001
    elif args.command == 'compare':
        print(cmd_compare(args.beta))  # noqa: T001
    else:
        results = cmd_verify(args.config)
        print('\n'.join(result.line() for result in results))  # noqa: T001
        require_all_passed(results)


def _write_stderr(message: str) -> None:
    sys.stderr.write(message)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the exit status.

    Existing loguru handlers are replaced by one stderr handler at the requested verbosity. Afterwards a single
    stderr handler at loguru's default level remains.

    Args:
        argv: arguments without the program name. Default is `sys.argv[1:]`

    Returns:
        int: 0 on success, 1 for usage or configuration errors, 2 for numeric failures and failed checks

    """
    sink_id = None
    try:
        args = build_parser().parse_args(argv)
        level = {0: 'WARNING', 1: 'INFO'}.get(args.verbose, 'DEBUG')
        logger.remove()
        sink_id = logger.add(_write_stderr, level=level)
        logger.enable(__pkg_name__)
        _dispatch(args)
    except (UsageError, ConfigError, DomainError) as err:
        print(f'error: {err}', file=sys.stderr)  # noqa: T001
        return EXIT_USAGE
    except (NumericError, CheckFailure) as err:
        print(f'error: {err}', file=sys.stderr)  # noqa: T001
        return EXIT_NUMERIC
    except AuctionError as err:  # pragma: no cover
        print(f'error: {err}', file=sys.stderr)  # noqa: T001
        return EXIT_NUMERIC
    finally:
        if sink_id is not None:
            logger.remove(sink_id)
            logger.add(_write_stderr)
    return EXIT_OK


def run() -> None:  # pragma: no cover
    """Console script entry point."""
    sys.exit(main())
