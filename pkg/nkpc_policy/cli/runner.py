"""Command line front end

    python -m nkpc_policy {solve,irf,sweep,classify,stress,table2} [options]

Run configs are JSON documents (any YAML is accepted too) with the keys
beta, kappa, rho, sigma_eps, epsilon, q, mode, fpi, fz, x0, z0, horizon,
seed. Command line flags override the file. Exit codes: 0 success,
1 validation error, 2 internal inconsistency.
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import List, Optional

import yaml
from pydantic import ValidationError

from nkpc_policy import load_settings
from ..analysis.determinacy_map import sweep
from ..analysis.robustness_lab import misspecification_stress, write_stress_csv
from ..data_logic.reports import PolicyReports
from ..models.data_structures import (InitialConvention, InstrumentConvention, ModelParams,
                                      PolicyRule, RunConfig, SolverMode, SweepAxis)
from ..models.errors import InternalError, InvalidParams, PolicyModelError
from ..simulation.irf_engine import expected_irf, simulate, write_path_csv
from ..solvers.policy_solvers import solve

logger = logging.getLogger(__name__)

PARAM_KEYS = ('beta', 'kappa', 'rho', 'sigma_eps', 'epsilon', 'q')
REQUIRED_KEYS = ('beta', 'kappa', 'rho', 'epsilon', 'mode')
FLOAT_KEYS = PARAM_KEYS + ('fpi', 'fz', 'x0', 'z0')
INT_KEYS = ('horizon', 'seed')
CONFIG_KEYS = FLOAT_KEYS + INT_KEYS + ('mode', 'output_path', 'initial_convention')


class _ArgumentParser(argparse.ArgumentParser):
    """Report usage errors as validation errors instead of exiting with status 2."""

    def error(self, message):
        raise InvalidParams(message)


def _as_float(raw: dict, key: str, violations: List[str]) -> Optional[float]:
    value = raw.get(key)
    if value is None:
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        violations.append(f'{key} must be a number, got {value!r}')
        return None


def _as_int(raw: dict, key: str, violations: List[str]) -> Optional[int]:
    value = raw.get(key)
    if value is None:
        return None
    try:
        number = float(value)
    except (TypeError, ValueError):
        number = math.nan
    if isinstance(value, bool) or not number.is_integer():
        violations.append(f'{key} must be an integer, got {value!r}')
        return None
    return int(number)


def load_config(path=None, overrides: Optional[dict] = None, check_rule: bool = True) -> RunConfig:
    """Merge run defaults, the config document and command line overrides.

    Args:
        path (str | Path): JSON (or YAML) run config, optional.
        overrides (dict): Values taking precedence over the file; None values are skipped.
        check_rule (bool): Require the rule and x0 of the predetermined and forward modes.
            Sweeps and classifications only need the parameters.

    Returns:
        RunConfig: validated run.

    Raises:
        InvalidParams: listing every violated invariant.
    """
    defaults = load_settings()['run']
    raw = {'horizon': defaults['horizon'], 'q': defaults['q'],
           'sigma_eps': defaults['sigma_eps'], 'z0': defaults['z0']}
    if path is not None:
        with open(path) as f:
            document = yaml.safe_load(f)
        if not isinstance(document, dict):
            raise InvalidParams(f'config {path} must be a key/value document')
        for key in document:
            if key not in CONFIG_KEYS:
                logger.debug(f'Ignoring config key "{key}"')
        raw.update({k: v for k, v in document.items() if k in CONFIG_KEYS})
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})

    violations = [f'{key} is required' for key in REQUIRED_KEYS if raw.get(key) is None]
    values = {key: _as_float(raw, key, violations) for key in FLOAT_KEYS}
    horizon = _as_int(raw, 'horizon', violations)
    seed = _as_int(raw, 'seed', violations)
    if horizon is not None and horizon < 1:
        violations.append(f'horizon must be at least 1, got {horizon}')
    if seed is not None and seed < 0:
        violations.append(f'seed must be non-negative, got {seed}')

    params = None
    if all(values[k] is not None for k in PARAM_KEYS):
        try:
            params = ModelParams(**{k: values[k] for k in PARAM_KEYS})
        except InvalidParams as e:
            violations.extend(e.violations)

    mode = None
    if raw.get('mode') is not None:
        try:
            mode = SolverMode(raw['mode'])
        except ValueError:
            violations.append(f'mode must be one of {[m.value for m in SolverMode]}, got {raw["mode"]!r}')

    rule, x0 = None, values['x0']
    if mode == SolverMode.predetermined:
        if check_rule and values['fpi'] is None:
            violations.append('predetermined mode requires fpi')
        if check_rule and x0 is None:
            violations.append('predetermined mode requires x0')
        if values['fpi'] is not None:
            rule = PolicyRule(f_pi=values['fpi'], f_z=values['fz'] or 0.0,
                              convention=InstrumentConvention.predetermined)
    elif mode == SolverMode.forward:
        if check_rule and values['fpi'] is None:
            violations.append('forward mode requires fpi')
        if values['fz']:
            violations.append(f'fz must be 0 with a forward-looking instrument, got {values["fz"]}')
        elif values['fpi'] is not None:
            rule = PolicyRule(f_pi=values['fpi'], f_z=0.0,
                              convention=InstrumentConvention.forward_looking)
    if mode is not None and mode != SolverMode.predetermined:
        x0 = None

    convention = InitialConvention.quasi_commitment
    if raw.get('initial_convention') is not None:
        try:
            convention = InitialConvention(raw['initial_convention'])
        except ValueError:
            violations.append(f'initial_convention must be one of '
                              f'{[c.value for c in InitialConvention]}')

    if violations:
        raise InvalidParams(violations)
    return RunConfig(params=params, mode=mode, rule=rule, x0=x0, z0=values['z0'],
                     horizon=horizon, seed=seed, output_path=raw.get('output_path'),
                     initial_convention=convention)


def _build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument('-c', '--config', help='path to a JSON run config')
    common.add_argument('-o', '--output', dest='output_path', help='output file (default: stdout)')
    common.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    for key in PARAM_KEYS:
        common.add_argument(f'--{key.replace("_", "-")}', dest=key, type=float)
    common.add_argument('--mode', choices=[m.value for m in SolverMode])
    common.add_argument('--fpi', type=float)
    common.add_argument('--fz', type=float)
    common.add_argument('--x0', type=float)
    common.add_argument('--z0', type=float)
    common.add_argument('--horizon', type=int)
    common.add_argument('--seed', type=int)
    common.add_argument('--initial-convention', dest='initial_convention',
                        choices=[c.value for c in InitialConvention])

    parser = _ArgumentParser(prog='nkpc_policy', description=(
        'Solve, classify and simulate monetary policy rules for the '
        'new-Keynesian Phillips curve'))
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser('solve', parents=[common], help='print the solution record')
    subparsers.add_parser('irf', parents=[common], help='write an impulse response CSV')
    sweep_parser = subparsers.add_parser('sweep', parents=[common], help='write a classification grid')
    sweep_parser.add_argument('--axis', choices=[a.value for a in SweepAxis], default='f_pi')
    sweep_parser.add_argument('--from', dest='start', type=float, required=True)
    sweep_parser.add_argument('--to', dest='stop', type=float, required=True)
    sweep_parser.add_argument('--steps', type=int, default=101)
    subparsers.add_parser('classify', parents=[common], help='print feedback and bifurcation classes')
    stress_parser = subparsers.add_parser('stress', parents=[common], help='write a misspecification report')
    stress = load_settings()['stress']
    stress_parser.add_argument('--radius', type=float, default=stress['grid_radius'])
    stress_parser.add_argument('--grid-steps', type=int, default=stress['grid_steps'])
    stress_parser.add_argument('--stress-horizon', type=int, default=stress['horizon'])
    stress_parser.add_argument('--threshold', type=float)
    subparsers.add_parser('table2', parents=[common], help='reproduce the published numerical example')
    return parser


def _setup_logging(verbose: bool) -> None:
    settings = load_settings()['logging']
    level = logging.DEBUG if verbose else getattr(logging, settings['level'])
    logging.basicConfig(format=settings['format'], level=level, stream=sys.stderr, force=True)


def _emit(text: str, output_path) -> None:
    if output_path is None:
        sys.stdout.write(text)
    else:
        Path(output_path).write_text(text)
        logger.info(f'Wrote {output_path}')


def _overrides(args: argparse.Namespace) -> dict:
    return {key: getattr(args, key, None) for key in CONFIG_KEYS}


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == 'table2':
        frame = PolicyReports().table2_reproduction()
        print(frame.to_string(index=False, float_format='{:.2f}'.format))
        if not frame['passed'].all():
            logger.error('baseline calibration check failed')
            return 2
        return 0

    overrides = _overrides(args)
    if args.command in ('classify', 'sweep') and overrides['mode'] is None:
        overrides['mode'] = SolverMode.predetermined.value if args.command == 'sweep' else SolverMode.ramsey.value
    config = load_config(args.config, overrides, check_rule=args.command not in ('classify', 'sweep'))
    reports = PolicyReports(config.params)

    if args.command == 'solve':
        solution = solve(config.params, config.mode, config.rule, config.x0, config.initial_convention,
                         config.z0)
        _emit(json.dumps(reports.solution_record(config, solution)) + '\n', config.output_path)
    elif args.command == 'irf':
        if config.seed is not None:
            path = simulate(config.params, config.mode, config.rule, config.z0, config.x0,
                            config.horizon, config.seed, config.initial_convention)
        else:
            path = expected_irf(config.params, config.mode, config.rule, config.z0, config.x0,
                                config.horizon, config.initial_convention)
        _emit(write_path_csv(path), config.output_path)
    elif args.command == 'sweep':
        f_pi = config.rule.f_pi if config.rule is not None else None
        frame = sweep(config.params, args.axis, args.start, args.stop, args.steps, config.mode, f_pi)
        _emit(frame.to_csv(index=False, float_format='%.12g', lineterminator='\n'), config.output_path)
    elif args.command == 'classify':
        f_pi = args.fpi
        if f_pi is None:
            raise InvalidParams('classify requires fpi')
        print(reports.classification_table(f_pi).to_string(index=False))
    elif args.command == 'stress':
        solution = solve(config.params, config.mode, config.rule, config.x0, config.initial_convention,
                         config.z0)
        report = misspecification_stress(config.params, solution, args.radius, args.grid_steps,
                                         args.stress_horizon, args.threshold)
        _emit(write_stress_csv(report), config.output_path)
    return 0


def _fail(kind: str, violations: List[str]) -> None:
    sys.stderr.write(json.dumps({'error': kind, 'violations': violations}) + '\n')


def run(argv: Optional[List[str]] = None) -> int:
    """Parse argv, run the subcommand and return the exit code."""
    try:
        args = _build_parser().parse_args(argv)
    except InvalidParams as e:
        _fail('InvalidParams', e.violations)
        return 1
    _setup_logging(args.verbose)

    try:
        return _dispatch(args)
    except InternalError as e:
        logger.debug(f'Internal inconsistency: {e}')
        _fail('InternalError', [str(e)])
        return 2
    except InvalidParams as e:
        logger.debug(f'Invalid input: {e}')
        _fail('InvalidParams', e.violations)
        return 1
    except PolicyModelError as e:
        logger.debug(f'{type(e).__name__}: {e}')
        _fail(type(e).__name__, [str(e)])
        return 1
    except ValidationError as e:
        violations = [f'{".".join(str(p) for p in err["loc"])}: {err["msg"]}' for err in e.errors()]
        _fail('ValidationError', violations)
        return 1
    except (OSError, yaml.YAMLError) as e:
        logger.debug(f'Cannot read config: {e}')
        _fail('ConfigError', [str(e)])
        return 1
