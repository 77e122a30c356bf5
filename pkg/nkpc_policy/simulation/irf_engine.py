"""Expected impulse responses and stochastic simulation

Expected paths iterate (pi_{t+1}, z_{t+1}) = M (pi_t, z_t) from the initial
vector of each regime:

    predetermined  pi0 = (x0 - f_z*z0)/f_pi
    ramsey         pi0 = lambda/(1 - beta*q*rho*lambda) * z0
    forward        pi0 = (1/beta)/(lambda_sr - rho) * z0
    discretion     same as forward with f_pi = -epsilon

Shocks are drawn from numpy's PCG64 generator seeded with a 64-bit integer.
"""

import logging
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np

from ..mechanism.nkpc import close_loop
from ..models.data_structures import (InitialConvention, InstrumentConvention, IRFPath,
                                      ModelParams, PolicyRule, PolicySolution, SolverMode)
from ..models.errors import InvalidParams
from ..solvers.policy_solvers import (anchor_inflation, discretion_solution,
                                      forward_projection, ramsey_rule)

logger = logging.getLogger(__name__)

RuleOrSolution = Union[PolicyRule, PolicySolution, None]


class _Regime(NamedTuple):
    """Everything needed to propagate one regime."""
    transition: np.ndarray
    rule: PolicyRule
    pi0_per_z0: float
    pi0_offset: float
    pi_loading: float
    projection: Optional[float]


class PathBatch(NamedTuple):
    """Arrays of shape (n_paths, horizon)."""
    pi: np.ndarray
    x: np.ndarray
    z: np.ndarray


def _rule_of(rule_or_solution: RuleOrSolution) -> Optional[PolicyRule]:
    if isinstance(rule_or_solution, PolicySolution):
        return rule_or_solution.rule
    return rule_or_solution


def _regime(params: ModelParams, mode: SolverMode, rule_or_solution: RuleOrSolution,
            x0: Optional[float], z0: float, convention: InitialConvention) -> _Regime:
    rule = _rule_of(rule_or_solution)

    if mode == SolverMode.predetermined:
        if rule is None or x0 is None:
            raise InvalidParams('predetermined mode needs a rule and a given x0')
        if rule.convention != InstrumentConvention.predetermined:
            raise InvalidParams('predetermined mode needs a predetermined-instrument rule')
        closed = close_loop(params, rule)
        pi0 = anchor_inflation(rule, x0, z0)
        return _Regime(closed.base.transition, rule, 0.0, pi0, 0.0, None)

    if mode == SolverMode.ramsey:
        if x0 is not None:
            logger.warning('x0 is computed by the natural boundary condition in ramsey mode, '
                           f'ignoring x0 = {x0}')
        ramsey = ramsey_rule(params, convention)
        closed = close_loop(params, ramsey.rule, params.credibility_discount)
        return _Regime(closed.base.transition, ramsey.rule, ramsey.pi0, 0.0, ramsey.pi0, None)

    if mode == SolverMode.discretion:
        rule, projection = discretion_solution(params)
    else:
        if rule is None:
            raise InvalidParams('forward mode needs a rule')
        if rule.convention != InstrumentConvention.forward_looking:
            raise InvalidParams('forward mode needs a forward-looking-instrument rule')
        projection = forward_projection(params, rule.f_pi)
    if x0 is not None:
        logger.debug(f'x0 is unknown with a forward-looking instrument, ignoring x0 = {x0}')
    closed = close_loop(params, rule)
    return _Regime(closed.base.transition, rule, projection.g, 0.0, projection.g, projection.g)


def _propagate(regime: _Regime, z0, horizon: int, shocks: Optional[np.ndarray] = None,
               anchor_on_projection: bool = False):
    """Run the recursion; leading axes of z0 and shocks are independent paths."""
    z0 = np.asarray(z0, dtype=float)
    shape = z0.shape + (horizon,)
    pi = np.empty(shape)
    z = np.empty(shape)
    (a, c), (_, rho) = regime.transition
    pi[..., 0] = regime.pi0_per_z0 * z0 + regime.pi0_offset
    z[..., 0] = z0

    for t in range(horizon - 1):
        e = 0.0 if shocks is None else shocks[..., t]
        z[..., t + 1] = rho * z[..., t] + e
        if anchor_on_projection:
            # pi = g*z on the stable eigenvector
            pi[..., t + 1] = regime.projection * z[..., t + 1]
        else:
            pi[..., t + 1] = a * pi[..., t] + c * z[..., t] + regime.pi_loading * e

    x = regime.rule.f_pi * pi + regime.rule.f_z * z
    return pi, x, z


def _check_horizon(horizon: int) -> None:
    if horizon < 1:
        raise InvalidParams(f'horizon must be at least 1, got {horizon}')


def expected_irf(params: ModelParams, mode: Union[SolverMode, str],
                 rule_or_solution: RuleOrSolution = None, z0: float = 1.0,
                 x0: Optional[float] = None, horizon: int = 40,
                 convention: InitialConvention = InitialConvention.quasi_commitment) -> IRFPath:
    """Expected impulse response following z0.

    Args:
        params (ModelParams): Transmission mechanism and preferences.
        mode (SolverMode): Regime, one row of the expected-IRF table.
        rule_or_solution (PolicyRule | PolicySolution): Rule for the
            predetermined and forward modes, ignored by ramsey and discretion.
        z0 (float): Initial cost-push shock.
        x0 (float): Initial instrument, required (and only used) in predetermined mode.
        horizon (int): Number of periods.
        convention (InitialConvention): Discount in the Ramsey initial vector.

    Returns:
        IRFPath: the recursion iterated from the regime's initial vector, read
        off pi = g*z for forward-looking instruments.
    """
    mode = SolverMode(mode)
    _check_horizon(horizon)
    regime = _regime(params, mode, rule_or_solution, x0, z0, convention)
    pi, x, z = _propagate(regime, z0, horizon, anchor_on_projection=regime.projection is not None)
    return IRFPath(horizon=horizon, pi=tuple(pi.tolist()), x=tuple(x.tolist()),
                   z=tuple(z.tolist()), mode=mode, rule=regime.rule)


def simulate(params: ModelParams, mode: Union[SolverMode, str],
             rule_or_solution: RuleOrSolution = None, z0: float = 1.0,
             x0: Optional[float] = None, horizon: int = 40, seed: int = 0,
             convention: InitialConvention = InitialConvention.quasi_commitment) -> IRFPath:
    """One stochastic path with z_{t+1} = rho*z_t + eps_{t+1}, eps ~ N(0, sigma_eps^2).

    Forward-looking regimes stay on the stable eigenvector, pi_t = g*z_t.
    Ramsey inflation moves with the shock through lambda/(1 - beta*q*rho*lambda),
    which keeps the commitment recursion x_t = x_{t-1} - epsilon*pi_t.
    A predetermined instrument leaves inflation on its expected recursion.
    With sigma_eps = 0 the expected path is returned.
    """
    mode = SolverMode(mode)
    _check_horizon(horizon)
    if params.sigma_eps == 0:
        path = expected_irf(params, mode, rule_or_solution, z0, x0, horizon, convention)
        return path.model_copy(update={'seed': seed})

    regime = _regime(params, mode, rule_or_solution, x0, z0, convention)
    rng = np.random.default_rng(seed)
    shocks = params.sigma_eps * rng.standard_normal(horizon - 1)
    pi, x, z = _propagate(regime, z0, horizon, shocks,
                          anchor_on_projection=regime.projection is not None)
    return IRFPath(horizon=horizon, pi=tuple(pi.tolist()), x=tuple(x.tolist()),
                   z=tuple(z.tolist()), mode=mode, rule=regime.rule,
                   seed=seed, sigma_eps=params.sigma_eps)


def simulate_batch(params: ModelParams, mode: Union[SolverMode, str],
                   rule_or_solution: RuleOrSolution = None, z0: float = 1.0,
                   x0: Optional[float] = None, horizon: int = 40, n_paths: int = 1000,
                   seed: int = 0,
                   convention: InitialConvention = InitialConvention.quasi_commitment) -> PathBatch:
    """Many stochastic paths at once, drawn from a single seeded stream.

    Row i uses the i-th block of horizon-1 draws, so results only depend on
    (inputs, seed, n_paths).
    """
    mode = SolverMode(mode)
    _check_horizon(horizon)
    if n_paths < 1:
        raise InvalidParams(f'n_paths must be at least 1, got {n_paths}')
    regime = _regime(params, mode, rule_or_solution, x0, z0, convention)
    rng = np.random.default_rng(seed)
    shocks = params.sigma_eps * rng.standard_normal((n_paths, horizon - 1))
    pi, x, z = _propagate(regime, np.full(n_paths, z0, dtype=float), horizon, shocks,
                          anchor_on_projection=regime.projection is not None)
    logger.info(f'Simulated {n_paths} {mode.value} paths of {horizon} periods (seed {seed})')
    return PathBatch(pi=pi, x=x, z=z)


def foc_recursion_check(path: IRFPath, params: ModelParams, strict: bool = True) -> float:
    """Largest residual of the commitment recursion x_t = x_{t-1} - epsilon*pi_t, t >= 1.

    Args:
        path (IRFPath): Path to check.
        params (ModelParams): Parameters that produced the path.
        strict (bool): Reject paths that are not ramsey paths. With strict=False
            the residual of any path is returned, e.g. to show that discretion
            violates the recursion.
    """
    if strict and path.mode != SolverMode.ramsey:
        raise InvalidParams(f'the commitment recursion only holds on ramsey paths, got {path.mode.value}')
    if path.horizon < 2:
        return 0.0
    x = np.asarray(path.x)
    pi = np.asarray(path.pi)
    return float(np.max(np.abs(x[1:] - x[:-1] + params.epsilon * pi[1:])))


def write_path_csv(path: IRFPath, output_path: Union[str, Path, None] = None) -> str:
    """Write `t,pi,x,z` with 12 significant digits; returns the CSV text."""
    text = path.to_frame().to_csv(index=False, float_format='%.12g', lineterminator='\n')
    if output_path is not None:
        Path(output_path).write_text(text)
        logger.info(f'Wrote {path.horizon} periods to {output_path}')
    return text
