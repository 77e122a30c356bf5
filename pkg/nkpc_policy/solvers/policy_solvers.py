"""Closed-form solvers for the four policy regimes

- simple rule with a predetermined instrument (rule inversion anchors pi0)
- Ramsey optimal policy under quasi-commitment (natural boundary condition)
- simple rule with a forward-looking instrument (stable eigenvector projection)
- discretion (static Phillips curve, f_pi = -epsilon)
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from nkpc_policy import load_settings
from ..lre_core.linear_system import classify_system
from ..mechanism.nkpc import close_loop, closed_loop_inflation_eigenvalue
from ..models.data_structures import (InitialConvention, InstrumentConvention, IRFPath,
                                      ModelParams, PolicyRule, PolicySolution,
                                      RamseySolution, SolverMode, StableProjection)
from ..models.errors import (InternalError, InvalidParams, NonInvertibleRule,
                             NotDeterminateUnderConvention, SingularProjection)

logger = logging.getLogger(__name__)

_SETTINGS = load_settings()
UNIT_TOL = _SETTINGS['numerics']['unit_tol']
DUAL_FORMULA_RTOL = _SETTINGS['numerics']['dual_formula_rtol']
SINGULAR_TOL = _SETTINGS['numerics']['singular_tol']
LOSS_HORIZON = _SETTINGS['run']['loss_horizon']


def _characteristic_sum(params: ModelParams) -> float:
    bq = params.credibility_discount
    return 1 + 1 / bq + params.epsilon * params.kappa / bq


def ramsey_lambda(params: ModelParams) -> float:
    """Inflation eigenvalue of Ramsey policy under quasi-commitment.

    Smaller root of lambda^2 - S*lambda + 1/(beta*q) = 0 with
    S = 1 + 1/(beta*q) + epsilon*kappa/(beta*q). The larger root is taken
    from the radical formula and lambda from the product of the roots, so
    neither subtracts nearly equal numbers when epsilon*kappa is large or
    tiny. The larger root is checked against the roots of the quadratic.
    """
    bq = params.credibility_discount
    s = _characteristic_sum(params)
    # s^2/4 - 1/bq written as a sum of non-negative terms
    half_gap = (1 / bq - 1) / 2
    half_push = params.epsilon * params.kappa / (2 * bq)
    discriminant = half_gap ** 2 + half_push * (1 + 1 / bq + half_push)
    companion = s / 2 + math.sqrt(discriminant)
    lam = 1 / (bq * companion)

    roots = np.sort(np.roots([1.0, -s, 1 / bq]).real)
    if not math.isclose(companion, roots[-1], rel_tol=1e-9):
        raise InternalError(f'radical root {companion} differs from quadratic root {roots[-1]}')
    # the eigen solver resolves the small root only to within eps*S
    if not math.isclose(lam, roots[0], rel_tol=1e-9, abs_tol=1e-12 * s):
        raise InternalError(f'inflation eigenvalue {lam} differs from quadratic root {roots[0]}')
    if not 0 < lam < 1 / bq:
        raise InternalError(f'inflation eigenvalue {lam} outside (0, 1/(beta*q))')
    if lam >= 1:
        logger.warning(f'Inflation eigenvalue {lam} is not inside the unit circle')
    logger.debug(f'Ramsey inflation eigenvalue {lam} for {params}')
    return lam


def ramsey_lambda_companion(params: ModelParams) -> float:
    """Unstable companion root 1/(beta*q*lambda) of the characteristic quadratic."""
    return 1 / (params.credibility_discount * ramsey_lambda(params))


def ramsey_rule(params: ModelParams,
                convention: InitialConvention = InitialConvention.quasi_commitment) -> RamseySolution:
    """Reduced-form rule and initial vector of Ramsey policy.

    f_pi* is computed both as (1 - beta*q*lambda)/kappa and as
    epsilon*lambda/(1 - lambda); f_z* = -f_pi*/(1 - beta*q*rho*lambda).
    The natural boundary condition gamma0 = 0 sets x0* = -epsilon*pi0 with
    pi0 = lambda/(1 - d*rho*lambda), where d is beta*q under the
    quasi-commitment convention and beta under the tabulated one.
    """
    lam = ramsey_lambda(params)
    bq = params.credibility_discount
    # 1 - lambda from (1 - lambda)*(companion - 1) = epsilon*kappa/(beta*q), exact near lambda = 1
    one_minus_lam = params.epsilon * params.kappa / (bq * (1 / (bq * lam) - 1))
    f_pi_from_constraint = (1 - bq * lam) / params.kappa
    f_pi_from_preferences = params.epsilon * lam / one_minus_lam
    if not math.isclose(f_pi_from_constraint, f_pi_from_preferences, rel_tol=DUAL_FORMULA_RTOL):
        raise InternalError(
            f'f_pi* formulas disagree: {f_pi_from_constraint} vs {f_pi_from_preferences}')

    f_pi = f_pi_from_constraint
    f_z = -f_pi / (1 - bq * params.rho * lam)
    d = bq if convention == InitialConvention.quasi_commitment else params.beta
    pi0 = lam / (1 - d * params.rho * lam)
    return RamseySolution(inflation_eigenvalue=lam, f_pi_star=f_pi, f_z_star=f_z,
                          x0_star=-params.epsilon * pi0, pi0=pi0, convention=convention)


def forward_projection(params: ModelParams, f_pi: float) -> StableProjection:
    """Stable eigenvector solution with a forward-looking instrument.

    g = 1/(1 - kappa*f_pi - rho*beta), the slope of the eigenvector of rho.
    It is the unique bounded solution only when |lambda_sr| > 1.
    """
    lambda_sr = closed_loop_inflation_eigenvalue(params, f_pi)
    if abs(lambda_sr) <= 1 + UNIT_TOL:
        raise NotDeterminateUnderConvention(
            f'f_pi = {f_pi} gives lambda_sr = {lambda_sr}: a forward-looking instrument '
            'needs the inflation root outside the unit circle')
    # beta*(lambda_sr - rho); nonzero for validated params since rho < 1 < |lambda_sr|
    denominator = 1 - params.kappa * f_pi - params.rho * params.beta
    if abs(denominator) < SINGULAR_TOL:
        raise SingularProjection(f'lambda_sr = rho = {params.rho}: projection is undefined')
    g = 1 / denominator
    return StableProjection(g=g, x_coefficient=f_pi * g, lambda_sr=lambda_sr)


def discretion_solution(params: ModelParams) -> Tuple[PolicyRule, StableProjection]:
    """Static Phillips curve solution: x_t = -epsilon*pi_t, pi_t = z_t/(1 - beta*rho + kappa*epsilon).

    q is ignored, discretion is its own static problem.
    """
    rule = PolicyRule(f_pi=-params.epsilon, f_z=0.0,
                      convention=InstrumentConvention.forward_looking)
    return rule, forward_projection(params, rule.f_pi)


def anchor_inflation(rule: PolicyRule, x0: float, z0: float) -> float:
    """Invert the rule for initial inflation: pi0 = (x0 - f_z*z0)/f_pi."""
    if rule.convention != InstrumentConvention.predetermined:
        raise InvalidParams('anchoring inflation requires a predetermined instrument')
    if rule.f_pi == 0:
        raise NonInvertibleRule('f_pi = 0: initial inflation cannot be anchored')
    return (x0 - rule.f_z * z0) / rule.f_pi


def instrument_from_target(rule: PolicyRule, pi0_bar: float, z0: float) -> float:
    """Initial instrument when initial inflation is given: x0 = f_pi*pi0_bar + f_z*z0."""
    return rule.f_pi * pi0_bar + rule.f_z * z0


def _period_losses(path: IRFPath, params: ModelParams, horizon: int) -> np.ndarray:
    pi = np.asarray(path.pi[:horizon])
    x = np.asarray(path.x[:horizon])
    return 0.5 * (pi ** 2 + params.alpha * x ** 2)


def ramsey_loss(path: IRFPath, params: ModelParams, horizon: Optional[int] = None) -> float:
    """Truncated quasi-commitment loss sum (beta*q)^t * (pi_t^2 + kappa/epsilon*x_t^2)/2.

    The continuation value of a regime change is left out.
    """
    if horizon is None:
        horizon = min(LOSS_HORIZON, path.horizon)
    if horizon > path.horizon:
        raise InvalidParams(f'path has {path.horizon} periods, loss needs {horizon}')
    weights = params.credibility_discount ** np.arange(horizon)
    return float(np.sum(weights * _period_losses(path, params, horizon)))


def ramsey_loss_tail_bound(path: IRFPath, params: ModelParams, horizon: Optional[int] = None) -> float:
    """(beta*q)^H/(1 - beta*q) times the largest period loss on the path."""
    if horizon is None:
        horizon = min(LOSS_HORIZON, path.horizon)
    bq = params.credibility_discount
    worst = float(np.max(_period_losses(path, params, path.horizon)))
    return bq ** horizon / (1 - bq) * worst


def solve(params: ModelParams, mode: Union[SolverMode, str], rule: Optional[PolicyRule] = None,
          x0: Optional[float] = None,
          convention: InitialConvention = InitialConvention.quasi_commitment,
          z0: float = 1.0) -> PolicySolution:
    """Solve one regime and classify its determinacy.

    Args:
        params (ModelParams): Transmission mechanism and preferences.
        mode (SolverMode): predetermined, ramsey, forward or discretion.
        rule (PolicyRule): Required for the predetermined and forward modes.
        x0 (float): Initial instrument, required for the predetermined mode.
        convention (InitialConvention): Discount in the Ramsey initial vector.
        z0 (float): Initial shock the predetermined rule is inverted at.

    Returns:
        PolicySolution: initial values per unit of z0, except that the
        predetermined mode carries x0 itself and pi0 anchored at z0.
    """
    mode = SolverMode(mode)
    g = None
    discount = params.beta

    if mode == SolverMode.predetermined:
        if rule is None or x0 is None:
            raise InvalidParams('predetermined mode needs a rule and x0')
        if rule.convention != InstrumentConvention.predetermined:
            raise InvalidParams('predetermined mode needs a predetermined-instrument rule')
        pi0 = anchor_inflation(rule, x0, z0)
    elif mode == SolverMode.ramsey:
        ramsey = ramsey_rule(params, convention)
        rule, x0, pi0 = ramsey.rule, ramsey.x0_star, ramsey.pi0
        discount = params.credibility_discount
    else:
        if mode == SolverMode.discretion:
            rule, projection = discretion_solution(params)
        else:
            if rule is None:
                raise InvalidParams('forward mode needs a rule')
            if rule.convention != InstrumentConvention.forward_looking:
                raise InvalidParams('forward mode needs a forward-looking-instrument rule')
            projection = forward_projection(params, rule.f_pi)
        g = projection.g
        x0, pi0 = projection.x_coefficient, projection.g

    closed = close_loop(params, rule, discount)
    _, determinacy = classify_system(closed.base)
    solution = PolicySolution(mode=mode, rule=rule, inflation_eigenvalue=closed.lambda_sr,
                              discount=discount, x0=x0, pi0=pi0, determinacy=determinacy, g=g,
                              z0=z0 if mode == SolverMode.predetermined else 1.0)
    logger.info(f'Solved {mode.value}: lambda = {closed.lambda_sr:.6g}, '
                f'f_pi = {rule.f_pi:.6g}, f_z = {rule.f_z:.6g}, {determinacy.value}')
    return solution
