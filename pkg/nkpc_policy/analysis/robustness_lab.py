"""Robustness of the regimes to a misspecified transmission mechanism

The policy maker solves with nominal parameters and keeps its rule (and,
with a forward-looking instrument, the projection g) while the true
parameters are perturbed. A forward-looking solution stays on
pi_t = g*z_t only if the perturbation lies on the compensating manifold
kappa = (1 - rho*beta - 1/g)/f_pi; elsewhere the gap grows at the unstable
root |lambda_sr|.
"""

import itertools
import logging
import math
from pathlib import Path
from typing import NamedTuple, Optional, Union

import numpy as np

from nkpc_policy import load_settings
from ..mechanism.nkpc import close_loop
from ..models.data_structures import (PREDETERMINED_MODES, KappaFormula, MisspecPoint,
                                      MisspecReport, ModelParams, PolicySolution, SolverMode)
from ..models.errors import InvalidParams
from ..simulation.irf_engine import expected_irf
from ..solvers.policy_solvers import anchor_inflation
from .determinacy_map import feedback_from_eigenvalue

logger = logging.getLogger(__name__)

_SETTINGS = load_settings()
STRESS = _SETTINGS['stress']
MANIFOLD_RTOL = _SETTINGS['numerics']['unit_tol']
SINGULAR_TOL = _SETTINGS['numerics']['singular_tol']

STRESS_CSV_COLUMNS = ['dbeta', 'dkappa', 'drho', 'diverged', 'divergence_horizon']


class MisspecifiedPath(NamedTuple):
    pi: np.ndarray
    z: np.ndarray
    gap: np.ndarray
    lambda_sr: float


def compensating_kappa(f_pi: float, g: float, rho: float, beta: float,
                       formula: Union[KappaFormula, str] = KappaFormula.corrected) -> float:
    """Slope kappa that leaves g = 1/(1 - kappa*f_pi - rho*beta) unchanged.

    The corrected inversion is (1 - rho*beta - 1/g)/f_pi. The printed variant
    (1/g + rho*beta - 1)/f_pi has the opposite sign and is kept for comparison.
    """
    violations = []
    if f_pi == 0:
        violations.append('f_pi must be non-zero')
    if g == 0:
        violations.append('g must be non-zero')
    if violations:
        raise InvalidParams(violations)
    if KappaFormula(formula) == KappaFormula.printed:
        return (1 / g + rho * beta - 1) / f_pi
    return (1 - rho * beta - 1 / g) / f_pi


def misspecified_path(true_params: ModelParams, solution: PolicySolution, nominal: ModelParams,
                      z0: Optional[float] = None, horizon: int = 200,
                      threshold: Optional[float] = None) -> MisspecifiedPath:
    """Propagate the nominal solution through the true dynamics.

    The gap is |pi_t - g*z_t| with a forward-looking instrument and the
    distance to the nominal expected path with a predetermined one. When a
    threshold is given, propagation stops at the first period beyond it.
    z0 defaults to the shock the solution was anchored at.
    """
    if z0 is None:
        z0 = solution.z0
    rule = solution.rule
    true_projection, x0 = None, None
    if solution.mode in PREDETERMINED_MODES:
        discount = true_params.credibility_discount if solution.mode == SolverMode.ramsey else true_params.beta
        closed = close_loop(true_params, rule, discount)
        x0 = solution.x0 if solution.mode == SolverMode.predetermined else None
        reference = np.asarray(expected_irf(nominal, solution.mode, rule, z0, x0, horizon).pi)
    else:
        closed = close_loop(true_params, rule)
        reference = None
        denominator = 1 - true_params.kappa * rule.f_pi - true_params.rho * true_params.beta
        if abs(denominator) >= SINGULAR_TOL:
            true_projection = 1 / denominator

    (a, c), (_, rho) = closed.base.transition
    pi = np.full(horizon, np.nan)
    z = np.full(horizon, np.nan)
    gap = np.full(horizon, np.nan)
    pi[0] = solution.pi0 * z0 if x0 is None else anchor_inflation(rule, x0, z0)
    z[0] = z0

    # pi_t = g'*z_t + lambda'^t * (pi0 - g'*z0) solves the true triangular recursion
    # exactly; on the compensating manifold the unstable component is nil
    deviation = None
    if true_projection is not None:
        deviation = 0.0 if _on_manifold(true_params, solution) else pi[0] - true_projection * z0

    for t in range(horizon):
        if t > 0:
            z[t] = rho * z[t - 1]
            if deviation is None:
                pi[t] = a * pi[t - 1] + c * z[t - 1]
            else:
                pi[t] = true_projection * z[t] + a ** t * deviation
        planned = solution.g * z[t] if reference is None else reference[t]
        gap[t] = abs(pi[t] - planned)
        if threshold is not None and gap[t] > threshold:
            break
    return MisspecifiedPath(pi=pi, z=z, gap=gap, lambda_sr=closed.lambda_sr)


def _on_manifold(true_params: ModelParams, solution: PolicySolution) -> bool:
    if solution.g is None:
        return False
    denominator = 1 - true_params.kappa * solution.rule.f_pi - true_params.rho * true_params.beta
    if abs(denominator) < SINGULAR_TOL:
        return False
    return math.isclose(1 / denominator, solution.g, rel_tol=MANIFOLD_RTOL)


def _stress_point(params: ModelParams, solution: PolicySolution, deltas, horizon: int,
                  threshold: float) -> MisspecPoint:
    dbeta, dkappa, drho = deltas
    try:
        true_params = params.replace(beta=params.beta + dbeta, kappa=params.kappa + dkappa,
                                     rho=params.rho + drho)
    except InvalidParams as e:
        logger.debug(f'Skipping perturbation {deltas}: {e}')
        return MisspecPoint(dbeta=dbeta, dkappa=dkappa, drho=drho, valid=False)

    path = misspecified_path(true_params, solution, params, None, horizon, threshold)
    gap = path.gap[~np.isnan(path.gap)]
    diverged = gap[-1] > threshold
    growth_ratio = None
    if len(gap) >= 2 and gap[-2] > 0:
        growth_ratio = float(gap[-1] / gap[-2])
    return MisspecPoint(dbeta=dbeta, dkappa=dkappa, drho=drho,
                        on_manifold=_on_manifold(true_params, solution),
                        lambda_sr=path.lambda_sr,
                        divergence_horizon=len(gap) - 1 if diverged else None,
                        growth_ratio=growth_ratio)


def misspecification_stress(params: ModelParams, solution: PolicySolution,
                            grid_radius: float = STRESS['grid_radius'],
                            grid_steps: int = STRESS['grid_steps'],
                            horizon: int = STRESS['horizon'],
                            threshold: Optional[float] = None) -> MisspecReport:
    """Hold the nominal solution fixed and perturb (beta, kappa, rho) on a cube.

    Args:
        params (ModelParams): Nominal parameters the solution was computed with.
        solution (PolicySolution): Solved regime; its mode picks the gap measure.
        grid_radius (float): Half-width of the perturbation cube, >= 0.
        grid_steps (int): Points per axis; a zero radius gives the single point (0, 0, 0).
        horizon (int): Periods propagated per grid point.
        threshold (float): Gap counted as divergence; defaults to
            divergence_factor * |pi0| (10*|g*z0| with a forward-looking instrument).

    Returns:
        MisspecReport: stable_fraction is computed over valid grid points only.
    """
    violations = []
    if grid_radius < 0:
        violations.append(f'grid_radius must be non-negative, got {grid_radius}')
    if grid_steps < 1:
        violations.append(f'grid_steps must be at least 1, got {grid_steps}')
    if threshold is not None and threshold <= 0:
        violations.append(f'threshold must be positive, got {threshold}')
    if horizon < 2:
        violations.append(f'horizon must be at least 2, got {horizon}')
    if violations:
        raise InvalidParams(violations)

    if threshold is None:
        threshold = STRESS['divergence_factor'] * (abs(solution.pi0) or 1.0)
    offsets = np.linspace(-grid_radius, grid_radius, grid_steps) if grid_radius > 0 else np.zeros(1)
    offsets = np.unique(offsets)

    points = [_stress_point(params, solution, tuple(float(d) for d in deltas), horizon, threshold)
              for deltas in itertools.product(offsets, repeat=3)]
    valid = [p for p in points if p.valid]
    stable_fraction = sum(not p.diverged for p in valid) / len(valid) if valid else 1.0

    report = MisspecReport(mode=solution.mode,
                           regime=feedback_from_eigenvalue(solution.inflation_eigenvalue),
                           threshold=threshold, points=points, stable_fraction=stable_fraction)
    logger.info(f'Stress test of {solution.mode.value}: {len(valid)}/{len(points)} valid points, '
                f'stable fraction {stable_fraction:.3f}')
    return report


def write_stress_csv(report: MisspecReport, output_path: Union[str, Path, None] = None) -> str:
    """One row per grid point: dbeta,dkappa,drho,diverged,divergence_horizon."""
    frame = report.to_frame()[STRESS_CSV_COLUMNS]
    text = frame.to_csv(index=False, float_format='%.12g', lineterminator='\n')
    if output_path is not None:
        Path(output_path).write_text(text)
        logger.info(f'Wrote {len(frame)} stress rows to {output_path}')
    return text
