"""Determinacy sets, feedback classification and parameter sweeps

D_NF = ((1-beta)/kappa, (1+beta)/kappa) holds the negative-feedback values
of f_pi (|lambda_sr| < 1). Its complement D_PF holds the positive-feedback
values. lambda_sr crosses +1 at the lower end (saddle-node) and -1 at the
upper end (flip).
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from nkpc_policy import load_settings
from ..mechanism.nkpc import closed_loop_inflation_eigenvalue
from ..models.data_structures import (BifurcationType, BifurcationVerdict, BoundarySide,
                                      DeterminacyClass, FeedbackClass, FeedbackInterval,
                                      IntervalKind, ModelParams, ReducedFormEnvelope,
                                      SolverMode, SweepAxis)
from ..models.errors import InternalError, InvalidParams
from ..solvers.policy_solvers import ramsey_lambda, ramsey_rule

logger = logging.getLogger(__name__)

_NUMERICS = load_settings()['numerics']
UNIT_TOL = _NUMERICS['unit_tol']
BISECTION_XTOL = _NUMERICS['bisection_xtol']


def negative_feedback_interval(params: ModelParams) -> FeedbackInterval:
    return FeedbackInterval(lower=(1 - params.beta) / params.kappa,
                            upper=(1 + params.beta) / params.kappa,
                            kind=IntervalKind.negative_feedback,
                            discount=params.beta)


def positive_feedback_set(params: ModelParams) -> Tuple[FeedbackInterval, FeedbackInterval]:
    """The two closed half-lines (-inf, (1-beta)/kappa] and [(1+beta)/kappa, +inf)."""
    nf = negative_feedback_interval(params)
    return (FeedbackInterval(lower=-math.inf, upper=nf.lower,
                             kind=IntervalKind.positive_feedback, discount=params.beta),
            FeedbackInterval(lower=nf.upper, upper=math.inf,
                             kind=IntervalKind.positive_feedback, discount=params.beta))


def discretion_reduced_form_interval() -> FeedbackInterval:
    """f_pi = -epsilon sweeps (-inf, -1) as epsilon ranges over (1, inf)."""
    return FeedbackInterval(lower=-math.inf, upper=-1.0,
                            kind=IntervalKind.discretion_reduced_form)


def feedback_from_eigenvalue(lam: float, tol: float = UNIT_TOL) -> FeedbackClass:
    """Feedback class of an already computed inflation eigenvalue."""
    if abs(abs(lam) - 1) <= tol:
        return FeedbackClass.boundary
    if abs(lam) < 1:
        return FeedbackClass.negative_feedback
    return FeedbackClass.positive_feedback


def classify_feedback(params: ModelParams, f_pi: float, tol: float = UNIT_TOL) -> FeedbackClass:
    """Negative feedback iff |lambda_sr| < 1, positive iff > 1, boundary within tol of 1."""
    return feedback_from_eigenvalue(closed_loop_inflation_eigenvalue(params, f_pi), tol)


def bifurcation_at(params: ModelParams, boundary_side: Union[BoundarySide, str]) -> BifurcationVerdict:
    nf = negative_feedback_interval(params)
    if BoundarySide(boundary_side) == BoundarySide.lower:
        return BifurcationVerdict(boundary=nf.lower, bifurcation_type=BifurcationType.saddle_node,
                                  crossing_eigenvalue=1)
    return BifurcationVerdict(boundary=nf.upper, bifurcation_type=BifurcationType.flip,
                              crossing_eigenvalue=-1)


def ramsey_reduced_form_interval(params: ModelParams,
                                 epsilon_grid: Iterable[float]) -> ReducedFormEnvelope:
    """Sample f_pi*(epsilon) over the grid and check each sample lies in D_NF(beta*q).

    D*NF is only defined parametrically, so it is reported as the min/max
    envelope of the samples, with the credibility-weighted discount.
    """
    grid = [float(e) for e in epsilon_grid]
    bad = [e for e in grid if not e > 1]
    if bad:
        raise InvalidParams([f'epsilon grid point {e} must exceed 1' for e in bad])
    if not grid:
        raise InvalidParams('epsilon grid is empty')

    bq = params.credibility_discount
    f_pis, lambdas = [], []
    for eps in grid:
        solution = ramsey_rule(params.replace(epsilon=eps))
        lam = (1 - params.kappa * solution.f_pi_star) / bq
        if not 0 < lam < 1 / bq:
            raise InternalError(f'f_pi* = {solution.f_pi_star} at epsilon = {eps} is outside D*NF')
        f_pis.append(solution.f_pi_star)
        lambdas.append(solution.inflation_eigenvalue)

    interval = FeedbackInterval(lower=min(f_pis), upper=max(f_pis),
                                kind=IntervalKind.ramsey_reduced_form, discount=bq)
    return ReducedFormEnvelope(epsilon=tuple(grid), f_pi_star=tuple(f_pis),
                               inflation_eigenvalue=tuple(lambdas), interval=interval)


def _evaluate(params: ModelParams, mode: SolverMode, f_pi: Optional[float]) -> Tuple[float, float]:
    """(f_pi, inflation eigenvalue) of one grid point."""
    if mode == SolverMode.ramsey:
        lam = ramsey_lambda(params)
        return (1 - params.credibility_discount * lam) / params.kappa, lam
    if mode == SolverMode.discretion:
        f_pi = -params.epsilon
    return f_pi, closed_loop_inflation_eigenvalue(params, f_pi)


def _determinacy(mode: SolverMode, feedback: FeedbackClass) -> DeterminacyClass:
    if feedback == FeedbackClass.boundary:
        return DeterminacyClass.boundary_case
    stable_root_needed = mode in (SolverMode.predetermined, SolverMode.ramsey)
    if (feedback == FeedbackClass.negative_feedback) == stable_root_needed:
        return DeterminacyClass.determinate
    if stable_root_needed:
        return DeterminacyClass.no_bounded_solution
    return DeterminacyClass.indeterminate


def _point(params_base: ModelParams, axis: SweepAxis, value: float, mode: SolverMode,
           f_pi: Optional[float]) -> Tuple[float, float]:
    if axis == SweepAxis.f_pi:
        return _evaluate(params_base, mode, value)
    return _evaluate(params_base.replace(**{axis.value: value}), mode, f_pi)


def _row(axis: SweepAxis, value: float, f_pi: float, lam: float, mode: SolverMode,
         boundary: bool = False) -> dict:
    feedback = FeedbackClass.boundary if boundary else feedback_from_eigenvalue(lam)
    bifurcation = ''
    if feedback == FeedbackClass.boundary:
        bifurcation = (BifurcationType.saddle_node if lam > 0 else BifurcationType.flip).value
    return {'axis': axis.value, 'value': value, 'f_pi': f_pi, 'eigenvalue': lam,
            'modulus': abs(lam), 'classification': feedback.value,
            'determinacy': _determinacy(mode, feedback).value,
            'boundary': feedback == FeedbackClass.boundary, 'bifurcation': bifurcation}


def sweep(params_base: ModelParams, axis: Union[SweepAxis, str], start: float, stop: float,
          steps: int, mode: Union[SolverMode, str] = SolverMode.predetermined,
          f_pi: Optional[float] = None, xtol: float = BISECTION_XTOL) -> pd.DataFrame:
    """Classify every point of a one-dimensional grid.

    Args:
        params_base (ModelParams): Parameters held fixed off the swept axis.
        axis (SweepAxis): f_pi or one of the structural parameters.
        start, stop (float): Grid range, start < stop.
        steps (int): Number of grid points, at least 2.
        mode (SolverMode): Regime whose inflation eigenvalue is tracked.
        f_pi (float): Rule parameter for the predetermined and forward modes
            when another axis is swept.
        xtol (float): Bisection tolerance for boundary rows.

    Returns:
        pd.DataFrame: One row per grid point in grid order, plus a boundary
        row wherever |eigenvalue| crosses 1 between two neighbours.
    """
    axis, mode = SweepAxis(axis), SolverMode(mode)
    violations = []
    if steps < 2:
        violations.append(f'steps must be at least 2, got {steps}')
    if not start < stop:
        violations.append(f'sweep range must satisfy from < to, got {start} >= {stop}')
    if axis == SweepAxis.f_pi and mode in (SolverMode.ramsey, SolverMode.discretion):
        violations.append(f'{mode.value} mode sets f_pi itself and cannot sweep it')
    if axis != SweepAxis.f_pi and mode in (SolverMode.predetermined, SolverMode.forward) and f_pi is None:
        violations.append(f'{mode.value} mode needs f_pi when sweeping {axis.value}')
    if violations:
        raise InvalidParams(violations)

    grid = np.linspace(start, stop, steps)
    points = [_point(params_base, axis, float(v), mode, f_pi) for v in grid]

    rows: List[dict] = []
    for i, (value, (rule_f_pi, lam)) in enumerate(zip(grid, points)):
        if i > 0:
            prev_gap = abs(points[i - 1][1]) - 1
            gap = abs(lam) - 1
            if prev_gap * gap < 0:
                root = brentq(lambda v: abs(_point(params_base, axis, v, mode, f_pi)[1]) - 1,
                              float(grid[i - 1]), float(value), xtol=xtol)
                root_f_pi, root_lam = _point(params_base, axis, root, mode, f_pi)
                rows.append(_row(axis, root, root_f_pi, root_lam, mode, boundary=True))
        rows.append(_row(axis, float(value), rule_f_pi, lam, mode))

    frame = pd.DataFrame(rows)
    logger.info(f'Swept {axis.value} over [{start}, {stop}] in {steps} steps ({mode.value}): '
                f'{int(frame["boundary"].sum())} boundary rows')
    return frame
