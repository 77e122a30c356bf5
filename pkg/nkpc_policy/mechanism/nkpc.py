"""New-Keynesian Phillips curve transmission mechanism

Builds the Kalman canonical form of

    pi_t = beta*E_t pi_{t+1} + kappa*x_t + z_t
    z_{t+1} = rho*z_t + eps_{t+1}

with state (pi, z) and instrument x, and the closed-loop system under a
proportional rule x_t = f_pi*pi_t + f_z*z_t.
"""

import logging
from typing import Optional

import numpy as np

from ..models.data_structures import (ClosedLoopSystem, InstrumentConvention,
                                      LinearRESystem, ModelParams, PolicyRule)

logger = logging.getLogger(__name__)

STATE_LABELS = ('pi', 'z')
SHOCK_LOADING = np.array([[0.0], [1.0]])


def build_open_loop(params: ModelParams) -> LinearRESystem:
    """Open-loop system A = [[1/beta, -1/beta], [0, rho]], B = [-kappa/beta, 0]'.

    The shock z is predetermined, inflation is free to jump.
    """
    beta, kappa, rho = params.beta, params.kappa, params.rho
    return LinearRESystem(transition=[[1 / beta, -1 / beta], [0.0, rho]],
                          impact=[[-kappa / beta], [0.0]],
                          shock_loading=SHOCK_LOADING,
                          n_predetermined=1,
                          m_nonpredetermined=1,
                          labels=STATE_LABELS)


def closed_loop_inflation_eigenvalue(params: ModelParams, f_pi: float,
                                     discount: Optional[float] = None) -> float:
    """(1 - kappa*f_pi)/beta, or over beta*q when a discount is given."""
    if discount is None:
        discount = params.beta
    return (1 - params.kappa * f_pi) / discount


def close_loop(params: ModelParams, rule: PolicyRule,
               discount: Optional[float] = None) -> ClosedLoopSystem:
    """Substitute the rule in the Phillips curve.

    Args:
        params (ModelParams): Transmission mechanism.
        rule (PolicyRule): Feedback rule; its convention sets the partition.
        discount (float): Weight on expected inflation. Defaults to beta;
            the quasi-commitment regime passes beta*q.

    Returns:
        ClosedLoopSystem: transition [[lambda_sr, (-1 - kappa*f_z)/discount], [0, rho]].
        With a predetermined instrument inflation is anchored by inverting
        the rule, so no variable is left to jump and both roots must be
        stable. A forward-looking instrument leaves inflation as one jump
        variable.
    """
    if discount is None:
        discount = params.beta
    lambda_sr = closed_loop_inflation_eigenvalue(params, rule.f_pi, discount)
    transition = [[lambda_sr, (-1 - params.kappa * rule.f_z) / discount],
                  [0.0, params.rho]]

    if rule.convention == InstrumentConvention.predetermined:
        n_predetermined, m_nonpredetermined = 2, 0
        if rule.f_pi == 0:
            logger.warning('f_pi = 0: the rule cannot anchor initial inflation')
    else:
        n_predetermined, m_nonpredetermined = 1, 1

    base = LinearRESystem(transition=transition,
                          impact=[[-params.kappa / discount], [0.0]],
                          shock_loading=SHOCK_LOADING,
                          n_predetermined=n_predetermined,
                          m_nonpredetermined=m_nonpredetermined,
                          labels=STATE_LABELS)
    logger.debug(f'Closed loop for {rule}: lambda_sr = {lambda_sr}')
    return ClosedLoopSystem(base=base, rule=rule, params=params,
                            lambda_sr=lambda_sr, discount=discount)
