"""Pydantic datastructures

This modules defines the datastructures shared by the solvers, the
simulation engine and the command line front end.

ModelParams
|-- beta: float
|-- kappa: float
|-- rho: float
|-- sigma_eps: float
|-- epsilon: float
|-- q: float

PolicyRule
|-- f_pi: float
|-- f_z: float
|-- convention: InstrumentConvention

LinearRESystem
|-- transition: ndarray (n+m, n+m)
|-- impact: ndarray (n+m, k)
|-- shock_loading: ndarray (n+m, s)
|-- n_predetermined: int
|-- m_nonpredetermined: int

PolicySolution
|-- mode: SolverMode
|-- rule: PolicyRule
|-- inflation_eigenvalue: float
|-- x0: float (per unit z0, given value with a predetermined instrument)
|-- pi0: float (per unit z0, anchored at z0 with a predetermined instrument)
|-- determinacy: DeterminacyClass
|-- g: Optional[float]
|-- z0: float

IRFPath
|-- horizon: int
|-- pi, x, z: Tuple[float, ...]
|-- mode: SolverMode
|-- seed: Optional[int]

MisspecReport
|-- points: List[MisspecPoint]
|-- stable_fraction: float
|-- regime: FeedbackClass
"""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .errors import IdentificationError, InvalidParams, InvalidSystem


class SolverMode(str, Enum):
    predetermined = 'predetermined'
    ramsey = 'ramsey'
    forward = 'forward'
    discretion = 'discretion'


class InstrumentConvention(str, Enum):
    predetermined = 'predetermined'
    forward_looking = 'forward_looking'


class DeterminacyClass(str, Enum):
    determinate = 'determinate'
    indeterminate = 'indeterminate'
    no_bounded_solution = 'no_bounded_solution'
    boundary_case = 'boundary_case'


class FeedbackClass(str, Enum):
    negative_feedback = 'negative_feedback'
    positive_feedback = 'positive_feedback'
    boundary = 'boundary'


class IntervalKind(str, Enum):
    negative_feedback = 'negative_feedback'
    positive_feedback = 'positive_feedback'
    ramsey_reduced_form = 'ramsey_reduced_form'
    discretion_reduced_form = 'discretion_reduced_form'


class BifurcationType(str, Enum):
    saddle_node = 'saddle_node'
    flip = 'flip'


class BoundarySide(str, Enum):
    lower = 'lower'
    upper = 'upper'


class InitialConvention(str, Enum):
    """Discount used in the Ramsey initial vector: beta*q or beta as tabulated."""
    quasi_commitment = 'quasi_commitment'
    tabulated = 'tabulated'


class KappaFormula(str, Enum):
    corrected = 'corrected'
    printed = 'printed'


class SweepAxis(str, Enum):
    f_pi = 'f_pi'
    beta = 'beta'
    kappa = 'kappa'
    rho = 'rho'
    q = 'q'
    epsilon = 'epsilon'


# modes whose instrument is predetermined at date 0
PREDETERMINED_MODES = (SolverMode.predetermined, SolverMode.ramsey)


class ModelParams(BaseModel):
    """Structural parameters of the transmission mechanism and of the policy maker.

    Attributes:
        beta (float): Discount factor, in (0,1).
        kappa (float): Slope of the Phillips curve, > 0.
        rho (float): Autocorrelation of the cost-push shock, in (0,1).
        sigma_eps (float): Standard deviation of the shock innovations, >= 0.
        epsilon (float): Elasticity of substitution between goods, > 1.
        q (float): Probability of keeping commitments, in (0,1].
    """
    model_config = ConfigDict(frozen=True)

    beta: float
    kappa: float
    rho: float
    sigma_eps: float = 1.0
    epsilon: float
    q: float = 1.0

    @model_validator(mode='after')
    def _check_invariants(self) -> 'ModelParams':
        violations = []
        if not 0 < self.beta < 1:
            violations.append(f'beta must lie in (0,1), got {self.beta}')
        if not self.kappa > 0:
            violations.append(f'kappa must be positive, got {self.kappa}')
        if not 0 < self.rho < 1:
            violations.append(f'rho must lie in (0,1), got {self.rho}')
        if not self.sigma_eps >= 0:
            violations.append(f'sigma_eps must be non-negative, got {self.sigma_eps}')
        if not self.epsilon > 1:
            violations.append(f'epsilon must exceed 1, got {self.epsilon}')
        if not 0 < self.q <= 1:
            violations.append(f'q must lie in (0,1], got {self.q}')
        if violations:
            raise InvalidParams(violations)
        return self

    @property
    def alpha(self) -> float:
        """Welfare weight on the output gap, kappa/epsilon."""
        return self.kappa / self.epsilon

    @property
    def credibility_discount(self) -> float:
        return self.beta * self.q

    def replace(self, **changes) -> 'ModelParams':
        """Return a validated copy with some fields changed."""
        return ModelParams(**{**self.model_dump(), **changes})


class PolicyRule(BaseModel):
    """Proportional feedback rule x_t = f_pi*pi_t + f_z*z_t."""
    model_config = ConfigDict(frozen=True)

    f_pi: float
    f_z: float = 0.0
    convention: InstrumentConvention = InstrumentConvention.predetermined

    @model_validator(mode='after')
    def _check_identification(self) -> 'PolicyRule':
        if self.convention == InstrumentConvention.forward_looking and self.f_z != 0:
            raise IdentificationError(
                f'a forward-looking instrument rule must have f_z = 0, got {self.f_z}')
        return self


class LinearRESystem(BaseModel):
    """Small dense linear rational-expectations system.

    The state vector stacks the variables in the order of `labels`; the
    partition counts say how many of them are predetermined and how many
    are free to jump.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    transition: np.ndarray
    impact: np.ndarray
    shock_loading: np.ndarray
    n_predetermined: int
    m_nonpredetermined: int
    labels: Tuple[str, ...] = ()

    @field_validator('transition', mode='before')
    @classmethod
    def _as_square_matrix(cls, value):
        matrix = np.array(value, dtype=float)
        if matrix.ndim == 0:
            matrix = matrix.reshape(1, 1)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InvalidSystem(f'transition must be a square matrix, got shape {matrix.shape}')
        matrix.flags.writeable = False
        return matrix

    @field_validator('impact', 'shock_loading', mode='before')
    @classmethod
    def _as_column_block(cls, value):
        matrix = np.array(value, dtype=float)
        if matrix.ndim < 2:
            matrix = matrix.reshape(-1, 1)
        matrix.flags.writeable = False
        return matrix

    @model_validator(mode='after')
    def _check_shapes(self) -> 'LinearRESystem':
        dim = self.transition.shape[0]
        if self.n_predetermined < 0 or self.m_nonpredetermined < 0:
            raise InvalidSystem('partition counts must be non-negative')
        if self.n_predetermined + self.m_nonpredetermined != dim or dim < 1:
            raise InvalidSystem(
                f'partition {self.n_predetermined}+{self.m_nonpredetermined} '
                f'does not match dimension {dim}')
        for name in ('impact', 'shock_loading'):
            if getattr(self, name).shape[0] != dim:
                raise InvalidSystem(f'{name} must have {dim} rows, got {getattr(self, name).shape}')
        for name in ('transition', 'impact', 'shock_loading'):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidSystem(f'{name} has non-finite entries')
        return self

    @property
    def dimension(self) -> int:
        return self.transition.shape[0]


class EigenReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    eigenvalues: Tuple[complex, ...]
    n_stable: int
    n_unstable: int
    n_unit: int

    @model_validator(mode='after')
    def _check_counts(self) -> 'EigenReport':
        if self.n_stable + self.n_unstable + self.n_unit != len(self.eigenvalues):
            raise InvalidSystem('eigenvalue counts do not add up to the dimension')
        return self

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    @property
    def spectral_radius(self) -> float:
        return max(abs(ev) for ev in self.eigenvalues)


class ClosedLoopSystem(BaseModel):
    """Transition of (pi, z) once the rule is substituted in the Phillips curve.

    Attributes:
        base (LinearRESystem): 2x2 closed-loop system.
        rule (PolicyRule): The substituted rule.
        params (ModelParams): Parameters of the transmission mechanism.
        lambda_sr (float): Inflation eigenvalue (1 - kappa*f_pi)/discount.
        discount (float): beta for simple rules, beta*q in the quasi-commitment regime.
    """
    model_config = ConfigDict(frozen=True)

    base: LinearRESystem
    rule: PolicyRule
    params: ModelParams
    lambda_sr: float
    discount: float

    @model_validator(mode='after')
    def _check_triangular(self) -> 'ClosedLoopSystem':
        a = self.base.transition
        if a.shape != (2, 2) or a[0, 0] != self.lambda_sr or a[1, 0] != 0 or a[1, 1] != self.params.rho:
            raise InvalidSystem('closed-loop transition is not [[lambda_sr, .], [0, rho]]')
        return self


class RamseySolution(BaseModel):
    """Reduced form of Ramsey optimal policy under quasi-commitment.

    Initial values are per unit of the initial shock z0. The Lagrange
    multiplier of inflation starts at its optimal value gamma0 = 0.
    """
    model_config = ConfigDict(frozen=True)

    inflation_eigenvalue: float
    f_pi_star: float
    f_z_star: float
    x0_star: float
    pi0: float
    gamma0: float = 0.0
    convention: InitialConvention = InitialConvention.quasi_commitment

    @property
    def rule(self) -> PolicyRule:
        """Simple rule observationally equivalent to the Ramsey policy."""
        return PolicyRule(f_pi=self.f_pi_star, f_z=self.f_z_star,
                          convention=InstrumentConvention.predetermined)


class StableProjection(BaseModel):
    """Stable eigenvector solution pi_t = g*z_t, x_t = x_coefficient*z_t."""
    model_config = ConfigDict(frozen=True)

    g: float
    x_coefficient: float
    lambda_sr: float

    @field_validator('g')
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError('projection coefficient must be finite')
        return value


class PolicySolution(BaseModel):
    """Solved regime: rule, inflation eigenvalue and initial vector.

    The initial vector is per unit z0, except with a predetermined instrument
    where x0 is the given instrument and pi0 is anchored at z0.
    """
    model_config = ConfigDict(frozen=True)

    mode: SolverMode
    rule: PolicyRule
    inflation_eigenvalue: float
    discount: float
    x0: float
    pi0: float
    determinacy: DeterminacyClass
    g: Optional[float] = None
    z0: float = 1.0


class FeedbackInterval(BaseModel):
    model_config = ConfigDict(frozen=True)

    lower: float
    upper: float
    kind: IntervalKind
    discount: Optional[float] = None

    def contains(self, value: float) -> bool:
        """Open-interval membership."""
        return self.lower < value < self.upper


class BifurcationVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    boundary: float
    bifurcation_type: BifurcationType
    crossing_eigenvalue: int

    @model_validator(mode='after')
    def _check_crossing(self) -> 'BifurcationVerdict':
        expected = 1 if self.bifurcation_type == BifurcationType.saddle_node else -1
        if self.crossing_eigenvalue != expected:
            raise InvalidParams(
                f'{self.bifurcation_type.value} crosses at {expected}, got {self.crossing_eigenvalue}')
        return self


class ReducedFormEnvelope(BaseModel):
    """Sampled set of reduced-form Ramsey rule parameters over an epsilon grid."""
    model_config = ConfigDict(frozen=True)

    epsilon: Tuple[float, ...]
    f_pi_star: Tuple[float, ...]
    inflation_eigenvalue: Tuple[float, ...]
    interval: FeedbackInterval

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'epsilon': self.epsilon,
                             'f_pi_star': self.f_pi_star,
                             'lambda': self.inflation_eigenvalue})


class IRFPath(BaseModel):
    """Time series of (pi_t, x_t, z_t) for one regime.

    Attributes:
        horizon (int): Number of periods, t = 0..horizon-1.
        pi (Tuple[float, ...]): Inflation.
        x (Tuple[float, ...]): Output gap, the policy instrument.
        z (Tuple[float, ...]): Cost-push shock.
        mode (SolverMode): Regime that produced the path.
        rule (PolicyRule): Rule holding along the path.
        seed (Optional[int]): Seed of the shock draws, None for expected paths.
        sigma_eps (float): Standard deviation used for the draws (0 when expected).
    """
    model_config = ConfigDict(frozen=True)

    horizon: int
    pi: Tuple[float, ...]
    x: Tuple[float, ...]
    z: Tuple[float, ...]
    mode: SolverMode
    rule: PolicyRule
    seed: Optional[int] = None
    sigma_eps: float = 0.0

    @model_validator(mode='after')
    def _check_lengths(self) -> 'IRFPath':
        if not len(self.pi) == len(self.x) == len(self.z) == self.horizon:
            raise InvalidParams(
                f'series lengths {len(self.pi)}, {len(self.x)}, {len(self.z)} '
                f'differ from horizon {self.horizon}')
        return self

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': range(self.horizon), 'pi': self.pi, 'x': self.x, 'z': self.z})


class MisspecPoint(BaseModel):
    """Outcome of one perturbation of the true parameters."""
    model_config = ConfigDict(frozen=True)

    dbeta: float
    dkappa: float
    drho: float
    valid: bool = True
    on_manifold: bool = False
    lambda_sr: Optional[float] = None
    divergence_horizon: Optional[int] = None
    growth_ratio: Optional[float] = None

    @property
    def diverged(self) -> bool:
        return self.divergence_horizon is not None


class MisspecReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: SolverMode
    regime: FeedbackClass
    threshold: float
    points: List[MisspecPoint]
    stable_fraction: float

    @field_validator('stable_fraction')
    @classmethod
    def _fraction(cls, value: float) -> float:
        if not 0 <= value <= 1:
            raise ValueError('stable_fraction must lie in [0,1]')
        return value

    @property
    def perturbation_grid(self) -> List[Tuple[float, float, float]]:
        return [(p.dbeta, p.dkappa, p.drho) for p in self.points]

    @property
    def divergence_horizon(self) -> List[Optional[int]]:
        return [p.divergence_horizon for p in self.points]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([p.model_dump() for p in self.points])
        frame['diverged'] = [p.diverged for p in self.points]
        frame['divergence_horizon'] = frame['divergence_horizon'].astype('Int64')
        return frame


class RunConfig(BaseModel):
    """Validated command line run."""
    model_config = ConfigDict(frozen=True)

    params: ModelParams
    mode: SolverMode
    rule: Optional[PolicyRule] = None
    x0: Optional[float] = None
    z0: float = 1.0
    horizon: int = 40
    seed: Optional[int] = None
    output_path: Optional[Path] = None
    initial_convention: InitialConvention = InitialConvention.quasi_commitment
