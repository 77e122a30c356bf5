"""Eigenstructure, controllability and Blanchard-Kahn determinacy

Operations on small dense LinearRESystem instances. Every function is pure.
"""

import logging
from typing import Tuple

import numpy as np

from nkpc_policy import load_settings
from ..models.data_structures import DeterminacyClass, EigenReport, LinearRESystem
from ..models.errors import InvalidSystem

logger = logging.getLogger(__name__)

_NUMERICS = load_settings()['numerics']
UNIT_TOL = _NUMERICS['unit_tol']
RANK_RTOL = _NUMERICS['rank_rtol']


def _as_matrix(value, name: str) -> np.ndarray:
    matrix = np.array(value, dtype=float)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    if matrix.ndim != 2:
        raise InvalidSystem(f'{name} must be a matrix, got {matrix.ndim} dimensions')
    if not np.all(np.isfinite(matrix)):
        raise InvalidSystem(f'{name} has non-finite entries')
    return matrix


def numerical_rank(matrix: np.ndarray, rtol: float = RANK_RTOL) -> int:
    """Number of singular values above rtol times the largest one."""
    if matrix.size == 0:
        return 0
    singular_values = np.linalg.svd(matrix, compute_uv=False)
    if singular_values[0] == 0:
        return 0
    return int(np.sum(singular_values > rtol * singular_values[0]))


def eigenvalues(system: LinearRESystem, unit_tol: float = UNIT_TOL) -> EigenReport:
    """Eigenvalues of the transition matrix with stable/unstable/unit counts.

    Upper-triangular transitions return their diagonal untouched, so the
    closed-loop systems of the Phillips curve get their roots exactly.
    """
    if unit_tol <= 0:
        raise InvalidSystem(f'unit_tol must be positive, got {unit_tol}')
    a = system.transition
    if not np.any(np.tril(a, k=-1)):
        values = np.diag(a).astype(complex)
    else:
        values = np.linalg.eigvals(a).astype(complex)

    moduli = np.abs(values)
    n_unit = int(np.sum(np.abs(moduli - 1) <= unit_tol))
    n_stable = int(np.sum(moduli < 1 - unit_tol))
    n_unstable = int(np.sum(moduli > 1 + unit_tol))
    logger.debug(f'Eigenvalues {values}: {n_stable} stable, {n_unstable} unstable, {n_unit} unit')
    return EigenReport(eigenvalues=tuple(complex(v) for v in values),
                       n_stable=n_stable, n_unstable=n_unstable, n_unit=n_unit)


def controllability_matrix(transition, impact) -> np.ndarray:
    """Kalman matrix [B, AB, A^2 B, ..., A^(n-1) B]."""
    a = _as_matrix(transition, 'transition')
    b = _as_matrix(impact, 'impact')
    n = a.shape[0]
    if a.shape[1] != n:
        raise InvalidSystem(f'transition must be square, got shape {a.shape}')
    if b.shape[0] != n:
        raise InvalidSystem(f'impact must have {n} rows, got shape {b.shape}')

    blocks = [b]
    for _ in range(1, n):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def controllability_rank(transition, impact, rtol: float = RANK_RTOL) -> int:
    """Rank of the Kalman controllability matrix."""
    return numerical_rank(controllability_matrix(transition, impact), rtol)


def _pbh_rank_deficient(system: LinearRESystem, eigenvalue: complex, rtol: float) -> bool:
    n = system.dimension
    pencil = np.hstack((system.transition - eigenvalue * np.eye(n), system.impact))
    return numerical_rank(pencil, rtol) < n


def is_controllable(system: LinearRESystem, rtol: float = RANK_RTOL) -> bool:
    """PBH test: rank [A - lambda I, B] = n for every eigenvalue."""
    return not any(_pbh_rank_deficient(system, ev, rtol)
                   for ev in eigenvalues(system).eigenvalues)


def is_stabilizable(system: LinearRESystem, rtol: float = RANK_RTOL,
                    unit_tol: float = UNIT_TOL) -> bool:
    """True iff every eigenvalue of modulus >= 1 is controllable."""
    for ev in eigenvalues(system, unit_tol).eigenvalues:
        if abs(ev) >= 1 - unit_tol and _pbh_rank_deficient(system, ev, rtol):
            logger.debug(f'Mode {ev} is unstable and uncontrollable')
            return False
    return True


def classify_bk(report: EigenReport, m_nonpredetermined: int) -> DeterminacyClass:
    """Blanchard-Kahn classification from the count of unstable roots.

    Follows the prose of the three propositions: as many unstable roots as
    jump variables gives a unique solution, more gives none, fewer gives an
    infinity of solutions. Unit roots withhold the verdict.
    """
    if not 0 <= m_nonpredetermined <= report.dimension:
        raise InvalidSystem(
            f'{m_nonpredetermined} jump variables for a system of dimension {report.dimension}')
    if report.n_unit > 0:
        return DeterminacyClass.boundary_case
    if report.n_unstable == m_nonpredetermined:
        return DeterminacyClass.determinate
    if report.n_unstable > m_nonpredetermined:
        return DeterminacyClass.no_bounded_solution
    return DeterminacyClass.indeterminate


def classify_system(system: LinearRESystem) -> Tuple[EigenReport, DeterminacyClass]:
    report = eigenvalues(system)
    return report, classify_bk(report, system.m_nonpredetermined)
