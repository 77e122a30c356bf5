"""Exceptions raised by the policy toolkit

None of these derive from ValueError, so pydantic validators let them
propagate unchanged instead of folding them into a ValidationError.
"""

from typing import Iterable


class PolicyModelError(Exception):
    """Base class for every error raised by nkpc_policy."""


class InvalidSystem(PolicyModelError):
    """Matrices of a linear system are malformed (shape or non-finite entries)."""


class InvalidParams(PolicyModelError):
    """One or more parameter invariants are violated.

    Attributes:
        violations (List[str]): Every violated invariant, not only the first one.
    """

    def __init__(self, violations: Iterable[str]) -> None:
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__('; '.join(self.violations))


class IdentificationError(PolicyModelError):
    """A forward-looking instrument rule responds to the shock (f_z != 0)."""


class NonInvertibleRule(PolicyModelError):
    """The rule cannot be inverted for inflation because f_pi = 0."""


class NotDeterminateUnderConvention(PolicyModelError):
    """The rule does not give a unique bounded solution for the chosen convention."""


class SingularProjection(PolicyModelError):
    """The stable eigenvector projection is undefined (lambda_sr = rho)."""


class InternalError(PolicyModelError):
    """Two computations that must agree do not: an implementation bug."""
