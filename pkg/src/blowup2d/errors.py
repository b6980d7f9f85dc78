"""Exception types shared across the package.

All domain violations raise :class:`DomainError` (a ``ValueError``) so that
callers can distinguish "you asked for parameters outside the admissible
range" from genuine numerical failures, which raise
:class:`NumericsError` (a ``RuntimeError``).
"""


class DomainError(ValueError):
    """Parameters outside the admissible range of an operation."""


class NumericsError(RuntimeError):
    """An iteration failed to converge or a solver left its stable regime."""
