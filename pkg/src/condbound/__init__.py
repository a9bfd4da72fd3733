"""Explicit-formula lower bounds on conductors of elliptic curves and abelian varieties."""

from condbound.errors import (
    ConductorBoundError,
    DomainError,
    MalformedRecord,
    NonMonicPolynomial,
    NotPositiveDefinite,
    ToleranceNotReached,
    UnresolvedSubfieldLabel,
    ZeroDiscriminant,
    ZeroFunction,
)

__version__ = "0.1.0"

__all__ = [
    "ConductorBoundError",
    "DomainError",
    "MalformedRecord",
    "NonMonicPolynomial",
    "NotPositiveDefinite",
    "ToleranceNotReached",
    "UnresolvedSubfieldLabel",
    "ZeroDiscriminant",
    "ZeroFunction",
]
