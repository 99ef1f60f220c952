"""Numerical laboratory for the two-dimensional micropolar fluid equations."""
__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    InvariantError,
    MicropolarError,
    NumericalFailure,
    SolverDivergence,
)
from .spectral import MaterialParams, ScalarField, SpectralState, TorusGrid
from .symbol import apply_semigroup, heat_semigroup, profile_h, profile_u, symbol

__all__ = [
    "__version__",
    "ConfigurationError",
    "DomainError",
    "InsufficientDataError",
    "InvariantError",
    "MicropolarError",
    "NumericalFailure",
    "SolverDivergence",
    "MaterialParams",
    "ScalarField",
    "SpectralState",
    "TorusGrid",
    "apply_semigroup",
    "heat_semigroup",
    "profile_h",
    "profile_u",
    "symbol",
]
