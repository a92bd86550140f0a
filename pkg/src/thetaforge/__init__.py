"""Numerical theta functions with rational characteristics and residual checks
of theta-constant identities, gradient maps and Jacobi-type derivative formulas."""

__version__ = "0.1.0"

from .characteristics import RationalVector, grid, half_characteristics
from .errors import ThetaForgeError
from .theta import DEFAULT_POLICY, JetTable, PeriodMatrix, ThetaJet, TruncationPolicy, tail_bound, theta_jet, theta_scaled_jet

__all__ = [
    "DEFAULT_POLICY",
    "JetTable",
    "PeriodMatrix",
    "RationalVector",
    "ThetaForgeError",
    "ThetaJet",
    "TruncationPolicy",
    "grid",
    "half_characteristics",
    "tail_bound",
    "theta_jet",
    "theta_scaled_jet",
]
