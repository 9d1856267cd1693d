"""Robustness of nonclassicality and entanglement for Gaussian states."""

from .exceptions import (
    GresError,
    InvalidArgument,
    Nonexistence,
    RootNotFound,
    SingularState,
    Unsupported,
)
from .symplectic import (
    SymmetricSpec,
    SymplecticDecomposition,
    TwoModeStandardForm,
    williamson,
    symplectic_eigenvalues,
    symplectic_form,
)
from .bounds import GHZ, RobustnessBounds, robustness

__all__ = [
    "GresError",
    "InvalidArgument",
    "Nonexistence",
    "RootNotFound",
    "SingularState",
    "Unsupported",
    "SymmetricSpec",
    "SymplecticDecomposition",
    "TwoModeStandardForm",
    "williamson",
    "symplectic_eigenvalues",
    "symplectic_form",
    "GHZ",
    "RobustnessBounds",
    "robustness",
]

__version__ = "0.1.0"
