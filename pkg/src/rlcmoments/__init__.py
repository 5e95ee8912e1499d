"""Central moments of weight-layer counts in random binary linear codes."""

__version__ = "0.1.0"

from .enumeration import BudgetExceeded, CodeParams
from .maxent import MINUS_INF, F, h
from .moments import central_moment_bruteforce, central_moment_exact, k0, k1, predict_moment
from .subspaces import Subspace

__all__ = [
    "BudgetExceeded",
    "CodeParams",
    "MINUS_INF",
    "F",
    "h",
    "central_moment_bruteforce",
    "central_moment_exact",
    "k0",
    "k1",
    "predict_moment",
    "Subspace",
]
