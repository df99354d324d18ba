"""Effective measurements and input restoration for the optimal universal 1->2 qubit cloner."""
from .cloner import CLONER, CloneOutput, build_cloner, check_covariance, clone, reduced_clone_ancilla, reduced_state
from .errors import ConstraintError, DimensionError, NotHermitianError, NotNormalizedError, NotUnitaryError, QCloneError
from .kernels import BACKEND
from .montecarlo import MonteCarloSummary, monte_carlo
from .povm import Povm, PovmElement, effective_element, is_sharp, validate_povm
from .restoration import (
    FilterOperation,
    ProtocolTranscript,
    analytic_success_probability,
    enumerate_branches,
    filter_from_kraus,
    run_deterministic,
    run_probabilistic,
)

__version__ = "0.1.0"

__all__ = [
    "CLONER", "CloneOutput", "build_cloner", "check_covariance", "clone", "reduced_clone_ancilla", "reduced_state",
    "ConstraintError", "DimensionError", "NotHermitianError", "NotNormalizedError", "NotUnitaryError", "QCloneError",
    "BACKEND", "MonteCarloSummary", "monte_carlo",
    "Povm", "PovmElement", "effective_element", "is_sharp", "validate_povm",
    "FilterOperation", "ProtocolTranscript", "analytic_success_probability", "enumerate_branches",
    "filter_from_kraus", "run_deterministic", "run_probabilistic",
]
