"""Quantum-trajectory simulator for a control atom coupled to a blockaded
Rydberg ensemble, with a master-equation oracle and collective-state
analytics."""

from .hilbert import BLOCKADE, FULL, Basis, Level, build_basis
from .model import AUTO_ANTIBLOCKADE, ModelOperators, SimParams, build_model
from .mcwf import run_observables, run_trajectory, steady_state

__version__ = "0.1.0"

__all__ = [
    "AUTO_ANTIBLOCKADE",
    "BLOCKADE",
    "Basis",
    "FULL",
    "Level",
    "ModelOperators",
    "SimParams",
    "build_basis",
    "build_model",
    "run_observables",
    "run_trajectory",
    "steady_state",
    "__version__",
]
