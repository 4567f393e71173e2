"""Quantum crossovers in a three-qubit system: ground state, geometry, metrology and sweeps."""
from .model import SystemParams, build_hamiltonian
from .spectral import GroundState, ground_state

__all__ = ["SystemParams", "build_hamiltonian", "GroundState", "ground_state"]
__version__ = "0.1.0"
