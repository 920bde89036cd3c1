"""Qubit Hamiltonians for identical fermions on a periodic lattice.

Particles live in Gray-coded position registers kept in ascending key order;
signed register rotations restore that order after each hop, and penalty
terms suppress unordered states.
"""
from .config import ConfigError, ProblemSpec
from .encoding import QubitLayout, brgc_encode, enumerate_basis, interleave_key
from .hamiltonian import HamiltonianParts, assemble_hamiltonian, build_parts
from .laplacian import brgc_laplacian_1p, fermionic_laplacian, prune_redundant_rotations
from .oracle import build_oracle, compare_subspace, penalized_spectrum
from .pauli import PauliSum, PauliTerm, Projector

__all__ = [
    "ConfigError",
    "ProblemSpec",
    "QubitLayout",
    "brgc_encode",
    "enumerate_basis",
    "interleave_key",
    "HamiltonianParts",
    "assemble_hamiltonian",
    "build_parts",
    "brgc_laplacian_1p",
    "fermionic_laplacian",
    "prune_redundant_rotations",
    "build_oracle",
    "compare_subspace",
    "penalized_spectrum",
    "PauliSum",
    "PauliTerm",
    "Projector",
]
