"""Block-structured VQE for Hubbard rings.

The eigensolver splits the fermionic modes into a classically
enumerated block set and a quantum register, evaluates every
Hamiltonian bracket on the register (statevector or sampled), and
minimizes the assembled energy over block amplitudes and circuit
angles.
"""

from .classical_sector import ClassicalFactors, compute_factors
from .encoding import EncodingScheme, compact_operator, encode_strings, scheme_for
from .fock import Configuration, OperatorString, enumerate_configs, matrix_element
from .model import FermionHamiltonian, HubbardParams, build_hubbard, split
from .oracle import ExactResult, MeanFieldResult, exact_ground, mean_field
from .paulis import PauliSum, pauli_decompose
from .sim import AnsatzSpec, Statevector, ansatz_state, expect, offdiag_bracket
from .solver import BlockVqeSolver
from .vqe import (
    EXACT,
    EnergyBreakdown,
    MinimizeResult,
    OptimizerOptions,
    SimMode,
    SolveResult,
    VariationalState,
    block_matrix,
    energy,
    energy_general,
    hubbard_operators,
    minimize,
    optimal_amplitudes,
    prepare_general,
    solve_hubbard,
    solve_hubbard_custom,
)

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec",
    "BlockVqeSolver",
    "ClassicalFactors",
    "Configuration",
    "EXACT",
    "EncodingScheme",
    "EnergyBreakdown",
    "ExactResult",
    "FermionHamiltonian",
    "HubbardParams",
    "MeanFieldResult",
    "MinimizeResult",
    "OperatorString",
    "OptimizerOptions",
    "PauliSum",
    "SimMode",
    "SolveResult",
    "Statevector",
    "VariationalState",
    "ansatz_state",
    "block_matrix",
    "build_hubbard",
    "compact_operator",
    "compute_factors",
    "encode_strings",
    "energy",
    "energy_general",
    "enumerate_configs",
    "exact_ground",
    "expect",
    "hubbard_operators",
    "matrix_element",
    "mean_field",
    "minimize",
    "offdiag_bracket",
    "optimal_amplitudes",
    "pauli_decompose",
    "prepare_general",
    "scheme_for",
    "solve_hubbard",
    "solve_hubbard_custom",
    "split",
    "__version__",
]
