"""Resonator lattices coupled through ancilla qubits: exact decoupling,
effective tight-binding and xy models, dynamics and transmon flux control."""

from .lattice import (
    EffectiveParams,
    LatticeModel,
    LatticeSpec,
    band_structure,
    bloch_hamiltonian,
    build_chain,
    build_kagome,
    build_lattice,
    effective_from_full,
    uniform_k_grid,
)
from .linalg import eig_hermitian, expm_antihermitian, similarity_transform
from .star import (
    DressedStar,
    StarParams,
    build_star_hamiltonian,
    closed_form_U,
    decoupling_angle,
    derived_frequencies,
    dress_star,
    effective_coupling,
    excitation_number_matrix,
)
from .transmon import TransmonParams, flux_for_coupling, josephson_energy, qubit_frequency

__version__ = "0.1.0"
