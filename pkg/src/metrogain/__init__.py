"""Metrological usefulness of bipartite quantum states.

The gain of a state is its quantum Fisher information for a local
Hamiltonian divided by the best value reachable with separable states,
maximized over all local Hamiltonians by a see-saw iteration.
"""

__version__ = "0.1.0"

from .linalg import DimensionError, hermitize, partial_trace, tensor_product
from .states import (
    DensityMatrix,
    SchmidtVector,
    StateValidationError,
    ghz_state,
    isotropic_state,
    load_state,
    maximally_entangled,
    noisy_max_entangled,
    noisy_singlet,
    nonwhite_noise_singlet,
    pure_from_schmidt,
    random_mixed,
    random_pure,
    ring_cluster_4,
    save_state,
    werner_state,
)
from .metrology import (
    GainResult,
    LocalHamiltonian,
    UndefinedGainError,
    error_propagation,
    gain_for_H,
    qfi,
    separable_bound,
    sld,
)
from .optimizer import (
    BisectionConfig,
    BracketError,
    SeeSawConfig,
    c2_update,
    optimal_H_for_M,
    optimize_gain,
    robustness_threshold,
    see_saw,
)
from .activation import Bipartition, add_ancilla, ncopy_qfi_bound, paper_hamiltonian, regroup, tensor_states
from .analytic import iso_gain, iso_threshold, werner_gain, werner_threshold

__all__ = [n for n in dir() if not n.startswith("_")]
