"""Algebraic solution of the resonant two-mode Jaynes-Cummings model.

The two cavity modes are rotated into quasi-modes so that only one couples to
the atom; the rotation is a Wigner D-matrix per total photon number. On top of
that the package computes generation probabilities of entangled N-photon
states for single-step, conditional and non-conditional atom sequences, and
ships a brute-force Hamiltonian oracle to check the algebra.
"""

__version__ = "0.1.0"

from .evolution import (
    BranchMatrices,
    JaynesCummingsEvolver,
    apply_branch_quasimode,
    atom_detection_collapse,
    branch_matrices,
    evolve,
    reduced_field_density,
)
from .fock import (
    AtomFieldState,
    Basis,
    FieldDensityOperator,
    ModeFockLabel,
    SchwingerLabel,
    TwoModeState,
    fock_from_schwinger,
    inner_product,
    make_basis_state,
    schwinger_from_fock,
)
from .oracle import TruncatedHamiltonian, build_hamiltonian, crosscheck, crosscheck_batch, evolve_exact
from .quasimode import (
    QuasiModeTransform,
    build_transform,
    density_to_basis,
    to_mode_basis,
    to_quasimode_basis,
)
from .schemes import (
    BellTarget,
    NonConditionalWeights,
    TargetState,
    bell_probabilities_from_N00,
    conditional_overlap,
    conditional_state,
    conditional_success_probability,
    contributing_fock_set,
    nonconditional_probability,
    nonconditional_weights,
    run_conditional_sequence,
    single_step_probability,
)
from .wigner import (
    CouplingConfig,
    EulerAngles,
    big_D,
    dmatrix_by_expansion,
    euler_from_couplings,
    small_d,
)
