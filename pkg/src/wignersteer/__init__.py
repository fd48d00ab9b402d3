"""Conditional Wigner functions, steering criteria and remote Wigner negativity."""

from .phase_space import (
    ModeLayout,
    PhaseGrid,
    WignerField,
    integrate,
    marginal,
    min_value,
    pair,
    sample_field,
    symplectic_form,
)
from .gaussian import (
    ConditionalGaussian,
    GaussianState,
    attenuate,
    conditional_gaussian,
    gaussian_steerable,
    heisenberg_defect,
    make_product,
    make_tmsv,
    number_witness_value,
    optimal_number_witness,
    schur_complement,
    wigner_eval,
)
from .fock import (
    FockMixtureState,
    find_negative_fock,
    fock_wigner,
    laguerre,
    mixture_joint_wigner,
    mixture_reduced_alice,
    thermal_weights,
    verify_fock_recurrence,
)
from .measurements import (
    PovmFamily,
    completeness_defect,
    fock_projector_family,
    heterodyne_family,
    identity_family,
)
from .conditional import (
    GridJoint,
    PhysicalityCertificate,
    WitnessFamily,
    WitnessOperator,
    certify_unphysical,
    conditional_quasi_probability,
    conditional_wigner,
    displaced_number,
    fock_projector,
    negativity_summary,
    remote_conditioned_state,
    witness_expectation,
)
from .steering import (
    avg_conditional_wigner_variance,
    build_assemblage,
    conditional_probability,
    conditional_variance,
    lhs_reconstruction_check,
    reid_product,
    verify_variance_chain,
)

__version__ = "0.1.0"
