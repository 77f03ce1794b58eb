"""Pure-state informationally complete POVMs.

Constructions with 2D and 3D-2 outcomes, their closed-form inversions,
completeness certificates, ambiguity witnesses for 2D-1 outcomes, and a
finite-shot tomography simulator.
"""

from .analysis import (
    AmbiguityWitness,
    CertificationResult,
    FrameReport,
    certify_psic,
    find_ambiguity,
    frame_rank,
    rank_one_variant_partner,
    trine_reflection,
)
from .constructions import (
    THETA_TETRA,
    RankOneConstructionParams,
    TwoDConstructionParams,
    amalgamate_last_pair,
    build_complementary_bases,
    build_psic_2d,
    build_rank_one_3dm2,
    build_rank_one_states,
    build_tetrahedral,
    build_trine,
    normalize_elements,
    subspace_pauli,
)
from .linalg import EigenDecomposition, HermitianOperator, eig_hermitian, expectation, inv_sqrt, sqrt_psd
from .objects import (
    BlochVector,
    OutcomeDistribution,
    Povm,
    PureState,
    bloch_of_state,
    fidelity,
    gauge_fix,
    probabilities,
    random_pure_state,
    state_of_bloch,
)
from .reconstruction import (
    ReconstructionReport,
    invert_psic_2d,
    invert_rank_one_3dm2,
    premeasure_basis_choice,
)
from .tomo import efficiency_sweep, make_scheme, run_tomography, sample_counts

__version__ = "0.1.0"
