"""Entropic single- and two-particle interference visibilities for N-path interferometers."""

from .interferometer import (
    CoincidenceDistribution,
    PhaseConfig,
    coincidence_distribution,
    general_distribution,
    local_unitary,
    marginals,
)
from .measures import (
    conditional_states,
    holevo_rhs,
    joint_entropy_normalized,
    mutual_information,
    shannon_entropy_normalized,
    von_neumann_entropy,
)
from .optimizer import (
    OptimizerConfig,
    VisibilityReport,
    approx_holevo_min,
    grid_oracle,
    optimize_single_visibility,
    optimize_tilde_two_particle,
    optimize_two_particle_visibility,
    tilde_single_visibility,
    verify_inequality,
)
from .qcore import (
    BipartiteState,
    ReducedState,
    fourier_matrix,
    hermitian_eigendecomposition,
    partial_trace,
    phase_diagonal,
    tensor,
    validate_state,
)
from .states import (
    LambdaParams,
    chaotic,
    lambda_closed_form,
    lambda_state,
    max_entangled,
    product_state,
    random_mixed,
    random_pure,
)

__version__ = "0.1.0"
