"""qeclab: a desk-scale lab for approximate error correction under
correlated (controlled) noise.

The library builds a block-product code from a balanced low-influence
Boolean function, measures its identity-decoder error against controlled
bit-flips, and demonstrates that controlled phase errors defeat any
two-dimensional code.  Everything is seeded and reproducible; every
checker emits a self-certifying report.
"""

from .boolfn import (
    BooleanFunctionTable,
    InfluenceProfile,
    balance,
    default_tribe_width,
    influence_profile,
    tribes,
)
from .codespace import (
    CodeParams,
    CodewordCoeffs,
    basis_vector,
    block_project,
    codeword_vector,
    eval_basis,
    gram_matrix,
    make_params,
    sample_codeword,
    sample_codeword_pair,
)
from .noise import (
    AllSet,
    BlockSet,
    ControlledBitFlip,
    ControlledPhase,
    EmptySet,
    ExplicitSet,
    PhasePartition,
    SeededSet,
    SingletonSet,
    apply_bitflip,
    apply_error,
    apply_partitioned_phase,
    apply_phase,
    bitflip_form,
    block_control,
    compose_phases,
    enumerate_singletons,
    structured_bitflip_form,
)
from .attacks import (
    ImpossibilityWitness,
    boost_overlap,
    build_phase_partition,
    find_impossibility_witness,
    random_orthonormal_pair,
    realize_as_phase_pair,
)
from .verify import (
    VerificationConfig,
    VerificationReport,
    check_codeword_influence_bound,
    check_exactness,
    check_immunity,
    check_sensitivity_bound,
    check_separation,
)

__version__ = "0.1.0"
