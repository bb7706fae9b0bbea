"""Punctured and rate-compatible polar code toolkit.

Boolean-function analysis of puncturing patterns, catastrophic-pattern
characterization, rate-compatible family construction, and a BPSK/AWGN
Monte Carlo stack with CRC-aided list decoding.
"""

from .catastrophic import (
    CatastrophicSet,
    ZeroWeightPolynomial,
    enumerate_catastrophic,
    is_catastrophic,
    min_catastrophic_zeros,
    noncatastrophic_rank_profile,
    poly_and,
    poly_or,
    rank_noncatastrophic_check,
    weight_distribution,
)
from .codec import (
    CrcConfig,
    DecodeResult,
    PolarCodeSpec,
    assign_llrs,
    crc_attach,
    crc_check,
    crc_remainder,
    dcm_frozen_values,
    encode,
    encode_to_mother,
    sc_decode,
    scl_decode,
    scl_decode_batch,
)
from .construction import (
    RcFamily,
    ReliabilityOrder,
    SeedSequence,
    boxplus,
    channel_llr_means,
    greedy_base_pattern,
    greedy_rc_family,
    info_set,
    reciprocal_rc_family,
    reliability_order,
    seed_sequence,
)
from .core import (
    Gf2Matrix,
    binary_expansion,
    bit_permute,
    bit_reverse,
    dominates_ones,
    dominates_zeros,
    expansion_to_index,
    generator_matrix,
    gf2_rank,
    gf2_solve_right,
    hamming_weight,
    polar_encode,
)
from .errors import (
    ConstructionViolationError,
    EnumerationCapError,
    InfeasibleRateError,
    NonReciprocalDcmError,
    PolarPunctError,
    SingularMatrixError,
    ZeroInInfoSetError,
)
from .patterns import (
    ChannelModel,
    PuncturingPattern,
    dcm_frozen_set,
    is_reciprocal,
    permuted_pattern,
    qup_pattern,
    rqup_pattern,
    ucm_zero_set,
    z_capacity,
    z_capacity_many,
    z_spectrum,
)
from .sim import (
    ChannelConfig,
    SimResult,
    rows_to_csv,
    run_fer,
    sweep,
    transmit,
    trial_rng,
    write_csv,
)

__version__ = "0.1.0"
