"""Decide, classify, construct, and audit Gram mates: pairs of distinct
(0,1) matrices A, B with AA^T = BB^T and A^T A = B^T B."""

from .matrix_core import (
    BinaryMatrix,
    BlockSpec,
    Permutation,
    SignedMatrix,
    apply_perms,
    col_sums,
    load_matrix,
    parse_matrix,
    rank_exact,
    row_sums,
    save_matrix,
    serialize_matrix,
)
from .gram import (
    ConvertibilityReport,
    GramPair,
    GramSingularReport,
    convertibility,
    embed_check,
    is_gram_pair,
    is_realizable_witness,
)
from .gale_ryser import conjugate, construct_urs, exists_urs, majorizes, spread_construction
from .rank_forms import (
    Rank1Form,
    Rank2Form,
    canonical_rank1_E,
    canonical_rank2_E,
    classify_rank1,
    classify_rank2,
    rank1_complete,
    rank1_gram_data,
    rank2_complete,
    rank2_gram_data,
    rank2_realizable,
)
from .combinators import (
    block_swap_pair,
    complement_pair,
    direct_sum_pair,
    join_pair,
    kron_pair,
    kron_realizable,
    kron_swap,
)
from .iso import (
    IsoWitness,
    are_isomorphic,
    is_fixable,
    iso_distinct_sv,
    remaining_context,
    sum_separation,
)
from .oracle import enumerate_gram_pairs, enumerate_mates_of, validate_theorems

__all__ = [
    "BinaryMatrix",
    "SignedMatrix",
    "Permutation",
    "BlockSpec",
    "row_sums",
    "col_sums",
    "rank_exact",
    "apply_perms",
    "parse_matrix",
    "serialize_matrix",
    "load_matrix",
    "save_matrix",
    "GramPair",
    "GramSingularReport",
    "ConvertibilityReport",
    "is_gram_pair",
    "is_realizable_witness",
    "embed_check",
    "convertibility",
    "conjugate",
    "majorizes",
    "exists_urs",
    "construct_urs",
    "spread_construction",
    "Rank1Form",
    "Rank2Form",
    "canonical_rank1_E",
    "canonical_rank2_E",
    "classify_rank1",
    "classify_rank2",
    "rank1_complete",
    "rank1_gram_data",
    "rank2_complete",
    "rank2_gram_data",
    "rank2_realizable",
    "complement_pair",
    "direct_sum_pair",
    "join_pair",
    "kron_pair",
    "kron_swap",
    "kron_realizable",
    "block_swap_pair",
    "IsoWitness",
    "remaining_context",
    "is_fixable",
    "are_isomorphic",
    "iso_distinct_sv",
    "sum_separation",
    "enumerate_gram_pairs",
    "enumerate_mates_of",
    "validate_theorems",
]

__version__ = "0.1.0"
