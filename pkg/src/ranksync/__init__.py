"""Interactive synchronization of permutations over a two-way channel."""

from .core import (
    BlockDeletion,
    Deletions,
    DecodeError,
    DomainError,
    PartialPermutation,
    Permutation,
    Translocation,
    Transposition,
    UniquenessViolation,
    apply_error,
    checksum,
    deinterleave,
    interleave,
    inversion_vector,
    missing_symbols,
    project,
    reinsert_by_vt,
    sample_error,
    vt_syndrome,
)

__version__ = "0.1.0"
