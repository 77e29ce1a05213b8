"""bentkit: analysis and construction of (cubic) bent Boolean functions."""

from .boolfun import (
    Anf,
    BooleanFunction,
    WalshSpectrum,
    degree,
    derivative,
    direct_sum,
    fast_point_space,
    from_anf,
    higher_derivative,
    is_bent,
    is_homogeneous,
    k_fold,
    relaxed_second_derivative,
    second_derivative,
    to_anf,
    walsh_spectrum,
    zero_function,
)
from .catalog import (
    Catalog,
    Flat,
    format_anf,
    format_base32,
    load_catalog,
    parse_anf_string,
    parse_base32,
    verify_entry,
    verify_flat_normality,
)
from .errors import BudgetExceededError, UnsourcedEntryError, VerificationFailedError
from .gf2 import Gf2Matrix, Subspace, apply_transform, change_of_basis, complement, gjb, invert
from .invariants import (
    SnfMultiset,
    all_one_decomposition,
    check_snf_symmetry,
    gamma_rank,
    snf,
    two_rank,
)
from .subspaces import (
    MmRepresentation,
    SubspaceCollection,
    enumerate_ms,
    enumerate_rms,
    in_completed_mm,
    is_m_subspace,
    is_relaxed_m_subspace,
    linearity_index,
    mm_representation,
    relaxed_linearity_index,
)

__version__ = "0.1.0"
