"""Major index statistics, labeled-partition bijections and q-derangement
numbers in exact integer arithmetic."""

from .bijections import (
    Decomposition,
    LabeledPartition,
    is_standard,
    phi_decompose,
    phi_insert,
    psi,
    psi_inv,
    sort_columns,
    sort_columns_inv,
)
from .combinat import (
    descent_set,
    derangement_points,
    dp_reduce,
    fixed_points,
    insert_fixed_point,
    iter_derangements,
    iter_partitions_with_sum,
    iter_permutations,
    major_index,
    suffix_descent_counts,
)
from .errors import (
    CoefficientOverflowError,
    GuardExceededError,
    MalformedInputError,
    NotStandardError,
    PreconditionError,
    QmajError,
)
from .qpoly import (
    QPoly,
    poly_add,
    poly_mul,
    q_binomial,
    q_derangement_bruteforce,
    q_derangement_formula,
    q_derangement_recurrence,
    q_factorial,
    q_int,
)
from .verify import (
    Identity,
    VerificationReport,
    verify_eq1,
    verify_eq2,
    verify_eq3,
    verify_eq5,
    verify_roundtrips,
    verify_thm1,
)

__version__ = "0.1.0"
