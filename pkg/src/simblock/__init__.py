"""Simultaneous block triangularization and block diagonalization of
finite sets of complex square matrices."""

from .commutant import (
    block_diagonalize_invertible,
    commutant_basis,
    select_commuting_matrix,
    witness_matrix,
)
from .diagonalize import adjoin_conjugate_transposes, block_diagonalize_unitary
from .errors import (
    DefectiveTolerance,
    DimensionMismatch,
    DuplicateName,
    InternalInconsistency,
    NoDecompositionFound,
    NotDiagonalizable,
    NotInvariant,
    NotTriangularizable,
    OnlyScalarSpectrum,
    ParseError,
    PartitionMismatch,
    SimBlockError,
    SingularMatrix,
    VerificationFailed,
)
from .invariant import (
    SearchConfig,
    find_minimal_invariant_subspace,
    is_irreducible,
    orbit_closure,
    restrict_to_quotient,
)
from .io import MatrixSet, load_report, parse_matrix_set, report_to_dict
from .linalg import (
    Spectrum,
    Tolerances,
    generalized_eigenspaces,
    invertible_to_unitary,
    nullspace,
    orthogonal_complement,
    spectral_split,
    spectrum,
)
from .report import BlockPartition, DecompositionReport, Transform
from .triangularize import block_triangularize
from .verify import block_pattern_residual, validate_report

__version__ = "0.1.0"
