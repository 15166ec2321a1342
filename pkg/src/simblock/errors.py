"""Exception hierarchy.

Everything raised on purpose derives from :class:`SimBlockError`.  The
subclasses of :class:`NoDecompositionFound` are the "legitimate negative
answer" family: the CLI maps them to exit code 2.
"""


class SimBlockError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SimBlockError, ValueError):
    pass


class PartitionMismatch(SimBlockError, ValueError):
    pass


class SingularMatrix(SimBlockError):
    pass


class DefectiveTolerance(SimBlockError):
    """A generalized eigenspace came out with the wrong dimension.

    Usually means ``eig_cluster_tol`` is mis-tuned for the input scale.
    """


class NotInvariant(SimBlockError):
    pass


class InternalInconsistency(SimBlockError):
    pass


class VerificationFailed(SimBlockError):
    pass


class NoDecompositionFound(SimBlockError):
    pass


class NotTriangularizable(NoDecompositionFound):
    pass


class NotDiagonalizable(NoDecompositionFound):
    pass


class OnlyScalarSpectrum(NoDecompositionFound):
    pass


class ParseError(SimBlockError, ValueError):
    pass


class DuplicateName(ParseError):
    pass
