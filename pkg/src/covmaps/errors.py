"""Exception hierarchy shared by all modules."""


class CovMapsError(Exception):
    """Base class for errors raised by this package."""


class NotHermitian(CovMapsError, ValueError):
    pass


class NotNonnegative(CovMapsError, ValueError):
    pass


class NotIrreducible(CovMapsError, ValueError):
    pass


class NoConvergence(CovMapsError, RuntimeError):
    pass


class DimMismatch(CovMapsError, ValueError):
    pass


class BadKind(CovMapsError, ValueError):
    pass


class KindUnsupported(BadKind):
    pass


class NotDD(CovMapsError, ValueError):
    pass


class NotFactorWidth2(CovMapsError):
    """``M(B)`` has a negative eigenvalue, so ``B`` has factor width > 2.

    ``eigenvalue`` and ``eigenvector`` hold the witness.
    """

    def __init__(self, message, eigenvalue, eigenvector):
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.eigenvector = eigenvector


class DecompositionFailure(CovMapsError):
    """A width-2 PCP decomposition could not be produced.

    ``report`` is the :class:`~covmaps.reports.PropertyReport` that blocked it.
    """

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class UnverifiedDecomposition(CovMapsError, ValueError):
    pass


class DocumentError(CovMapsError, ValueError):
    """Malformed input document; ``field`` names the offending entry."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
