"""Exception types shared across the package.

Every error raised by portcut derives from :class:`PortfolioCutError`, so
callers (and the CLI) can distinguish data/numeric problems from plain bugs.
"""

from __future__ import annotations


class PortfolioCutError(Exception):
    """Base class for all portcut errors."""


class InvalidInputError(PortfolioCutError):
    """An argument violates a documented precondition."""


class InsufficientDataError(InvalidInputError):
    """Too few observations for the requested computation."""


class DegenerateAssetError(PortfolioCutError):
    """One or more assets have zero return variance."""

    def __init__(self, asset_ids, message: str | None = None):
        self.asset_ids = list(asset_ids)
        super().__init__(
            message
            or f"zero-variance asset(s): {', '.join(map(str, self.asset_ids))}; "
            "drop or repair them before building a market graph"
        )


class InvalidPartitionError(PortfolioCutError):
    """A bipartition leaves one side empty or misassigns a vertex."""


class DegenerateVolumeError(PortfolioCutError):
    """A side of the partition has zero volume under the volume objective."""


class DegenerateDegreeError(PortfolioCutError):
    """Zero-degree vertices make the volume-normalized eigenproblem singular."""

    def __init__(self, vertices, message: str | None = None):
        self.vertices = list(vertices)
        super().__init__(
            message
            or f"zero-degree vertices {self.vertices} are incompatible with the "
            "volume-normalized objective"
        )


class NumericalFailureError(PortfolioCutError):
    """A numerical routine failed to converge or verify."""

    def __init__(self, message: str, *, diagnostics: dict | None = None):
        self.diagnostics = dict(diagnostics or {})
        super().__init__(message)


class SizeLimitError(PortfolioCutError):
    """Exhaustive search refused: the candidate count is astronomically large."""

    def __init__(self, n_vertices: int, candidate_count: int, limit: int):
        self.n_vertices = n_vertices
        self.candidate_count = candidate_count
        self.limit = limit
        super().__init__(
            f"brute-force cut over {n_vertices} vertices would enumerate "
            f"{float(candidate_count):.1e} bipartitions (limit N <= {limit})"
        )


class SingularCovarianceError(PortfolioCutError):
    """Covariance matrix is numerically singular for the requested solve."""

    def __init__(self, message: str, *, condition_estimate: float | None = None):
        self.condition_estimate = condition_estimate
        super().__init__(message)


class DegenerateNormalizationError(PortfolioCutError):
    """Weight normalization impossible: raw weights sum to (almost) zero."""


class DegenerateSeriesError(PortfolioCutError):
    """A return series has zero sample variance."""
