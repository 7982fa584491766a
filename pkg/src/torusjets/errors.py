"""Exception types shared across the package.

Plain ValueError is used for malformed arguments (bad shapes, out-of-range
parameters, mixed grids).  The classes below separate failures that the CLI
maps to dedicated exit codes.
"""


class GeodesicDomainError(Exception):
    """A mathematical precondition on the boundary data fails."""


class NumericError(Exception):
    """An iterative solver failed to converge or hit a degeneracy."""


class ConsistencyError(RuntimeError):
    """An internal identity that must hold numerically was violated."""
