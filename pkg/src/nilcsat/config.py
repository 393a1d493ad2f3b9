"""Global size limits. Everything in this package is exponential somewhere."""

from .errors import ResourceError

#: Largest prime accepted as a field modulus.
MAX_Q = 13

#: Maximum number of points any exhaustive scan may visit.
EXHAUSTION_LIMIT = 2**24

#: Largest operation table (in entries) compiled eagerly for circuit evaluation.
TABLE_LIMIT = 2**22


def check_exhaustion(points, what="exhaustive scan", limit=None):
    """Raise ResourceError when `points` exceeds the exhaustion limit."""
    limit = EXHAUSTION_LIMIT if limit is None else limit
    if points > limit:
        raise ResourceError(f"{what} needs {points} points, limit is {limit}")
    return points
