import logging

from linear_systems.kronecker import kronecker_data
from models import LinearPair
from numlin import DEFAULT_TOL
from utils.errors import NotControllable

logger = logging.getLogger(__name__)


def linearly_conjugate(first: LinearPair, second: LinearPair, rel_tol: float = DEFAULT_TOL) -> bool:
    """Controllable pairs are linearly conjugate iff their sorted Kronecker indices agree."""
    if (first.n, first.m) != (second.n, second.m):
        logger.debug(f"Pairs of sizes {(first.n, first.m)} and {(second.n, second.m)} are never conjugate")
        return False
    first_data, second_data = kronecker_data(first, rel_tol), kronecker_data(second, rel_tol)
    for position, data in (("first", first_data), ("second", second_data)):
        if not data.controllable:
            raise NotControllable(f"The {position} pair is not controllable (rank {data.r[-1]})")
    return first_data.kappa == second_data.kappa
