import logging
from dataclasses import dataclass
from typing import Dict, Sequence

from tqdm import tqdm

from data_module.grids import neighbourhood_grid
from models import ControlSystem
from numlin import DEFAULT_TOL, is_rank_robust, numerical_rank
from utils.metrics import SampleStatistic

logger = logging.getLogger(__name__)

REGULAR = "Regular"
WEAKLY_SINGULAR = "WeaklySingular"
STRONGLY_SINGULAR = "StronglySingular"


@dataclass
class PointClass:
    tag: str
    rank_at_point: int
    sup_rank_nbhd: int
    samples_used: int
    samples_discarded: int = 0
    robust: bool = True  # every sampled rank decision is stable under the tolerance hysteresis

    @property
    def regular(self) -> bool:
        return self.tag == REGULAR

    def to_dict(self) -> Dict:
        return {
            "tag": self.tag,
            "rank_at_point": self.rank_at_point,
            "sup_rank_nbhd": self.sup_rank_nbhd,
            "samples_used": self.samples_used,
            "samples_discarded": self.samples_discarded,
            "robust": self.robust,
        }


def classify_point(
    system: ControlSystem,
    x: Sequence[float],
    u: Sequence[float],
    radius: float = 0.1,
    grid: int = 5,
    rel_tol: float = DEFAULT_TOL,
    hysteresis: float = 10.0,
    progress: bool = False,
) -> PointClass:
    """Regular / weakly singular / strongly singular, from the rank of ∂f/∂u on a grid around (x, u).

    Samples of smaller rank than the center lie on a singular locus inside the neighbourhood and are dropped.
    """
    names = list(system.states) + list(system.controls)
    center = [float(v) for v in x] + [float(v) for v in u]
    points = neighbourhood_grid(system, names, center, radius, grid)
    rank_at_point = numerical_rank(system.control_jacobian(x, u), rel_tol)

    statistic = SampleStatistic()
    discarded = 0
    for point in tqdm(points, desc="classify", disable=not progress):
        jacobian = system.control_jacobian(point[: system.n], point[system.n :])
        rank = numerical_rank(jacobian, rel_tol)
        if rank < rank_at_point:
            discarded += 1
            continue
        statistic.update_statistic(rank=rank, robust=is_rank_robust(jacobian, rel_tol, hysteresis))
    if discarded > 0:
        logger.debug(f"{discarded} samples below the center rank {rank_at_point} were dropped")

    sup_rank = max(statistic.max_rank, rank_at_point)
    if statistic.rank_constant and sup_rank == rank_at_point:
        tag = REGULAR
    elif sup_rank == system.m:
        tag = WEAKLY_SINGULAR
    else:
        tag = STRONGLY_SINGULAR
    return PointClass(tag, rank_at_point, sup_rank, statistic.samples, discarded, statistic.all_robust)
