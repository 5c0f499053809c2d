import math
from typing import Dict, List, Optional


class SampleStatistic:
    """Accumulates per-sample results of a grid sweep.

    Ranks are reduced by min/max, residuals by max and boolean checks by AND, so statistics
    collected on parts of a grid can be merged in any order.
    """

    def __init__(self):
        self._samples = 0
        self._min_rank: Optional[int] = None
        self._max_rank: Optional[int] = None
        self._worst_residual = 0.0
        self._all_passed = True
        self._all_robust = True

    @property
    def samples(self) -> int:
        return self._samples

    @property
    def min_rank(self) -> int:
        return 0 if self._min_rank is None else self._min_rank

    @property
    def max_rank(self) -> int:
        return 0 if self._max_rank is None else self._max_rank

    @property
    def worst_residual(self) -> float:
        return self._worst_residual

    @property
    def all_passed(self) -> bool:
        return self._all_passed

    @property
    def all_robust(self) -> bool:
        return self._all_robust

    @property
    def rank_constant(self) -> bool:
        return self._min_rank == self._max_rank

    def update_statistic(
        self, rank: Optional[int] = None, residual: float = 0.0, passed: bool = True, robust: bool = True
    ) -> Dict[str, float]:
        """Record one sample.
        :return: dict with the values of the current sample
        """
        if math.isnan(residual):
            raise ValueError(f"Residual of sample {self._samples} is NaN")
        self._samples += 1
        if rank is not None:
            self._min_rank = rank if self._min_rank is None else min(self._min_rank, rank)
            self._max_rank = rank if self._max_rank is None else max(self._max_rank, rank)
        self._worst_residual = max(self._worst_residual, residual)
        self._all_passed = self._all_passed and passed
        self._all_robust = self._all_robust and robust
        return {"rank": -1 if rank is None else rank, "residual": residual, "passed": float(passed)}

    def get_metric(self) -> Dict[str, float]:
        return {
            "samples": self._samples,
            "min_rank": self.min_rank,
            "max_rank": self.max_rank,
            "worst_residual": self._worst_residual,
            "all_passed": self._all_passed,
            "all_robust": self._all_robust,
        }

    @staticmethod
    def create_from_list(statistics: List["SampleStatistic"]) -> "SampleStatistic":
        if len(statistics) == 0:
            raise ValueError("Empty list of statistics passed")
        statistic = statistics[0]
        for other_statistic in statistics[1:]:
            statistic._samples += other_statistic._samples
            for rank in (other_statistic._min_rank, other_statistic._max_rank):
                if rank is not None:
                    statistic._min_rank = rank if statistic._min_rank is None else min(statistic._min_rank, rank)
                    statistic._max_rank = rank if statistic._max_rank is None else max(statistic._max_rank, rank)
            statistic._worst_residual = max(statistic._worst_residual, other_statistic._worst_residual)
            statistic._all_passed = statistic._all_passed and other_statistic._all_passed
            statistic._all_robust = statistic._all_robust and other_statistic._all_robust
        return statistic
