import pytest

from utils.metrics import SampleStatistic


def test_update_statistic():
    statistic = SampleStatistic()
    assert statistic.update_statistic(rank=2, residual=1e-3) == {"rank": 2, "residual": 1e-3, "passed": 1.0}
    statistic.update_statistic(rank=1, passed=False)
    assert (statistic.min_rank, statistic.max_rank) == (1, 2)
    assert not statistic.rank_constant
    assert statistic.get_metric() == {
        "samples": 2,
        "min_rank": 1,
        "max_rank": 2,
        "worst_residual": 1e-3,
        "all_passed": False,
        "all_robust": True,
    }
    with pytest.raises(ValueError):
        statistic.update_statistic(residual=float("nan"))


def test_merged_statistics_match_one_sweep():
    samples = [(2, 0.1, True), (3, 0.0, True), (2, 0.5, False), (1, 0.2, True)]
    whole = SampleStatistic()
    parts = [SampleStatistic(), SampleStatistic()]
    for i, (rank, residual, robust) in enumerate(samples):
        whole.update_statistic(rank=rank, residual=residual, robust=robust)
        parts[i % 2].update_statistic(rank=rank, residual=residual, robust=robust)
    assert SampleStatistic.create_from_list(parts).get_metric() == whole.get_metric()
    with pytest.raises(ValueError):
        SampleStatistic.create_from_list([])


def test_empty_statistic_has_constant_rank():
    statistic = SampleStatistic()
    assert statistic.rank_constant
    assert statistic.samples == 0
