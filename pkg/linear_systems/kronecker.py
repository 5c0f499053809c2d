from typing import List, Tuple

import torch

from models import KroneckerData, LinearPair
from numlin import DEFAULT_TOL, numerical_rank


def controllability_matrix(pair: LinearPair, blocks: int) -> torch.Tensor:
    """(B, AB, ..., A^{blocks-1}B)
    :return: [n; blocks * m]
    """
    columns: List[torch.Tensor] = []
    power = pair.B
    for _ in range(blocks):
        columns.append(power)
        power = pair.A @ power
    if not columns:
        return pair.B.new_zeros((pair.n, 0))
    return torch.cat(columns, dim=1)


def kalman_controllable(pair: LinearPair, rel_tol: float = DEFAULT_TOL) -> Tuple[int, bool]:
    rank = numerical_rank(controllability_matrix(pair, pair.n), rel_tol)
    return rank, rank == pair.n


def kronecker_data(pair: LinearPair, rel_tol: float = DEFAULT_TOL) -> KroneckerData:
    n, m = pair.n, pair.m
    r = [0] + [numerical_rank(controllability_matrix(pair, j), rel_tol) for j in range(1, n + 1)]
    # the rank chain is stationary after n blocks, so s_{n+1} = 0
    s = [m] + [r[j] - r[j - 1] for j in range(1, n + 1)] + [0]
    rho = next(j for j, s_j in enumerate(s) if s_j == 0)
    sigma = [sum(s[i:]) for i in range(rho + 1)]
    kappa = [sum(1 for k in range(1, len(s)) if s[k] >= j) for j in range(1, m + 1)]
    return KroneckerData(r=r, s=s, sigma=sigma, rho=rho, kappa=kappa, controllable=r[n] == n)
