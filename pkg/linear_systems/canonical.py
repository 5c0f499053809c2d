"""Feedback canonical forms of controllable pairs.

The chain basis is selected greedily: columns A^j b_i are visited power by power and input by
input, and kept while they are numerically independent of the columns kept so far. The number of
kept columns per input gives its chain length; the rows q_i A^k of the inverse chain matrix give
the new coordinates.
"""
import logging
from typing import List, Tuple

import torch

from linear_systems.kronecker import kalman_controllable
from models import BrunovskyResult, LinearPair
from numlin import DEFAULT_TOL, numerical_rank
from utils.errors import NotControllable, NumericalFailure

logger = logging.getLogger(__name__)


def chain_lengths(pair: LinearPair, rel_tol: float = DEFAULT_TOL) -> List[int]:
    """Chain length of every input column, in the original column order."""
    lengths = [0] * pair.m
    broken = [False] * pair.m
    kept: List[torch.Tensor] = []
    powers = [pair.B[:, i] for i in range(pair.m)]
    for _ in range(pair.n):
        for i in range(pair.m):
            if broken[i]:
                continue
            candidate = powers[i]
            norm = torch.linalg.norm(candidate)
            if norm > 0 and numerical_rank(torch.stack(kept + [candidate / norm], dim=1), rel_tol) > len(kept):
                kept.append(candidate / norm)
                lengths[i] += 1
            else:
                # once A^j b_i depends on earlier columns, so do all higher powers
                broken[i] = True
        powers = [pair.A @ p for p in powers]
    return lengths


def _shift_block(size: int) -> torch.Tensor:
    return torch.diag(torch.ones(size - 1, dtype=torch.float64), 1) if size > 0 else torch.zeros((0, 0))


def brunovsky(pair: LinearPair, rel_tol: float = DEFAULT_TOL) -> BrunovskyResult:
    """(P, K, Q) with P(A - BK)P⁻¹ = Ac and PBQ⁻¹ = Bc in block chain-of-integrators form."""
    rank, controllable = kalman_controllable(pair, rel_tol)
    if not controllable:
        raise NotControllable(f"Controllability matrix has rank {rank} < n = {pair.n}")
    n, m = pair.n, pair.m
    lengths = chain_lengths(pair, rel_tol)
    if sum(lengths) != n:
        raise NumericalFailure(f"Chain selection found {sum(lengths)} independent columns instead of {n}")

    columns = [torch.linalg.matrix_power(pair.A, k) @ pair.B[:, i] for i in range(m) for k in range(lengths[i])]
    chain_matrix = torch.stack(columns, dim=1)
    inverse = torch.linalg.inv(chain_matrix)
    ends = [sum(lengths[: i + 1]) - 1 for i in range(m)]
    # ties keep the original column order
    order = sorted((i for i in range(m) if lengths[i] > 0), key=lambda i: -lengths[i])

    p_rows, g_rows, r_rows = [], [], []
    for i in order:
        q = inverse[ends[i]]
        for k in range(lengths[i]):
            p_rows.append(q @ torch.linalg.matrix_power(pair.A, k))
        g_rows.append(q @ torch.linalg.matrix_power(pair.A, lengths[i] - 1) @ pair.B)
        r_rows.append(q @ torch.linalg.matrix_power(pair.A, lengths[i]))
    P = torch.stack(p_rows)
    G = torch.stack(g_rows)  # [active chains; m]
    R = torch.stack(r_rows)  # [active chains; n]

    # complete G to an invertible Q with an orthonormal basis of its row-space complement
    _, _, vh = torch.linalg.svd(G, full_matrices=True)
    Q = torch.cat([G, vh[len(order):]], dim=0)
    K = torch.linalg.pinv(G) @ R

    kappa = [lengths[i] for i in order] + [0] * (m - len(order))
    Ac = torch.block_diag(*[_shift_block(lengths[i]) for i in order]).to(torch.float64)
    Bc = torch.zeros((n, m), dtype=torch.float64)
    row = -1
    for column, i in enumerate(order):
        row += lengths[i]
        Bc[row, column] = 1.0

    result = BrunovskyResult(P=P, K=K, Q=Q, Ac=Ac, Bc=Bc, kappa=kappa, form="block")
    residual_a, residual_b = result.residual(pair)
    logger.debug(f"Brunovsky residuals: A {residual_a:.2e}, B {residual_b:.2e}, kappa {kappa}")
    return result


def layer_permutation(kappa: List[int]) -> torch.Tensor:
    """Permutation Π mapping block chain coordinates onto layered coordinates.

    Layer j gathers the j-th integrator from the control of every chain of length ≥ j. Layers are
    stacked from the deepest one down to the layer driven by the controls.
    """
    active = [k for k in kappa if k > 0]
    starts = [sum(active[:c]) for c in range(len(active))]
    order: List[int] = []
    for layer in range(max(active, default=0), 0, -1):
        for c, length in enumerate(active):
            if length >= layer:
                order.append(starts[c] + length - layer)
    size = sum(active)
    permutation = torch.zeros((size, size), dtype=torch.float64)
    for position, source in enumerate(order):
        permutation[position, source] = 1.0
    return permutation


def layered_canonical_form(pair: LinearPair, rel_tol: float = DEFAULT_TOL) -> BrunovskyResult:
    """Canonical form built from the blocks J^s_r = (I_s | 0) between consecutive layers."""
    block = brunovsky(pair, rel_tol)
    permutation = layer_permutation(block.kappa)
    return BrunovskyResult(
        P=permutation @ block.P,
        K=block.K,
        Q=block.Q,
        Ac=permutation @ block.Ac @ permutation.T,
        Bc=permutation @ block.Bc,
        kappa=block.kappa,
        form="layered",
    )


def layer_sizes(kappa: List[int]) -> Tuple[int, ...]:
    """Sizes s_1, s_2, ... of the layers, s_k being the number of chains of length ≥ k."""
    return tuple(sum(1 for k in kappa if k >= layer) for layer in range(1, max(kappa, default=0) + 1))
