"""广义Kronecker符号展开(测试基准)

σ_q(A) = (1/q!) Σ δ^{i_1..i_q}_{j_1..j_q} A^{j_1}_{i_1} ⋯ A^{j_q}_{i_q}

上指标对应矩阵的行: A^{j}_{i} = A[j, i]。这些函数的代价随 m! 增长,
只用于 m <= 6 的交叉验证。
"""

from functools import lru_cache
from itertools import combinations, permutations
from math import factorial
from typing import Sequence, Tuple

import numpy as np

from sigma_yamabe.errors import DomainError

MAX_ORACLE_DIM = 6


@lru_cache(maxsize=None)
def _signed_permutations(q: int) -> Tuple[np.ndarray, np.ndarray]:
    perms = np.array(list(permutations(range(q))), dtype=int).reshape(-1, q)
    signs = np.empty(len(perms))
    for idx, perm in enumerate(perms):
        inversions = sum(1 for a in range(q) for b in range(a + 1, q) if perm[a] > perm[b])
        signs[idx] = -1.0 if inversions % 2 else 1.0
    return perms, signs


def _validate(mats: Sequence[np.ndarray]) -> int:
    shape = mats[0].shape
    if len(shape) < 2 or shape[-1] != shape[-2]:
        raise DomainError(f"需要方阵, 得到形状 {shape}")
    for M in mats[1:]:
        if M.shape != shape:
            raise DomainError(f"矩阵形状不一致: {shape} vs {M.shape}")
    m = shape[-1]
    if m > MAX_ORACLE_DIM:
        raise DomainError(f"Kronecker 展开仅支持 m <= {MAX_ORACLE_DIM}, 得到 m={m}")
    return m


def sigma_k_kronecker(W: np.ndarray, q: int) -> np.ndarray:
    """单矩阵 σ_q 的 Kronecker 展开, 支持形状 (..., m, m) 的批量。"""
    W = np.asarray(W, dtype=float)
    m = _validate([W])
    if q < 0 or q > m:
        raise DomainError(f"q={q} 超出范围 [0, {m}]")
    batch = W.shape[:-2]
    if q == 0:
        return np.ones(batch)
    subsets = np.array(list(combinations(range(m), q)), dtype=int)
    perms, signs = _signed_permutations(q)
    total = np.zeros(batch)
    # 每个子集的所有排序贡献相同, 与 1/q! 相消
    for perm, sign in zip(perms, signs):
        prod = np.ones(batch + (len(subsets),))
        for s in range(q):
            prod = prod * W[..., subsets[:, perm[s]], subsets[:, s]]
        total = total + sign * prod.sum(axis=-1)
    return total


def _slots(A: np.ndarray, B: np.ndarray, q: int, r: int) -> list:
    return [A] * r + [B] * (q - r)


def mixed_sigma_kronecker(A: np.ndarray, B: np.ndarray, q: int, r: int) -> np.ndarray:
    """σ_{q,r}(A, B): r 个 A 与 q−r 个 B 的 Kronecker 展开。"""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    m = _validate([A, B])
    if not 0 <= r <= q <= m:
        raise DomainError(f"需要 0 <= r <= q <= m, 得到 q={q}, r={r}, m={m}")
    batch = A.shape[:-2]
    if q == 0:
        return np.ones(batch)
    mats = _slots(A, B, q, r)
    tops = np.array(list(permutations(range(m), q)), dtype=int)
    perms, signs = _signed_permutations(q)
    total = np.zeros(batch)
    for perm, sign in zip(perms, signs):
        prod = np.ones(batch + (len(tops),))
        for s in range(q):
            prod = prod * mats[s][..., tops[:, perm[s]], tops[:, s]]
        total = total + sign * prod.sum(axis=-1)
    return total / factorial(q)


def mixed_newton_kronecker(A: np.ndarray, B: np.ndarray, q: int, r: int) -> np.ndarray:
    """T_{q,r}(A, B)^i_j = (1/q!) Σ δ^{i i_1..i_q}_{j j_1..j_q} A^{j_1}_{i_1} ⋯ B^{j_q}_{i_q}

    只支持单个矩阵对(无批量维)。返回矩阵的 [i, j] 元为 T^i_j。
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    m = _validate([A, B])
    if A.ndim != 2:
        raise DomainError("mixed_newton_kronecker 不支持批量输入")
    if not 0 <= r <= q < m + 1:
        raise DomainError(f"需要 0 <= r <= q <= m, 得到 q={q}, r={r}, m={m}")
    result = np.zeros((m, m))
    if q == m:
        # q+1 个互异指标不存在
        return result
    mats = _slots(A, B, q, r)
    tops = np.array(list(permutations(range(m), q + 1)), dtype=int)
    perms, signs = _signed_permutations(q + 1)
    for perm, sign in zip(perms, signs):
        bottoms = tops[:, perm]
        prod = np.full(len(tops), sign)
        for s in range(1, q + 1):
            prod = prod * mats[s - 1][bottoms[:, s], tops[:, s]]
        np.add.at(result, (tops[:, 0], bottoms[:, 0]), prod)
    return result / factorial(q)


def newton_tensor_kronecker(W: np.ndarray, q: int) -> np.ndarray:
    """T_q(W) 的 Kronecker 展开, 即 T_{q,q}(W, ·)。"""
    W = np.asarray(W, dtype=float)
    return mixed_newton_kronecker(W, W, q, q)


@lru_cache(maxsize=None)
def levi_civita(n: int) -> np.ndarray:
    """n 阶 Levi-Civita 符号 ε_{i_1..i_n}, 形状 (n,)*n。"""
    if n > MAX_ORACLE_DIM:
        raise DomainError(f"Levi-Civita 张量仅支持 n <= {MAX_ORACLE_DIM}, 得到 n={n}")
    eps = np.zeros((n,) * n)
    perms, signs = _signed_permutations(n)
    for perm, sign in zip(perms, signs):
        eps[tuple(perm)] = sign
    eps.setflags(write=False)
    return eps
