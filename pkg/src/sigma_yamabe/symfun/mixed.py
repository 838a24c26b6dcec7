"""混合对称函数与混合Newton张量

由多重线性展开
    σ_q(A + tB) = Σ_r C(q, r) t^{q−r} σ_{q,r}(A, B),
    T_q(A + tB) = Σ_r C(q, r) t^{q−r} T_{q,r}(A, B),
在复圆周 t_l = ρ ω^l (l = 0..q) 上取值, 由离散Fourier变换读出各系数。
ρ = ‖A‖/‖B‖ 使各项量级相当。
"""

from typing import Tuple

import numpy as np
from scipy.special import comb

from sigma_yamabe.errors import DomainError
from sigma_yamabe.models.tensors import SymTensor
from sigma_yamabe.symfun.functions import faddeev_leverrier


def _prepare(A, B, q: int) -> Tuple[np.ndarray, np.ndarray, int]:
    A = A.entries if isinstance(A, SymTensor) else np.asarray(A, dtype=float)
    B = B.entries if isinstance(B, SymTensor) else np.asarray(B, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise DomainError(f"需要方阵, 得到形状 {A.shape}")
    if A.shape != B.shape:
        raise DomainError(f"A 与 B 维数不一致: {A.shape} vs {B.shape}")
    m = A.shape[-1]
    if not 0 <= q <= m:
        raise DomainError(f"q={q} 超出范围 [0, {m}]")
    return A, B, m


def _polarize(A: np.ndarray, B: np.ndarray, q: int, newton: bool) -> np.ndarray:
    """返回沿 r = 0..q 排列的系数, σ 形状 (..., q+1), T 形状 (..., q+1, m, m)。"""
    nA = np.linalg.norm(A, axis=(-2, -1))
    nB = np.linalg.norm(B, axis=(-2, -1))
    rho = np.where((nA > 0) & (nB > 0), nA / np.where(nB > 0, nB, 1.0), 1.0)
    rho = np.clip(rho, 1e-6, 1e6)
    N = q + 1
    omega = np.exp(2j * np.pi * np.arange(N) / N)
    t = rho[..., None] * omega
    M = A[..., None, :, :] + t[..., :, None, None] * B[..., None, :, :]
    sig, T = faddeev_leverrier(M, order=q)
    powers = rho[..., None] ** np.arange(N)
    binoms = comb(q, np.arange(N))
    if newton:
        values = T[..., q, :, :]
        coeff = np.fft.fft(values, axis=-3) / N
        coeff = coeff / powers[..., :, None, None]
        # 系数下标 j = q − r
        out = coeff[..., ::-1, :, :].real / binoms[:, None, None]
    else:
        values = sig[..., q]
        coeff = np.fft.fft(values, axis=-1) / N / powers
        out = coeff[..., ::-1].real / binoms
    return out


def mixed_sigmas(A, B, q: int) -> np.ndarray:
    """全部 σ_{q,r}(A, B), r = 0..q

    Args:
        A: 形状 (..., m, m)
        B: 与 A 同形状
        q: 阶数

    Returns:
        np.ndarray: 形状 (..., q+1)
    """
    A, B, _ = _prepare(A, B, q)
    return _polarize(A, B, q, newton=False)


def mixed_sigma(A, B, q: int, r: int) -> float:
    """混合对称函数 σ_{q,r}(A, B): r 个 A 槽位, q−r 个 B 槽位

    Args:
        A: SymTensor 或方阵
        B: 与 A 同维
        q: 总阶数
        r: A 的个数, 0 <= r <= q

    Returns:
        σ_{q,r}(A, B); 批量输入时返回数组

    Raises:
        DomainError: 维数不一致或阶数越界
    """
    A, B, m = _prepare(A, B, q)
    if not 0 <= r <= q:
        raise DomainError(f"需要 0 <= r <= q, 得到 q={q}, r={r}")
    value = _polarize(A, B, q, newton=False)[..., r]
    return float(value) if np.ndim(value) == 0 else value


def mixed_newtons(A, B, q: int) -> np.ndarray:
    """全部 T_{q,r}(A, B), 形状 (..., q+1, m, m)。"""
    A, B, _ = _prepare(A, B, q)
    return _polarize(A, B, q, newton=True)


def mixed_newton(A, B, q: int, r: int):
    """混合Newton张量 T_{q,r}(A, B); T_{q,q}(A, B) = T_q(A)。

    输入为 SymTensor 时返回 SymTensor(当 A, B 对称时 T_{q,r} 对称)。
    """
    wrap = isinstance(A, SymTensor) and isinstance(B, SymTensor)
    A, B, m = _prepare(A, B, q)
    if not 0 <= r <= q:
        raise DomainError(f"需要 0 <= r <= q, 得到 q={q}, r={r}")
    value = _polarize(A, B, q, newton=True)[..., r, :, :]
    return SymTensor(value) if wrap else value
