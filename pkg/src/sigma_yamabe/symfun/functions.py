"""初等对称函数与Newton张量

σ_k 的两条计算路径:
  * 谱路径: 逐个乘入 (1 + λ_i t) 的系数递推(Vieta);
  * 矩阵路径: Faddeev-LeVerrier 递推, 同时给出 Newton 张量
    T_q = σ_q I − T_{q−1} W.

所有函数在最后一维(或最后两维)上支持批量计算。
"""

from typing import Tuple, Union

import numpy as np

from sigma_yamabe.errors import DomainError
from sigma_yamabe.models.tensors import Spectrum, SymTensor

ArrayLike = Union[np.ndarray, Spectrum, SymTensor, list, tuple]


def _check_order(order: int, n: int, name: str = 'k') -> None:
    if not isinstance(order, (int, np.integer)):
        raise DomainError(f"{name} 必须为整数, 得到 {order!r}")
    if order < 0 or order > n:
        raise DomainError(f"{name}={order} 超出范围 [0, {n}]")


def spectrum_sigmas(values: np.ndarray) -> np.ndarray:
    """谱的全部初等对称函数

    Args:
        values: 形状 (..., n) 的特征值数组

    Returns:
        np.ndarray: 形状 (..., n+1), 第 j 项为 σ_j, σ_0 = 1
    """
    values = np.asarray(values)
    n = values.shape[-1]
    sig = np.zeros(values.shape[:-1] + (n + 1,), dtype=np.result_type(values, float))
    sig[..., 0] = 1.0
    for i in range(n):
        sig[..., 1:] = sig[..., 1:] + values[..., i:i + 1] * sig[..., :-1]
    return sig


def faddeev_leverrier(W: np.ndarray, order: int = None) -> Tuple[np.ndarray, np.ndarray]:
    """Faddeev-LeVerrier 递推

    T_0 = I, σ_q = tr(T_{q−1} W)/q, T_q = σ_q I − T_{q−1} W。
    对复矩阵同样成立(混合函数的极化计算依赖这一点)。

    Args:
        W: 形状 (..., m, m) 的矩阵
        order: 递推到的最高阶, 默认 m

    Returns:
        Tuple[np.ndarray, np.ndarray]: σ 形状 (..., order+1), T 形状 (..., order+1, m, m)
    """
    W = np.asarray(W)
    if W.ndim < 2 or W.shape[-1] != W.shape[-2]:
        raise DomainError(f"需要方阵, 得到形状 {W.shape}")
    m = W.shape[-1]
    order = m if order is None else order
    _check_order(order, m, 'order')
    dtype = np.result_type(W, float)
    batch = W.shape[:-2]
    eye = np.broadcast_to(np.eye(m, dtype=dtype), batch + (m, m))
    sig = np.zeros(batch + (order + 1,), dtype=dtype)
    T = np.zeros(batch + (order + 1, m, m), dtype=dtype)
    sig[..., 0] = 1.0
    T[..., 0, :, :] = eye
    for q in range(1, order + 1):
        P = T[..., q - 1, :, :] @ W
        sig[..., q] = np.trace(P, axis1=-2, axis2=-1) / q
        T[..., q, :, :] = sig[..., q, None, None] * eye - P
    return sig, T


def matrix_sigmas(W: np.ndarray) -> np.ndarray:
    """矩阵 W 的全部 σ_q, 形状 (..., m+1)。"""
    sig, _ = faddeev_leverrier(W)
    return sig


def _as_array(W: ArrayLike) -> Tuple[np.ndarray, bool]:
    """返回 (数组, 是否为谱)。"""
    if isinstance(W, Spectrum):
        return W.values, True
    if isinstance(W, SymTensor):
        return W.entries, False
    arr = np.asarray(W, dtype=float)
    if arr.ndim == 1:
        return arr, True
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return arr, False
    raise DomainError(f"无法解释为谱或方阵: 形状 {arr.shape}")


def sigma_k(W: ArrayLike, k: int) -> float:
    """第 k 个初等对称函数

    Args:
        W: Spectrum / 一维数组(特征值), 或 SymTensor / 方阵
        k: 阶数, 0 <= k <= n

    Returns:
        float: σ_k(W)

    Raises:
        DomainError: k 超出范围
    """
    arr, is_spectrum = _as_array(W)
    n = arr.shape[0]
    _check_order(k, n)
    if is_spectrum:
        return float(spectrum_sigmas(arr)[k])
    sig, _ = faddeev_leverrier(arr, order=k)
    return float(sig[k])


def newton_tensor(W: Union[SymTensor, np.ndarray], q: int) -> Union[SymTensor, np.ndarray]:
    """Newton 张量 T_q(W) = σ_q I − σ_{q−1} W + ... + (−1)^q W^q

    Args:
        W: SymTensor 或形状 (..., m, m) 的数组
        q: 阶数, 0 <= q <= m

    Returns:
        输入为 SymTensor 时返回 SymTensor, 否则返回数组
    """
    if isinstance(W, SymTensor):
        _, T = faddeev_leverrier(W.entries, order=_checked(q, W.n))
        return SymTensor(T[q])
    W = np.asarray(W, dtype=float)
    if W.ndim < 2 or W.shape[-1] != W.shape[-2]:
        raise DomainError(f"需要方阵, 得到形状 {W.shape}")
    _, T = faddeev_leverrier(W, order=_checked(q, W.shape[-1]))
    return T[..., q, :, :]


def _checked(q: int, m: int) -> int:
    _check_order(q, m, 'q')
    return q


def sigma_derivative(W: np.ndarray, q: int) -> np.ndarray:
    """矩阵导数 D_ij = ∂σ_q/∂W_ij = (T_{q−1})_ji; q = 0 时为零矩阵。"""
    W = np.asarray(W, dtype=float)
    m = W.shape[-1]
    _check_order(q, m, 'q')
    if q == 0:
        return np.zeros_like(W)
    _, T = faddeev_leverrier(W, order=q - 1)
    return np.swapaxes(T[..., q - 1, :, :], -1, -2)


def sigma_and_gradient(values: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """σ_k(λ) 及其梯度 ∂σ_k/∂λ_i = σ_{k−1}(λ|i)

    Args:
        values: 形状 (..., n)
        k: 阶数

    Returns:
        Tuple[np.ndarray, np.ndarray]: σ_k 形状 (...,), 梯度形状 (..., n)
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    _check_order(k, n)
    sigma = spectrum_sigmas(values)[..., k]
    grad = np.zeros_like(values)
    if k >= 1:
        for i in range(n):
            grad[..., i] = spectrum_sigmas(np.delete(values, i, axis=-1))[..., k - 1]
    return sigma, grad


def sigma_hessian(values: np.ndarray, k: int) -> np.ndarray:
    """σ_k(λ) 的 Hessian: 非对角元 σ_{k−2}(λ|ij), 对角元为零。"""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    _check_order(k, n)
    hess = np.zeros(values.shape + (n,))
    if k < 2:
        return hess
    for i in range(n):
        for j in range(i + 1, n):
            rest = np.delete(values, [i, j], axis=-1)
            hess[..., i, j] = hess[..., j, i] = spectrum_sigmas(rest)[..., k - 2]
    return hess
