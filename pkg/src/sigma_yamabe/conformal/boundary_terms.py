"""边界曲率项 B^k、ℬ 与 ℒ₄

B^k 全部经由混合对称函数 σ_{q,r}(A^T, L) 计算(r 为 A^T 的个数)。
k = 2 的闭式只作为交叉验证。
"""

from functools import lru_cache
from math import factorial, prod
from typing import Dict, Optional, Tuple, Union

import numpy as np

from sigma_yamabe.conformal.state import BoundaryGeometry, ScalarField, boundary_geometry
from sigma_yamabe.config import config
from sigma_yamabe.errors import DomainError, UmbilicityError
from sigma_yamabe.geom.boundary import BoundarySlice
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.symfun.functions import matrix_sigmas
from sigma_yamabe.symfun.mixed import mixed_sigma

BoundaryData = Union[BoundaryGeometry, BoundarySlice]
FORMS = ('auto', 'general', 'umbilic')


def double_factorial(m: int) -> int:
    """m!!, 约定 0!! = (−1)!! = 1。"""
    if m < -1:
        raise DomainError(f"双阶乘需要 m >= −1, 得到 {m}")
    return prod(range(m, 0, -2)) if m > 0 else 1


@lru_cache(maxsize=None)
def c1(n: int, k: int, i: int) -> float:
    """C_1(n, k, i) = (2k−i−1)!(n−2k+i)! / ((n−k)!(2k−2i−1)!! i!)。"""
    if not 0 <= i <= k - 1 or n < 2 * k - i:
        raise DomainError(f"C_1 需要 0 <= i < k 且 n >= 2k−i, 得到 n={n}, k={k}, i={i}")
    return (factorial(2 * k - i - 1) * factorial(n - 2 * k + i)
            / (factorial(n - k) * double_factorial(2 * k - 2 * i - 1) * factorial(i)))


@lru_cache(maxsize=None)
def c2(n: int, k: int, i: int) -> float:
    """C_2(n, k, i) = (n−i−1)! / ((n−k)!(2k−2i−1)!!)。"""
    if not 0 <= i <= k - 1 or k > n:
        raise DomainError(f"C_2 需要 0 <= i < k <= n, 得到 n={n}, k={k}, i={i}")
    return factorial(n - i - 1) / (factorial(n - k) * double_factorial(2 * k - 2 * i - 1))


def _dimension(geom: BoundaryData, n: Optional[int]) -> int:
    m = geom.A_T.shape[-1]
    if n is not None and n != m + 1:
        raise DomainError(f"维数 n={n} 与边界数据(切空间维数 {m})不一致")
    return m + 1


def boundary_B2(geom: BoundaryData, n: Optional[int] = None) -> np.ndarray:
    """B²

    n >= 4: (2/(n−2))σ_{2,1}(A^T, L) + (2/((n−2)(n−3)))σ_{3,0}(A^T, L);
    n = 3:  2σ_{2,1}(A^T, L) + h³/3 − h|L|²/2。

    Args:
        geom: 边界数据(BoundaryGeometry 或 BoundarySlice)
        n: 流形维数, 缺省由数据推断

    Returns:
        np.ndarray: 各边界节点上的 B²

    Raises:
        DomainError: n < 3
    """
    n = _dimension(geom, n)
    if n < 3:
        raise DomainError(f"B² 需要 n >= 3, 得到 n={n}")
    s21 = mixed_sigma(geom.A_T, geom.L, 2, 1)
    if n == 3:
        h = geom.h
        L_sq = np.sum(geom.L ** 2, axis=(-2, -1))
        return 2.0 * s21 + h ** 3 / 3.0 - 0.5 * h * L_sq
    s30 = mixed_sigma(geom.A_T, geom.L, 3, 0)
    return 2.0 / (n - 2) * s21 + 2.0 / ((n - 2) * (n - 3)) * s30


def umbilic_closed_B2(A_T: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """脐边界上的 B²: (σ_1(A^T) + c_n μ²)μ, n >= 4 时 c_n = (n−1)/3, n = 3 时 c_n = 2/3。"""
    n = A_T.shape[-1] + 1
    coeff = (n - 1) / 3.0 if n >= 4 else 2.0 / 3.0
    return (np.trace(A_T, axis1=-2, axis2=-1) + coeff * mu ** 2) * mu


def _umbilic_residual(geom: BoundaryData) -> Tuple[float, float]:
    """(max|L − μI|, 允许的容差)。"""
    residual = float(np.max(np.abs(geom.L - geom.mu[..., None, None] * np.eye(geom.L.shape[-1]))))
    tol = config.get('geom.umbilic_tolerance', 1e-6)
    return residual, tol * max(1.0, float(np.max(np.abs(geom.mu), initial=0.0)))


def _require_umbilic(geom: BoundaryData) -> None:
    residual, tol = _umbilic_residual(geom)
    if residual > tol:
        raise UmbilicityError(f"B^k 的脐形式需要全脐边界: 残差 {residual:.3e}", residual=residual)


def _resolve_form(form: str, n: int, k: int, geom: BoundaryData) -> str:
    if form == 'umbilic':
        return form
    if n >= 2 * k:
        return 'general'
    residual, tol = _umbilic_residual(geom)
    if form == 'general' or residual > tol:
        raise DomainError(f"n < 2k 时 B^k 只对全脐边界定义, 得到 n={n}, k={k}")
    return 'umbilic'


def boundary_Bk(geom: BoundaryData, n: Optional[int] = None, k: int = 2,
                form: str = 'auto') -> np.ndarray:
    """B^k

    一般形式(n >= 2k): Σ_{i<k} C_1(n,k,i) σ_{2k−i−1,i}(A^T, L);
    脐形式(L = μI, 任意 n): Σ_{i<k} C_2(n,k,i) σ_i(A^T) μ^{2k−2i−1}。
    k = 2 的一般形式由 boundary_B2 计算; form='auto' 在 n >= 2k 时取一般形式。

    Raises:
        DomainError: k 越界, 或 n < 2k 时要求一般形式
        UmbilicityError: 脐形式用于非脐边界
    """
    n = _dimension(geom, n)
    if not 1 <= k <= n - 1:
        raise DomainError(f"B^k 需要 1 <= k <= n−1, 得到 n={n}, k={k}")
    if form not in FORMS:
        raise DomainError(f"未知的 B^k 形式 {form!r}, 可选 {FORMS}")
    if k == 2 and form != 'umbilic':
        return boundary_B2(geom, n)
    form = _resolve_form(form, n, k, geom)
    if form == 'general':
        total = 0.0
        for i in range(k):
            total = total + c1(n, k, i) * mixed_sigma(geom.A_T, geom.L, 2 * k - i - 1, i)
        return np.asarray(total)
    _require_umbilic(geom)
    sig = matrix_sigmas(geom.A_T)
    mu = geom.mu
    total = 0.0
    for i in range(k):
        total = total + c2(n, k, i) * sig[..., i] * mu ** (2 * k - 2 * i - 1)
    return np.asarray(total)


def umbilic_bracket(A_T: np.ndarray, mu: np.ndarray, k: int) -> np.ndarray:
    """脐形式 B^k = (Σ_i C_2 σ_i(A^T) μ^{2k−2i−2}) μ 中括号内的因子。

    A ∈ Γ_k^+ 时 A^T ∈ Γ_{k−1}^+, 括号恒正, 于是 B^k = 0 当且仅当 μ = 0。
    """
    n = A_T.shape[-1] + 1
    sig = matrix_sigmas(A_T)
    total = 0.0
    for i in range(k):
        total = total + c2(n, k, i) * sig[..., i] * mu ** (2 * k - 2 * i - 2)
    return np.asarray(total)


def _require_curvature(geom: BoundaryData, name: str) -> np.ndarray:
    if geom.n != 4:
        raise DomainError(f"{name} 只在 n = 4 定义, 得到 n={geom.n}")
    if geom.R_ON is None:
        raise DomainError(f"{name} 需要边界标架下的 Riemann 分量")
    return geom.R_ON


def _tangential_ricci(R: np.ndarray) -> np.ndarray:
    """R_{γαγβ} 对切向 γ 求和。"""
    T = R[..., :-1, :-1, :-1, :-1]
    return np.einsum('...cacb->...ab', T)


def boundary_gb4(geom: BoundaryData) -> np.ndarray:
    """四维 Gauss-Bonnet 边界项

    ℬ = ½Rh − R_{nn}h − R_{γαγβ}L^{αβ} + h³/3 − h|L|² + (2/3)tr L³

    Raises:
        DomainError: n ≠ 4 或缺少曲率分量
    """
    R = _require_curvature(geom, 'ℬ')
    L, h = geom.L, geom.h
    scalar = np.einsum('...abab->...', R)
    ric_nn = np.einsum('...aa->...', R[..., :, -1, :, -1])
    RL = np.einsum('...ab,...ab->...', _tangential_ricci(R), L)
    L_sq = np.sum(L ** 2, axis=(-2, -1))
    L_cube = np.trace(L @ L @ L, axis1=-2, axis2=-1)
    return (0.5 * scalar * h - ric_nn * h - RL + h ** 3 / 3.0 - h * L_sq
            + 2.0 / 3.0 * L_cube)


def l4_invariant(geom: BoundaryData) -> np.ndarray:
    """ℒ₄ = −2σ_1(A^T)h − 2(n−3)A_{αβ}L^{αβ} + 2R_{γαγβ}L^{αβ}, n = 4。"""
    R = _require_curvature(geom, 'ℒ₄')
    n = geom.n
    L, h = geom.L, geom.h
    trace_AT = np.trace(geom.A_T, axis1=-2, axis2=-1)
    AL = np.einsum('...ab,...ab->...', geom.A_T, L)
    RL = np.einsum('...ab,...ab->...', _tangential_ricci(R), L)
    return -2.0 * trace_AT * h - 2.0 * (n - 3) * AL + 2.0 * RL


def b2_decomposition_residual(geom: BoundaryData) -> np.ndarray:
    """|B² − (½ℬ + ¼ℒ₄)| 逐点。"""
    return np.abs(boundary_B2(geom) - (0.5 * boundary_gb4(geom) + 0.25 * l4_invariant(geom)))


def l4_weight_check(chart: Chart, u: ScalarField, points: Optional[np.ndarray] = None,
                    seed: int = 0) -> Dict[str, float]:
    """ℒ₄(ĝ) = e^{3u}ℒ₄(g) 逐点比较

    Returns:
        Dict[str, float]: residual(最大偏差)与 scale(max|ℒ₄(g)|)
    """
    if points is None:
        points = chart.boundary_probe_points(int(config.get('geom.probe_points', 64)), seed)
    base = boundary_geometry(chart, points, with_curvature=True)
    hat = boundary_geometry(chart, points, u, with_curvature=True)
    l4 = l4_invariant(base)
    l4_hat = l4_invariant(hat)
    return {'residual': float(np.max(np.abs(l4_hat - np.exp(3.0 * u(points)) * l4))),
            'scale': float(np.max(np.abs(l4)))}
