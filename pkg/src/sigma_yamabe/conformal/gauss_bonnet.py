"""Gauss-Bonnet 被积函数与 Euler 示性数

局部共形平坦时 R = A ⊙ g。内部密度 E_n 与边界密度 Q_{i,n} 各有两条路径:
Levi-Civita 缩并与对称函数闭式, 两者应在舍入误差内一致。
    E_n = (2^{n/2}(n/2)!)^{−1} Σ εε R⋯R = 2^{n/2}(n/2)! σ_{n/2}(A)
    Q_{i,n} = 2^{n/2−2i}/(i!(n−1−2i)!!) Σ εε R^T⋯R^T L⋯L
            = 2^{n/2}(n−1−i)!/(n−1−2i)!! σ_{n−1−i,i}(A^T, L)
"""

from dataclasses import dataclass
from math import factorial, pi
from typing import Dict, Optional

import numpy as np
import pandas as pd

from sigma_yamabe.conformal.boundary_terms import boundary_gb4, double_factorial
from sigma_yamabe.conformal.quadrature import (
    QuadratureOrders,
    area_density,
    chart_rules,
    volume_density,
)
from sigma_yamabe.conformal.state import boundary_geometry
from sigma_yamabe.config import config
from sigma_yamabe.errors import DomainError, UnsupportedChartError
from sigma_yamabe.geom.boundary import BoundarySlice
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.geom.curvature import (
    CurvaturePack,
    kulkarni_nomizu,
    schouten_function,
    to_frame2,
    to_frame4,
    weyl_at,
)
from sigma_yamabe.symfun.functions import matrix_sigmas
from sigma_yamabe.symfun.kronecker import levi_civita
from sigma_yamabe.symfun.mixed import mixed_sigma
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

_LETTERS = 'abcdefghijklmopqrstuvwxyzABCDEFGHIJKLMOPQRSTUVWXYZ'


def _check_even(n: int) -> None:
    if n % 2 or n < 2:
        raise DomainError(f"Gauss-Bonnet 被积函数需要偶数维, 得到 n={n}")


def epsilon_contraction(factors) -> np.ndarray:
    """Σ ε_{i_1..i_m} ε_{j_1..j_m} Π factors

    每个因子为 (二阶, (N, m, m)) 或 (四阶, (N, m, m, m, m)), 二阶因子占用
    一对 (i, j), 四阶因子 R_{i i' j j'} 占用两对。
    """
    factors = list(factors)
    m = factors[0].shape[-1]
    eps = levi_civita(m)
    top = _LETTERS[:m]
    bottom = _LETTERS[m:2 * m]
    terms = []
    pos = 0
    for T in factors:
        if T.ndim == 5:
            terms.append('N' + top[pos:pos + 2] + bottom[pos:pos + 2])
            pos += 2
        else:
            terms.append('N' + top[pos] + bottom[pos])
            pos += 1
    if pos != m:
        raise DomainError(f"因子占用 {pos} 个指标, 需要 {m}")
    expr = ','.join([top, bottom] + terms) + '->N'
    return np.einsum(expr, eps, eps, *factors, optimize=True)


def pfaffian_density(R: np.ndarray) -> np.ndarray:
    """E_n 的 Levi-Civita 路径, R 为正交标架分量, 形状 (N, n, n, n, n)。"""
    n = R.shape[-1]
    _check_even(n)
    half = n // 2
    return epsilon_contraction([R] * half) / (2 ** half * factorial(half))


def sigma_density(A_ON: np.ndarray) -> np.ndarray:
    """E_n = 2^{n/2}(n/2)! σ_{n/2}(A)。"""
    n = A_ON.shape[-1]
    _check_even(n)
    half = n // 2
    return 2 ** half * factorial(half) * matrix_sigmas(A_ON)[..., half]


def q_density_sum(A_T: np.ndarray, L: np.ndarray, i: int) -> np.ndarray:
    """Q_{i,n} 的 Levi-Civita 路径。"""
    m = A_T.shape[-1]
    n = m + 1
    _check_even(n)
    if not 0 <= i <= n // 2 - 1:
        raise DomainError(f"Q_{{i,n}} 需要 0 <= i < n/2, 得到 i={i}, n={n}")
    R_T = kulkarni_nomizu(A_T, np.eye(m))
    factors = [R_T] * i + [L] * (m - 2 * i)
    coeff = 2.0 ** (n // 2 - 2 * i) / (factorial(i) * double_factorial(m - 2 * i))
    return coeff * epsilon_contraction(factors)


def q_density_closed(A_T: np.ndarray, L: np.ndarray, i: int) -> np.ndarray:
    """Q_{i,n} = 2^{n/2}(n−1−i)!/(n−1−2i)!! σ_{n−1−i,i}(A^T, L)。"""
    m = A_T.shape[-1]
    n = m + 1
    _check_even(n)
    coeff = 2.0 ** (n // 2) * factorial(m - i) / double_factorial(m - 2 * i)
    return coeff * mixed_sigma(A_T, L, m - i, i)


def _lcf_residual(pack: CurvaturePack) -> Dict[str, float]:
    E = pack.frame()
    W = np.max(np.abs(to_frame4(pack.weyl, E)))
    R = np.max(np.abs(to_frame4(pack.riemann, E)))
    return {'weyl': float(W), 'riemann': float(R)}


@dataclass(frozen=True)
class GaussBonnetIntegrands:
    """两条路径的 Gauss-Bonnet 被积函数

    Attributes:
        n: 维数
        E_pfaffian: 内部节点上的 Levi-Civita 路径 E_n
        E_sigma: 内部节点上的 σ 路径 E_n
        Q_sum: 边界节点上的 Q_{i,n}, 形状 (M, n/2)
        Q_closed: 同上, 闭式路径
        weyl_max: 正交标架下 max|𝒲|
    """

    n: int
    E_pfaffian: np.ndarray
    E_sigma: np.ndarray
    Q_sum: Optional[np.ndarray]
    Q_closed: Optional[np.ndarray]
    weyl_max: float

    @property
    def interior_discrepancy(self) -> float:
        return float(np.max(np.abs(self.E_pfaffian - self.E_sigma), initial=0.0))

    @property
    def boundary_discrepancy(self) -> float:
        if self.Q_sum is None:
            return 0.0
        return float(np.max(np.abs(self.Q_sum - self.Q_closed), initial=0.0))

    def to_frame(self) -> pd.DataFrame:
        rows = [{'density': 'E', 'i': -1, 'pfaffian_max': float(np.max(np.abs(self.E_pfaffian))),
                 'sigma_max': float(np.max(np.abs(self.E_sigma))),
                 'discrepancy': self.interior_discrepancy}]
        if self.Q_sum is not None:
            for i in range(self.Q_sum.shape[-1]):
                rows.append({'density': 'Q', 'i': i,
                             'pfaffian_max': float(np.max(np.abs(self.Q_sum[:, i]))),
                             'sigma_max': float(np.max(np.abs(self.Q_closed[:, i]))),
                             'discrepancy': float(np.max(np.abs(self.Q_sum[:, i]
                                                                - self.Q_closed[:, i])))})
        return pd.DataFrame(rows)


def gauss_bonnet_integrands(pack: CurvaturePack,
                            slc: Optional[BoundarySlice] = None) -> GaussBonnetIntegrands:
    """计算 E_n 与 Q_{i,n} 的两条路径

    Args:
        pack: 内部节点上的曲率包
        slc: 边界切片, 缺省时不计算 Q

    Raises:
        DomainError: n 为奇数或 n > 6
        UnsupportedChartError: 𝒲 超出阈值(图册不是局部共形平坦的)
    """
    n = pack.n
    _check_even(n)
    A_ON = to_frame2(pack.schouten, pack.frame())
    sizes = _lcf_residual(pack)
    threshold = config.get('geom.weyl_threshold', 1e-2)
    if sizes['weyl'] > threshold * max(1.0, sizes['riemann']):
        raise UnsupportedChartError(
            f"图册不是局部共形平坦的: max|𝒲|={sizes['weyl']:.3e}")
    R = kulkarni_nomizu(A_ON, np.eye(n))
    E_pf = pfaffian_density(R)
    E_sig = sigma_density(A_ON)
    Q_sum = Q_closed = None
    if slc is not None:
        half = n // 2
        Q_sum = np.stack([q_density_sum(slc.A_T, slc.L, i) for i in range(half)], axis=-1)
        Q_closed = np.stack([q_density_closed(slc.A_T, slc.L, i) for i in range(half)], axis=-1)
    result = GaussBonnetIntegrands(n=n, E_pfaffian=E_pf, E_sigma=E_sig, Q_sum=Q_sum,
                                   Q_closed=Q_closed, weyl_max=sizes['weyl'])
    logger.debug(f"Gauss-Bonnet 被积函数 n={n}: 内部差异 {result.interior_discrepancy:.3e}, "
                 f"边界差异 {result.boundary_discrepancy:.3e}")
    return result


def euler_characteristic(value: float, n: int) -> float:
    """由 F_{n/2} 读出 χ = F_{n/2}(n/2)!/(2π)^{n/2}。"""
    _check_even(n)
    half = n // 2
    return value * factorial(half) / (2.0 * pi) ** half


def gauss_bonnet_four(chart: Chart, orders: Optional[QuadratureOrders] = None
                      ) -> Dict[str, float]:
    """四维 Gauss-Bonnet 组装 32π²χ = ∫|𝒲|² + 16(∫σ_2 + ½∮ℬ)

    Returns:
        Dict[str, float]: weyl、sigma2、boundary(∮ℬ)、chi 与图册给定的 chi_expected
    """
    if chart.n != 4:
        raise DomainError(f"四维 Gauss-Bonnet 组装需要 n = 4, 得到 n={chart.n}")
    volume, boundary = chart_rules(chart, orders)
    schouten = schouten_function(chart)

    def weyl_sq(x):
        g, W = weyl_at(chart, x)
        g_inv = np.linalg.inv(g)
        norm = np.einsum('nabcd,naA,nbB,ncC,ndD,nABCD->n', W, g_inv, g_inv, g_inv, g_inv, W,
                         optimize=True)
        return norm * volume_density(chart, x)

    def sigma2(x):
        g_inv = np.linalg.inv(chart.metric(x))
        return matrix_sigmas(g_inv @ schouten(x))[:, 2] * volume_density(chart, x)

    def gb_term(x):
        geom = boundary_geometry(chart, x, with_curvature=True)
        return boundary_gb4(geom) * area_density(chart, x)

    weyl = volume.integrate(weyl_sq)
    s2 = volume.integrate(sigma2)
    gb = boundary.integrate(gb_term)
    chi = (weyl + 16.0 * (s2 + 0.5 * gb)) / (32.0 * pi ** 2)
    logger.info(f"Gauss-Bonnet(n=4) {chart.name or chart.kind}: χ={chi:.6f}")
    return {'weyl': weyl, 'sigma2': s2, 'boundary': gb, 'chi': chi,
            'chi_expected': chart.euler_characteristic}
