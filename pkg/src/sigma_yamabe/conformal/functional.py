"""泛函 F_k(ĝ) = ∫σ_k(Â)dV_ĝ + ∮B^k(ĝ)dS_ĝ 的求积

内部被积函数 e^{(2k−n)u}σ_k(g^{−1}Â)√det g, 边界被积函数
B^k(ĝ)e^{−(n−1)u} 乘边界面积密度。误差估计取粗一级(图册分辨率减半、
求积阶数降低)的同一计算与之比较。
"""

from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from sigma_yamabe.conformal.boundary_terms import boundary_Bk, l4_invariant
from sigma_yamabe.conformal.quadrature import (
    QuadratureOrders,
    area_density,
    chart_rules,
    volume_density,
)
from sigma_yamabe.conformal.state import (
    BoundaryGeometry,
    ConformalState,
    ScalarField,
    boundary_geometry,
    zero_field,
)
from sigma_yamabe.config import config
from sigma_yamabe.errors import DomainError
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.geom.curvature import conformal_schouten_at
from sigma_yamabe.symfun.functions import matrix_sigmas
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

BoundaryInvariant = Callable[[BoundaryGeometry], np.ndarray]


@dataclass(frozen=True)
class FunctionalValue:
    """F_k 的求积结果

    Attributes:
        k: 阶数
        n: 维数
        interior: ∫σ_k dV
        boundary: ∮B^k dS
        total: interior + boundary
        error: 与粗一级计算之差的绝对值(未估计时为 NaN)
        volume: ĝ 下的体积
        l4_term: 计入的 ¼∮ℒ₄(未计入时为 0)
    """

    k: int
    n: int
    interior: float
    boundary: float
    total: float
    error: float
    volume: float
    l4_term: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def sigma_k_hat(chart: Chart, u: ScalarField, x: np.ndarray, k: int) -> np.ndarray:
    """σ_k(ĝ^{−1}Â) 在任意点上的值。"""
    A_hat = conformal_schouten_at(chart, u, x)
    g_inv = np.linalg.inv(chart.metric(x))
    return np.exp(2.0 * k * u(x)) * matrix_sigmas(g_inv @ A_hat)[:, k]


def _integrals(chart: Chart, u: ScalarField, k: int, orders: Optional[QuadratureOrders],
               form: str, with_l4: bool) -> Dict[str, float]:
    n = chart.n
    volume_rule, boundary_rule = chart_rules(chart, orders)

    def interior(x):
        A_hat = conformal_schouten_at(chart, u, x)
        g_inv = np.linalg.inv(chart.metric(x))
        weight = np.exp((2 * k - n) * u(x)) * volume_density(chart, x)
        return matrix_sigmas(g_inv @ A_hat)[:, k] * weight

    def volume(x):
        return np.exp(-n * u(x)) * volume_density(chart, x)

    def boundary(x):
        geom = boundary_geometry(chart, x, u)
        return boundary_Bk(geom, n, k, form) * np.exp(-(n - 1) * u(x)) * area_density(chart, x)

    def l4(x):
        geom = boundary_geometry(chart, x, u, with_curvature=True)
        return l4_invariant(geom) * np.exp(-(n - 1) * u(x)) * area_density(chart, x)

    return {'interior': volume_rule.integrate(interior),
            'boundary': boundary_rule.integrate(boundary),
            'volume': volume_rule.integrate(volume),
            'l4_term': 0.25 * boundary_rule.integrate(l4) if with_l4 else 0.0}


def evaluate_functional(chart: Chart, u: Optional[ScalarField] = None, k: int = 2,
                        orders: Optional[QuadratureOrders] = None, form: str = 'auto',
                        estimate_error: bool = True, with_l4: bool = False) -> FunctionalValue:
    """在图册上对 ĝ = e^{−2u}g 求 F_k

    Args:
        chart: 图册
        u: 共形因子, 缺省为 0
        k: 阶数, 1 <= k <= n−1
        orders: 求积阶数, 缺省读取配置
        form: B^k 的形式, 见 boundary_Bk
        estimate_error: 是否做粗一级比较
        with_l4: 是否计入 ¼∮ℒ₄(仅 n = 4, k = 2)

    Returns:
        FunctionalValue: 求积结果
    """
    n = chart.n
    if not 1 <= k <= n - 1:
        raise DomainError(f"F_k 需要 1 <= k <= n−1, 得到 n={n}, k={k}")
    if with_l4 and (n, k) != (4, 2):
        raise DomainError("ℒ₄ 修正只在 n = 4, k = 2 时定义")
    u = u or zero_field
    orders = orders or QuadratureOrders.default()
    fine = _integrals(chart, u, k, orders, form, with_l4)
    total = fine['interior'] + fine['boundary'] + fine['l4_term']
    error = float('nan')
    if estimate_error:
        coarse_chart = chart.with_resolution((chart.resolution + 1) // 2)
        coarse = _integrals(coarse_chart, u, k, orders.coarse(), form, with_l4)
        error = abs(total - (coarse['interior'] + coarse['boundary'] + coarse['l4_term']))
        tolerance = config.get('conformal.accuracy_tolerance', 1e-3)
        if error > tolerance * max(1.0, abs(total)):
            logger.warning(f"F_{k} 求积误差估计 {error:.3e} 超过容差 "
                           f"{tolerance:.1e}(总值 {total:.6g})")
    value = FunctionalValue(k=k, n=n, interior=fine['interior'], boundary=fine['boundary'],
                            total=total, error=error, volume=fine['volume'],
                            l4_term=fine['l4_term'])
    logger.debug(f"F_{k}({chart.name or chart.kind}) = {total:.10g} ± {error:.2e}")
    return value


def functional_Fk(state: ConformalState, k: int, orders: Optional[QuadratureOrders] = None,
                  form: str = 'auto', estimate_error: bool = True,
                  with_l4: bool = False) -> FunctionalValue:
    """共形状态 state 的 F_k, 参数同 evaluate_functional。"""
    return evaluate_functional(state.chart, state.u, k, orders, form, estimate_error, with_l4)


def conformal_volume(chart: Chart, u: Optional[ScalarField] = None,
                     orders: Optional[QuadratureOrders] = None) -> float:
    """V(ĝ) = ∫e^{−nu}dV_g。"""
    u = u or zero_field
    volume_rule, _ = chart_rules(chart, orders)
    return volume_rule.integrate(lambda x: np.exp(-chart.n * u(x)) * volume_density(chart, x))


def integrate_boundary_invariant(chart: Chart, invariant: BoundaryInvariant,
                                 u: Optional[ScalarField] = None,
                                 orders: Optional[QuadratureOrders] = None,
                                 weight: Optional[ScalarField] = None,
                                 with_curvature: bool = False) -> float:
    """∮𝓛(ĝ) ψ dS_ĝ, 𝓛 为边界数据上的逐点不变量, ψ 缺省为 1。"""
    u = u or zero_field
    n = chart.n
    _, boundary_rule = chart_rules(chart, orders)

    def integrand(x):
        geom = boundary_geometry(chart, x, u, with_curvature=with_curvature)
        value = invariant(geom) * np.exp(-(n - 1) * u(x)) * area_density(chart, x)
        return value * weight(x) if weight is not None else value

    return boundary_rule.integrate(integrand)


def integrate_interior(chart: Chart, fn: ScalarField, u: Optional[ScalarField] = None,
                       orders: Optional[QuadratureOrders] = None) -> float:
    """∫fn dV_ĝ。"""
    u = u or zero_field
    volume_rule, _ = chart_rules(chart, orders)
    return volume_rule.integrate(
        lambda x: fn(x) * np.exp(-chart.n * u(x)) * volume_density(chart, x))
