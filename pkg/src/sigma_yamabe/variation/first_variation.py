"""F_k 一阶变分的有限差分验证

沿 u_t = u + tφ 对 F_k(e^{−2u_t}g) 做中心差分, 在步长序列上 Richardson
外推, 与闭式 (2k−n)(∫σ_k φ dV + ∮B^k φ dS) 比较。
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from sigma_yamabe.conformal.boundary_terms import boundary_Bk, l4_invariant
from sigma_yamabe.conformal.functional import (
    BoundaryInvariant,
    conformal_volume,
    evaluate_functional,
    integrate_boundary_invariant,
    integrate_interior,
    sigma_k_hat,
)
from sigma_yamabe.conformal.quadrature import QuadratureOrders
from sigma_yamabe.conformal.state import BoundaryGeometry, ConformalState
from sigma_yamabe.config import config
from sigma_yamabe.errors import ConeViolationError, DomainError
from sigma_yamabe.geom.boundary import christoffel_at
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.geom.curvature import (
    CurvaturePack,
    conformal_schouten,
    schouten_function,
    to_frame2,
)
from sigma_yamabe.symfun.cone import cone_mask
from sigma_yamabe.symfun.functions import newton_tensor, spectrum_sigmas
from sigma_yamabe.utils.logger import get_logger
from sigma_yamabe.variation.perturbations import Perturbation, ScalarField

logger = get_logger(__name__)

DEFAULT_STEPS = (1e-2, 5e-3, 2.5e-3)


@dataclass
class VariationReport:
    """有限差分导数与闭式的比较

    Attributes:
        check: 检查名称
        k: 阶数(体积检查为 0)
        n: 维数
        perturbation: 扰动名称
        steps: 步长序列
        derivatives: 各步长的中心差分
        fd_derivative: Richardson 外推值
        formula_value: 闭式值
        residual: |fd_derivative − formula_value|
        order_estimate: 由相邻差分估计的收敛阶
    """

    check: str
    k: int
    n: int
    perturbation: str
    steps: List[float]
    derivatives: List[float]
    fd_derivative: float
    formula_value: float
    residual: float
    order_estimate: float
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def step(self) -> float:
        return float(self.steps[-1])

    @property
    def relative_residual(self) -> float:
        return self.residual / max(1.0, abs(self.formula_value))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['relative_residual'] = self.relative_residual
        return data

    def to_row(self) -> Dict[str, Any]:
        """CSV 台账的一行。"""
        return {'check': self.check, 'k': self.k, 'n': self.n,
                'perturbation': self.perturbation, 'step': self.step,
                'fd_derivative': self.fd_derivative, 'formula_value': self.formula_value,
                'residual': self.residual, 'relative_residual': self.relative_residual,
                'order_estimate': self.order_estimate}


def richardson(steps: Sequence[float], values: Sequence[float]) -> float:
    """中心差分(误差按 t², t⁴, ... 展开)的 Richardson 外推。"""
    steps = np.asarray(steps, dtype=float)
    table = list(np.asarray(values, dtype=float))
    # Neville 递推, 变量为 t²
    for level in range(1, len(table)):
        table = [table[i + 1] + (table[i + 1] - table[i])
                 / ((steps[i] / steps[i + level]) ** 2 - 1.0)
                 for i in range(len(table) - 1)]
    return float(table[0])


def order_estimate(steps: Sequence[float], values: Sequence[float]) -> float:
    """由最后三个差分值估计收敛阶; 差分已在舍入水平时返回 NaN。"""
    if len(values) < 3:
        return float('nan')
    d1 = abs(values[-2] - values[-3])
    d2 = abs(values[-1] - values[-2])
    if d2 <= 1e-14 * max(1.0, abs(values[-1])) or d1 == 0:
        return float('nan')
    return float(np.log(d1 / d2) / np.log(steps[-3] / steps[-2]))


def _steps(steps: Optional[Sequence[float]]) -> List[float]:
    steps = [float(s) for s in (steps or config.get('variation.steps', DEFAULT_STEPS))]
    if not steps or any(s <= 0 for s in steps) or sorted(steps, reverse=True) != steps:
        raise DomainError(f"步长必须为正且严格递减, 得到 {steps}")
    return steps


def _spectrum(pack: CurvaturePack, u: ScalarField) -> np.ndarray:
    A_hat = conformal_schouten(pack, u)
    scaled = np.exp(2.0 * u(pack.points))[:, None, None] * to_frame2(A_hat, pack.frame())
    return np.linalg.eigvalsh(scaled)


def _cone_guard(state: ConformalState, k: int, u_t: ScalarField, t: float) -> None:
    """起点在 Γ_k^+ 内时, 扰动后的 Â 不得离开 Γ_k^+。"""
    if not np.all(cone_mask(state.spectrum_hat(), k)):
        return
    spectrum = _spectrum(state.pack, u_t)
    inside = cone_mask(spectrum, k)
    if not np.all(inside):
        node = int(np.nonzero(~inside)[0][0])
        sig = spectrum_sigmas(spectrum[node])[1:k + 1]
        raise ConeViolationError(f"步长 t={t:g} 使 Â 离开 Γ_{k}^+, 请减小步长",
                                 sigmas=sig, node=node, spectrum=spectrum[node])


def _central_differences(fn: Callable[[float], float], steps: List[float]) -> List[float]:
    return [(fn(t) - fn(-t)) / (2.0 * t) for t in steps]


def _report(check: str, k: int, n: int, phi: Perturbation, steps: List[float],
            derivatives: List[float], formula: float, **extras) -> VariationReport:
    fd = richardson(steps, derivatives)
    report = VariationReport(check=check, k=k, n=n, perturbation=phi.name, steps=steps,
                             derivatives=[float(d) for d in derivatives], fd_derivative=fd,
                             formula_value=float(formula), residual=abs(fd - formula),
                             order_estimate=order_estimate(steps, derivatives), extras=extras)
    logger.info(f"{check}(n={n}, k={k}, φ={phi.name}): fd={fd:.10g}, "
                f"formula={formula:.10g}, residual={report.residual:.3e}")
    return report


def first_variation_check(state: ConformalState, k: int, phi: Perturbation,
                          steps: Optional[Sequence[float]] = None,
                          orders: Optional[QuadratureOrders] = None,
                          form: str = 'auto') -> VariationReport:
    """dF_k/dt 与 (2k−n)(∫σ_kφ dV + ∮B^kφ dS) 的比较

    Args:
        state: 起点 ĝ = e^{−2u}g
        k: 阶数, k >= 2
        phi: 扰动方向
        steps: 递减的步长序列, 缺省读取配置 variation.steps
        orders: 求积阶数
        form: B^k 的形式

    Raises:
        DomainError: k < 2(B¹ 不参与此检查)或步长无效
        ConeViolationError: 扰动使 Â 离开 Γ_k^+
    """
    n = state.n
    if k < 2 or k > n - 1:
        raise DomainError(f"一阶变分检查需要 2 <= k <= n−1, 得到 n={n}, k={k}")
    steps = _steps(steps)
    chart, u = state.chart, state.u

    def F(t):
        u_t = phi.shifted(u, t)
        _cone_guard(state, k, u_t, t)
        return evaluate_functional(chart, u_t, k, orders, form, estimate_error=False).total

    derivatives = _central_differences(F, steps)
    interior = integrate_interior(chart, lambda x: sigma_k_hat(chart, u, x, k) * phi(x), u,
                                  orders)
    boundary = integrate_boundary_invariant(
        chart, lambda geom: boundary_Bk(geom, n, k, form), u, orders, weight=phi)
    formula = (2 * k - n) * (interior + boundary)
    return _report('first_variation', k, n, phi, steps, derivatives, formula,
                   interior=interior, boundary=boundary)


def boundary_invariant(name: str, k: int) -> Tuple[BoundaryInvariant, bool]:
    """目录中的权 2k−1 边界不变量, 返回 (𝓛, 是否需要曲率分量)。

    'l4' 为 ℒ₄(n = 4, k = 2); 'mu_power' 为 μ^{2k−1}, 只在 ∂_nφ = 0 的扰动下
    具有该权。
    """
    if name == 'l4':
        if k != 2:
            raise DomainError(f"ℒ₄ 的权为 3, 对应 k = 2, 得到 k={k}")
        return l4_invariant, True
    if name == 'mu_power':
        def invariant(geom: BoundaryGeometry) -> np.ndarray:
            return geom.mu ** (2 * k - 1)
        return invariant, False
    raise DomainError(f"未知的边界不变量 {name!r}")


def local_invariant_variation_check(state: ConformalState, k: int, phi: Perturbation,
                                    invariant: Any = 'mu_power',
                                    steps: Optional[Sequence[float]] = None,
                                    orders: Optional[QuadratureOrders] = None,
                                    with_curvature: Optional[bool] = None) -> VariationReport:
    """(∮𝓛 dS)' = (2k−n)∮𝓛φ dS, 𝓛 为权 2k−1 的边界逐点不变量

    Args:
        invariant: 目录名('l4', 'mu_power')或可调用对象
        with_curvature: 可调用对象是否需要 Riemann 分量
    """
    n = state.n
    steps = _steps(steps)
    if isinstance(invariant, str):
        name = invariant
        invariant, needs = boundary_invariant(invariant, k)
    else:
        name = getattr(invariant, '__name__', 'custom')
        needs = bool(with_curvature)
    check = f'local_invariant[{name}]'
    chart, u = state.chart, state.u

    def G(t):
        return integrate_boundary_invariant(chart, invariant, phi.shifted(u, t), orders,
                                            with_curvature=needs)

    derivatives = _central_differences(G, steps)
    formula = (2 * k - n) * integrate_boundary_invariant(chart, invariant, u, orders, weight=phi,
                                                         with_curvature=needs)
    return _report(check, k, n, phi, steps, derivatives, formula)


def volume_variation_check(state: ConformalState, phi: Perturbation,
                           steps: Optional[Sequence[float]] = None,
                           orders: Optional[QuadratureOrders] = None) -> VariationReport:
    """dV/dt = −n∫φ dV。"""
    n = state.n
    steps = _steps(steps)
    chart, u = state.chart, state.u
    derivatives = _central_differences(
        lambda t: conformal_volume(chart, phi.shifted(u, t), orders), steps)
    formula = -n * integrate_interior(chart, phi, u, orders)
    return _report('volume_variation', 0, n, phi, steps, derivatives, formula)


class EulerLagrangeResidual(NamedTuple):
    """临界度量的两个方程: σ_k 为常数, B^k = 0。"""

    interior: np.ndarray
    boundary: np.ndarray

    @property
    def max_interior(self) -> float:
        return float(np.max(np.abs(self.interior), initial=0.0))

    @property
    def max_boundary(self) -> float:
        return float(np.max(np.abs(self.boundary), initial=0.0))


def euler_lagrange_residual(state: ConformalState, k: int,
                            form: str = 'auto') -> EulerLagrangeResidual:
    """返回 σ_k(Â) − mean(σ_k(Â)) 与 B^k(ĝ) 两个节点场。"""
    sigma = state.sigma_hat(k)
    interior = sigma - np.mean(sigma)
    if state.boundary is None:
        boundary = np.zeros(0)
    else:
        boundary = np.asarray(boundary_Bk(state.boundary, state.n, k, form))
    return EulerLagrangeResidual(interior=interior, boundary=boundary)


def covariant_divergence(chart: Chart, q: int, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """∇_i T_q(A)^i_j 与 T_q(A) 本身, A 取图册的 Schouten 张量。"""
    schouten = schouten_function(chart)

    def newton(p):
        g_inv = np.linalg.inv(chart.metric(p))
        return newton_tensor(g_inv @ schouten(p), q)

    T = newton(x)
    dT = chart.stencil().gradient(newton, x)
    gamma = christoffel_at(chart, x)
    div = (np.einsum('niij->nj', dT)
           + np.einsum('nk,nkj->nj', np.einsum('niik->nk', gamma), T)
           - np.einsum('nkij,nik->nj', gamma, T))
    return div, T


def divergence_free_check(chart: Chart, q: int, resolutions: Sequence[int] = (21, 41),
                          points: Optional[np.ndarray] = None, seed: int = 0) -> pd.DataFrame:
    """T_q(A) 的协变散度在各分辨率下的最大值

    局部共形平坦时 A 为 Codazzi 张量, 散度应随加密趋于零。
    """
    if points is None:
        points = chart.probe_points(int(config.get('geom.probe_points', 64)), seed)
    rows = []
    for resolution in resolutions:
        div, T = covariant_divergence(chart.with_resolution(int(resolution)), q, points)
        rows.append({'q': q, 'resolution': int(resolution),
                     'h': float(chart.with_resolution(int(resolution)).h[0]),
                     'max_divergence': float(np.max(np.abs(div))),
                     'max_newton': float(np.max(np.abs(T)))})
    frame = pd.DataFrame(rows)
    logger.debug(f"散度检查 q={q}: {frame['max_divergence'].tolist()}")
    return frame
