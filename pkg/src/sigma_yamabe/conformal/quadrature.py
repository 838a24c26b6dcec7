"""求积规则

球与半球用球坐标乘积规则: 径向 Gauss-Jacobi(权 r^{d−1}), 球面按
极角递归(Gauss-Jacobi 权 (1−t²)^{(m−2)/2}), 最内层圆周取梯形规则。
坐标盒用张量积 Simpson 规则。所有权重只含平坦测度, 度量密度另乘。
"""

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.integrate import simpson
from scipy.special import roots_jacobi, roots_legendre

from sigma_yamabe.config import config
from sigma_yamabe.errors import DomainError
from sigma_yamabe.geom.chart import Chart


class QuadratureOrders(NamedTuple):
    radial: int
    angular: int
    azimuth: int
    box: int

    @classmethod
    def default(cls) -> 'QuadratureOrders':
        return cls(int(config.get('conformal.radial_order', 16)),
                   int(config.get('conformal.angular_order', 16)),
                   int(config.get('conformal.azimuth_order', 32)),
                   int(config.get('conformal.box_nodes', 17)))

    def coarse(self) -> 'QuadratureOrders':
        """误差估计用的粗一级规则。"""
        return QuadratureOrders(max(4, 2 * self.radial // 3), max(4, 2 * self.angular // 3),
                                max(8, 2 * self.azimuth // 3), max(5, self.box // 2 + 1))


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def measure(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, fn: Callable[[np.ndarray], np.ndarray],
                  batch: Optional[int] = None) -> float:
        """∫ fn, 分批求值后按固定顺序成对求和。"""
        batch = int(batch or config.get('geom.batch_size', 2048))
        partial = []
        for start in range(0, len(self.weights), batch):
            x = self.points[start:start + batch]
            partial.append(np.sum(fn(x) * self.weights[start:start + batch]))
        return float(np.sum(np.array(partial)))


def sphere_rule(m: int, angular: int, azimuth: int) -> QuadratureRule:
    """单位球面 S^m ⊂ R^{m+1}。"""
    if m < 1:
        raise DomainError(f"球面维数必须 >= 1, 得到 {m}")
    phi = 2.0 * np.pi * np.arange(azimuth) / azimuth
    points = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
    weights = np.full(azimuth, 2.0 * np.pi / azimuth)
    for d in range(2, m + 1):
        a = (d - 2) / 2.0
        t, wt = roots_jacobi(angular, a, a)
        s = np.sqrt(1.0 - t ** 2)
        points = np.concatenate([
            (s[:, None, None] * points[None, :, :]).reshape(-1, d),
            np.repeat(t, len(weights))[:, None]], axis=-1)
        weights = (wt[:, None] * weights[None, :]).reshape(-1)
    return QuadratureRule(points, weights)


def _radial(d: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """∫_0^1 f(r) r^{d−1} dr 的 Gauss-Jacobi 节点与权重。"""
    x, w = roots_jacobi(order, 0.0, d - 1.0)
    return 0.5 * (1.0 + x), w * 0.5 ** d


def ball_rule(d: int, orders: QuadratureOrders) -> QuadratureRule:
    """单位球 B^d ⊂ R^d。"""
    r, wr = _radial(d, orders.radial)
    if d == 1:
        points = np.concatenate([r, -r])[:, None]
        return QuadratureRule(points, np.concatenate([wr, wr]))
    sph = sphere_rule(d - 1, orders.angular, orders.azimuth)
    points = (r[:, None, None] * sph.points[None, :, :]).reshape(-1, d)
    weights = (wr[:, None] * sph.weights[None, :]).reshape(-1)
    return QuadratureRule(points, weights)


def half_ball_rule(n: int, orders: QuadratureOrders) -> QuadratureRule:
    """上半球 {|x| <= 1, x_n >= 0}: 极角 θ ∈ [0, π/2] 取 Gauss-Legendre, 权 sin^{n−2}θ。"""
    if n < 3:
        raise DomainError(f"半球规则需要 n >= 3, 得到 n={n}")
    r, wr = _radial(n, orders.radial)
    x, wx = roots_legendre(orders.angular)
    theta = 0.25 * np.pi * (1.0 + x)
    wtheta = 0.25 * np.pi * wx * np.sin(theta) ** (n - 2)
    sph = sphere_rule(n - 2, orders.angular, orders.azimuth)
    direction = np.concatenate([
        (np.sin(theta)[:, None, None] * sph.points[None, :, :]).reshape(-1, n - 1),
        np.repeat(np.cos(theta), len(sph.weights))[:, None]], axis=-1)
    wdir = (wtheta[:, None] * sph.weights[None, :]).reshape(-1)
    points = (r[:, None, None] * direction[None, :, :]).reshape(-1, n)
    weights = (wr[:, None] * wdir[None, :]).reshape(-1)
    return QuadratureRule(points, weights)


def box_rule(lo: np.ndarray, hi: np.ndarray, nodes: int) -> QuadratureRule:
    """坐标盒上的张量积 Simpson 规则。"""
    axes = [np.linspace(a, b, nodes) for a, b in zip(lo, hi)]
    weights_1d = [simpson(np.eye(nodes), x=axis) for axis in axes]
    grid = np.meshgrid(*axes, indexing='ij')
    points = np.stack([g.reshape(-1) for g in grid], axis=-1)
    weights = weights_1d[0]
    for w in weights_1d[1:]:
        weights = np.multiply.outer(weights, w)
    return QuadratureRule(points, weights.reshape(-1))


def chart_rules(chart: Chart, orders: Optional[QuadratureOrders] = None
                ) -> Tuple[QuadratureRule, QuadratureRule]:
    """图册的 (区域规则, 边界规则), 权重为平坦测度。"""
    orders = orders or QuadratureOrders.default()
    n = chart.n
    if chart.kind == 'ball_conformally_flat':
        return ball_rule(n, orders), sphere_rule(n - 1, orders.angular, orders.azimuth)
    if chart.kind == 'half_ball_flat':
        face = ball_rule(n - 1, orders)
        points = np.hstack([face.points, np.zeros((len(face), 1))])
        return half_ball_rule(n, orders), QuadratureRule(points, face.weights)
    volume = box_rule(chart.lo, chart.hi, orders.box)
    face = box_rule(chart.lo[:-1], chart.hi[:-1], orders.box)
    points = np.hstack([face.points, np.full((len(face), 1), chart.lo[-1])])
    return volume, QuadratureRule(points, face.weights)


def volume_density(chart: Chart, x: np.ndarray) -> np.ndarray:
    """√det g。"""
    if chart.conformally_flat:
        return np.exp(-chart.n * chart.w(x))
    return np.sqrt(np.linalg.det(chart.metric(x)))


def area_density(chart: Chart, x: np.ndarray) -> np.ndarray:
    """边界诱导测度相对平坦测度的密度。"""
    if chart.conformally_flat:
        return np.exp(-(chart.n - 1) * chart.w(x))
    return np.sqrt(np.linalg.det(chart.metric(x)[:, :-1, :-1]))
