"""径向约化

背景度量 g = e^{−2w(r)}δ 定义在单位球上, ĝ = e^{−2u}g = e^{−2(u+w)}δ。记
v = u + w, 则 g^{−1}Â 只有两个不同的特征值

    λ_r = e^{2w}(v'' + ½v'²)              (径向, 重数 1)
    λ_t = e^{2w}(v'/r − ½v'²)             (切向, 重数 n−1)

r = 0 处由 v'(0) = 0 与 l'Hôpital 得 v'/r → v''(0)。
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import gamma

from sigma_yamabe.errors import DomainError
from sigma_yamabe.geom.chart import ConformalExponent
from sigma_yamabe.models.tensors import Spectrum

RadialValues = Tuple[np.ndarray, np.ndarray, np.ndarray]
RadialFunction = Callable[[np.ndarray], RadialValues]


def sphere_area(n: int) -> float:
    """单位球面 S^{n−1} 的面积。"""
    return float(2.0 * np.pi ** (n / 2.0) / gamma(n / 2.0))


@dataclass(frozen=True)
class RadialGrid:
    """r ∈ [0, 1] 上的均匀网格, 两端各带一个虚节点

    未知量按 (u_{−1}, u_0, ..., u_N, u_{N+1}) 排列, 长度 N + 3。
    """

    nodes: int

    def __post_init__(self):
        if self.nodes < 5:
            raise DomainError(f"径向节点数至少为 5, 得到 {self.nodes}")

    @property
    def N(self) -> int:
        return self.nodes - 1

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.nodes)

    @property
    def size(self) -> int:
        return self.nodes + 2

    def interior(self, U: np.ndarray) -> np.ndarray:
        """去掉虚节点的节点值。"""
        return np.asarray(U)[1:-1]

    def extend(self, u: np.ndarray) -> np.ndarray:
        """节点值 → 带虚节点的未知量(偶延拓与二次外推)。"""
        u = np.asarray(u, dtype=float)
        ghost = 3.0 * u[-1] - 3.0 * u[-2] + u[-3]
        return np.concatenate([[u[1]], u, [ghost]])

    def derivatives(self, U: np.ndarray) -> RadialValues:
        """各节点的 (u, u', u''), 二阶中心差分。"""
        U = np.asarray(U, dtype=float)
        h = self.h
        u = U[1:-1]
        du = (U[2:] - U[:-2]) / (2.0 * h)
        d2u = (U[2:] - 2.0 * u + U[:-2]) / h ** 2
        return u, du, d2u

    def sample(self, fn: RadialFunction) -> np.ndarray:
        """解析径向函数 → 带虚节点的未知量, 虚节点取 r = −h 与 1 + h 处的值。"""
        r = np.concatenate([[-self.h], self.r, [1.0 + self.h]])
        return np.asarray(fn(np.abs(r))[0], dtype=float)

    def weights(self, n: int) -> np.ndarray:
        """r^{n−1}|S^{n−1}| dr 的梯形权重(不含背景因子)。"""
        w = np.full(self.nodes, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return sphere_area(n) * self.r ** (n - 1) * w


def radial_spectrum_values(n: int, r: np.ndarray, background: RadialValues,
                           u: np.ndarray, du: np.ndarray, d2u: np.ndarray) -> np.ndarray:
    """节点上 g^{−1}Â 的完整谱, 形状 (len(r), n)。"""
    w, w1, w2 = background
    v1 = du + w1
    v2 = d2u + w2
    scale = np.exp(2.0 * w)
    lam_r = scale * (v2 + 0.5 * v1 ** 2)
    safe = np.where(r > 0, r, 1.0)
    lam_t = np.where(r > 0, scale * (v1 / safe - 0.5 * v1 ** 2), scale * v2)
    values = np.empty((len(r), n))
    values[:, 0] = lam_r
    values[:, 1:] = lam_t[:, None]
    return values


def radial_spectrum_derivatives(r: np.ndarray, background: RadialValues,
                                du: np.ndarray) -> Tuple[np.ndarray, ...]:
    """(∂λ_r/∂u', ∂λ_r/∂u'', ∂λ_t/∂u', ∂λ_t/∂u'')。"""
    w, w1, _ = background
    v1 = du + w1
    scale = np.exp(2.0 * w)
    safe = np.where(r > 0, r, 1.0)
    dr_dp = scale * v1
    dr_dq = scale
    dt_dp = np.where(r > 0, scale * (1.0 / safe - v1), 0.0)
    dt_dq = np.where(r > 0, 0.0, scale)
    return dr_dp, dr_dq * np.ones_like(r), dt_dp, dt_dq * np.ones_like(r)


def radial_hessian_spectrum(u: RadialFunction, w: Optional[ConformalExponent], r: float,
                            t: float = 1.0, n: int = 4) -> Spectrum:
    """单点处 g^{−1}Â^t 的谱, Â^t = Â + ((1−t)/2) tr_g(Â) g

    Args:
        u: r -> (u, u', u'') 的解析径向函数
        w: 径向背景指数, None 表示平坦
        r: 节点, 0 <= r <= 1
        t: 形变参数, t = 1 时为 Â 本身
        n: 维数

    Returns:
        Spectrum: (λ_r, λ_t, ..., λ_t)
    """
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"r={r} 不在 [0, 1] 内")
    w = w or ConformalExponent.flat()
    rr = np.array([float(r)])
    u0, u1, u2 = (np.asarray(a, dtype=float).reshape(1) for a in u(rr))
    background = tuple(np.asarray(a, dtype=float).reshape(1) for a in w.radial_values(rr))
    values = radial_spectrum_values(n, rr, background, u0, u1, u2)[0]
    values = values + 0.5 * (1.0 - t) * values.sum()
    if not np.all(np.isfinite(values)):
        raise DomainError(f"r={r} 处的谱不是有限值: {values}")
    return Spectrum(values)
