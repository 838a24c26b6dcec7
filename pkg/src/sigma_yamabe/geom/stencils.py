"""有限差分模板

五点模板: 内部为中心差分(一阶、二阶导数均为四阶精度); 需要限制在
坐标盒内的图册(clamp)在边界附近改用平移的单侧五点模板(二阶导数三阶精度)。
混合二阶导数取两个一阶模板的张量积。
"""

from functools import lru_cache
from math import factorial
from typing import Callable, Sequence

import numpy as np

from sigma_yamabe.errors import GeometryError

WIDTH = 5
CENTRAL_START = -2


def fd_weights(offsets: Sequence[float], order: int) -> np.ndarray:
    """Taylor 匹配的差分权重

    求 w 使 Σ_j w_j x_j^p / p! = δ_{p,order}, p = 0..len(offsets)−1。

    Args:
        offsets: 以步长为单位的节点偏移
        order: 导数阶数

    Returns:
        np.ndarray: 权重(调用方再除以 h^order)
    """
    offsets = np.asarray(offsets, dtype=float)
    m = len(offsets)
    if order >= m:
        raise ValueError(f"{m} 个节点无法逼近 {order} 阶导数")
    V = np.array([offsets ** p / factorial(p) for p in range(m)])
    rhs = np.zeros(m)
    rhs[order] = 1.0
    return np.linalg.solve(V, rhs)


@lru_cache(maxsize=None)
def window_table(order: int) -> np.ndarray:
    """起点 s = −4..0 的五点窗口权重表, 形状 (5, 5); 行下标为 s + 4。"""
    return np.array([fd_weights(np.arange(s, s + WIDTH), order)
                     for s in range(-(WIDTH - 1), 1)])


class Stencil:
    """坐标盒上的逐点差分器

    函数 fn 接受形状 (N, n) 的点, 返回形状 (N, ...) 的数组。
    """

    def __init__(self, h: np.ndarray, lo: np.ndarray, hi: np.ndarray, clamp: bool):
        self.h = np.asarray(h, dtype=float)
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.clamp = bool(clamp)
        if np.any(self.hi - self.lo < (WIDTH - 1) * self.h * (1 - 1e-12)):
            raise GeometryError("坐标盒不足以容纳五点模板")

    @property
    def n(self) -> int:
        return len(self.h)

    def starts(self, coord: np.ndarray, axis: int) -> np.ndarray:
        """每个点在 axis 方向上的窗口起点 s ∈ [−4, 0]。"""
        s = np.full(coord.shape, CENTRAL_START, dtype=int)
        if not self.clamp:
            return s
        h = self.h[axis]
        slack = 1e-9
        low = np.ceil((self.lo[axis] - coord) / h - slack).astype(int)
        high = np.floor((self.hi[axis] - coord) / h + slack).astype(int) - (WIDTH - 1)
        s = np.maximum(s, low)
        s = np.minimum(s, high)
        return np.clip(s, -(WIDTH - 1), 0)

    def _axis_weights(self, x: np.ndarray, axis: int, order: int):
        s = self.starts(x[:, axis], axis)
        weights = window_table(order)[s + WIDTH - 1]
        return s, weights

    @staticmethod
    def _scale(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
        return weights.reshape(weights.shape + (1,) * (values.ndim - 1)) * values

    def derivative(self, fn: Callable, x: np.ndarray, axis: int) -> np.ndarray:
        """∂_axis fn(x)。"""
        s, weights = self._axis_weights(x, axis, 1)
        acc = 0.0
        for i in range(WIDTH):
            xi = x.copy()
            xi[:, axis] += (s + i) * self.h[axis]
            acc = acc + self._scale(weights[:, i], fn(xi))
        return acc / self.h[axis]

    def second(self, fn: Callable, x: np.ndarray, a: int, b: int) -> np.ndarray:
        """∂_a ∂_b fn(x)。"""
        if a == b:
            s, weights = self._axis_weights(x, a, 2)
            acc = 0.0
            for i in range(WIDTH):
                xi = x.copy()
                xi[:, a] += (s + i) * self.h[a]
                acc = acc + self._scale(weights[:, i], fn(xi))
            return acc / self.h[a] ** 2
        sa, wa = self._axis_weights(x, a, 1)
        sb, wb = self._axis_weights(x, b, 1)
        acc = 0.0
        for i in range(WIDTH):
            for j in range(WIDTH):
                xij = x.copy()
                xij[:, a] += (sa + i) * self.h[a]
                xij[:, b] += (sb + j) * self.h[b]
                acc = acc + self._scale(wa[:, i] * wb[:, j], fn(xij))
        return acc / (self.h[a] * self.h[b])

    def gradient(self, fn: Callable, x: np.ndarray) -> np.ndarray:
        """形状 (N, n, ...): 第二维为求导方向。"""
        return np.stack([self.derivative(fn, x, a) for a in range(self.n)], axis=1)

    def hessian(self, fn: Callable, x: np.ndarray) -> np.ndarray:
        """形状 (N, n, n, ...), 对求导方向严格对称。"""
        n = self.n
        first = self.second(fn, x, 0, 0)
        out = np.zeros((first.shape[0], n, n) + first.shape[1:])
        for a in range(n):
            for b in range(a, n):
                value = first if a == b == 0 else self.second(fn, x, a, b)
                out[:, a, b] = value
                out[:, b, a] = value
        return out
