"""共形扰动方向 φ 的目录

u_t = u + tφ。体积保持投影把 φ 换成 φ − ⨍φ dV_ĝ, 使 ∫φ dV_ĝ = 0。
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional

import numpy as np

from sigma_yamabe.conformal.functional import conformal_volume, integrate_interior
from sigma_yamabe.conformal.quadrature import QuadratureOrders
from sigma_yamabe.errors import ConfigError
from sigma_yamabe.geom.chart import Chart

ScalarField = Callable[[np.ndarray], np.ndarray]

PERTURBATIONS = ('zero', 'constant', 'radial_bump', 'x1_mode', 'neumann_bump')


@dataclass(frozen=True)
class Perturbation:
    """变分方向

    Attributes:
        name: 目录名
        phi: 标量场
        volume_preserving: 是否已做体积保持投影
        params: 构造参数
    """

    name: str
    phi: ScalarField
    volume_preserving: bool = False
    params: Dict[str, Any] = field(default_factory=dict)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.phi(x)

    def shifted(self, u: Optional[ScalarField], t: float) -> ScalarField:
        """u + tφ。"""
        if u is None:
            return lambda x: t * self.phi(x)
        return lambda x: u(x) + t * self.phi(x)

    def project(self, chart: Chart, u: Optional[ScalarField] = None,
                orders: Optional[QuadratureOrders] = None) -> 'Perturbation':
        """体积保持投影: 减去 ĝ 下的平均值。"""
        mean = integrate_interior(chart, self.phi, u, orders) / conformal_volume(chart, u, orders)
        phi = self.phi
        return Perturbation(name=self.name, phi=lambda x: phi(x) - mean, volume_preserving=True,
                            params={**self.params, 'mean': mean})

    # ------------------------------------------------------------------
    # 目录
    # ------------------------------------------------------------------
    @classmethod
    def zero(cls) -> 'Perturbation':
        return cls('zero', lambda x: np.zeros(len(x)))

    @classmethod
    def constant(cls, c: float = 1.0) -> 'Perturbation':
        return cls('constant', lambda x: np.full(len(x), float(c)), params={'c': float(c)})

    @classmethod
    def radial_bump(cls, width: float = 0.5, amplitude: float = 1.0) -> 'Perturbation':
        """amplitude · exp(−|x|²/(2 width²))。"""
        def phi(x):
            return amplitude * np.exp(-np.sum(x ** 2, axis=-1) / (2.0 * width ** 2))
        return cls('radial_bump', phi, params={'width': width, 'amplitude': amplitude})

    @classmethod
    def x1_mode(cls, amplitude: float = 1.0) -> 'Perturbation':
        """球谐一次模 amplitude · x_1。"""
        return cls('x1_mode', lambda x: amplitude * x[:, 0], params={'amplitude': amplitude})

    @classmethod
    def neumann_bump(cls, amplitude: float = 1.0) -> 'Perturbation':
        """1 + amplitude(1 − |x|²)², 在单位球面上法向导数为零。"""
        def phi(x):
            return 1.0 + amplitude * (1.0 - np.sum(x ** 2, axis=-1)) ** 2
        return cls('neumann_bump', phi, params={'amplitude': amplitude})

    @classmethod
    def from_config(cls, options: Any) -> 'Perturbation':
        """由名称或 {'name': ..., 参数...} 构造。"""
        if isinstance(options, str):
            options = {'name': options}
        options = dict(options or {})
        name = options.pop('name', 'radial_bump')
        factories = {'zero': cls.zero, 'constant': cls.constant, 'radial_bump': cls.radial_bump,
                     'x1_mode': cls.x1_mode, 'neumann_bump': cls.neumann_bump}
        if name not in factories:
            raise ConfigError(f"未知的扰动 {name!r}, 可选 {PERTURBATIONS}")
        try:
            return factories[name](**options)
        except TypeError as exc:
            raise ConfigError(f"扰动 {name!r} 的参数无效: {exc}") from exc
