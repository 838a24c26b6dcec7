"""图册(坐标卡)定义

四类图册:
  half_ball_flat         欧氏半球 {|x| <= 1, x_n >= 0}, 可带共形指数 w (g = e^{−2w}δ);
                         边界取面 x_n = 0, 内法向 +e_n
  ball_conformally_flat  单位球 g = e^{−2w}δ, 边界为单位球面, 内法向 −x̂
  radial_profile         Fermi 坐标 (y, s): g = ds² + φ(s)² ĝ(y), 边界 s = 0
  general_grid           坐标盒上的度量回调, 边界为面 x_n = lo
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import solve_ivp

from sigma_yamabe.config import config
from sigma_yamabe.errors import ConfigError, DomainError, GeometryError
from sigma_yamabe.geom.stencils import Stencil
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

CHART_KINDS = ('half_ball_flat', 'ball_conformally_flat', 'radial_profile', 'general_grid')

RadialProfile = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class ConformalExponent:
    """共形指数 w, 度量 g = e^{−2w}δ

    Attributes:
        name: 目录名
        fn: 点 (N, n) -> w 值 (N,)
        profile: 径向情形 r -> (w, w', w'')
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    profile: Optional[RadialProfile] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(points, dtype=float))

    @property
    def radial(self) -> bool:
        return self.profile is not None

    def radial_values(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.profile is None:
            raise DomainError(f"共形指数 {self.name} 不是径向的")
        return self.profile(np.asarray(r, dtype=float))

    @classmethod
    def from_profile(cls, name: str, profile: RadialProfile, **params) -> 'ConformalExponent':
        def fn(points):
            return profile(np.linalg.norm(points, axis=-1))[0]
        return cls(name=name, fn=fn, profile=profile, params=params)

    @classmethod
    def flat(cls) -> 'ConformalExponent':
        return cls.from_profile('flat', lambda r: (np.zeros_like(r),) * 3)

    @classmethod
    def round(cls) -> 'ConformalExponent':
        """半球的球模型: e^{−w} = 2/(1 + r²)。"""
        def profile(r):
            q = 1.0 + r ** 2
            return np.log(q / 2.0), 2.0 * r / q, 2.0 * (1.0 - r ** 2) / q ** 2
        return cls.from_profile('round', profile)

    @classmethod
    def perturbed(cls, epsilon: float = 0.1) -> 'ConformalExponent':
        """round + ε(1 − r²)², 保持 w'(1) = 1(边界仍全测地)。"""
        base = cls.round().profile

        def profile(r):
            w, w1, w2 = base(r)
            s = 1.0 - r ** 2
            return (w + epsilon * s ** 2,
                    w1 - 4.0 * epsilon * r * s,
                    w2 + epsilon * (12.0 * r ** 2 - 4.0))
        return cls.from_profile('perturbed', profile, epsilon=epsilon)

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> 'ConformalExponent':
        """w = P(r²), P 的系数按升幂给出。"""
        P = Polynomial(np.asarray(coefficients, dtype=float))
        dP = P.deriv(1)
        ddP = P.deriv(2)

        def profile(r):
            r2 = r ** 2
            return P(r2), 2.0 * r * dP(r2), 2.0 * dP(r2) + 4.0 * r2 * ddP(r2)
        return cls.from_profile('polynomial', profile, coefficients=list(map(float, coefficients)))

    @classmethod
    def random_smooth(cls, n: int, seed: int = 0, amplitude: float = 0.2) -> 'ConformalExponent':
        """非径向光滑指数: 线性 + 二次 + 正弦项, 系数由种子决定。"""
        rng = np.random.default_rng(seed)
        a = amplitude * rng.normal(size=n)
        Q = rng.normal(size=(n, n))
        Q = amplitude * 0.5 * (Q + Q.T) / n
        k = rng.normal(size=n)
        c = amplitude * rng.normal()

        def fn(points):
            return (points @ a + np.einsum('ni,ij,nj->n', points, Q, points)
                    + c * np.sin(points @ k))
        return cls(name='random_smooth', fn=fn, params={'seed': seed, 'amplitude': amplitude})

    @classmethod
    def from_config(cls, options: Any, n: int = 4) -> 'ConformalExponent':
        """由名称或 {'name': ..., 参数} 构造。"""
        if options is None:
            return cls.flat()
        if isinstance(options, str):
            options = {'name': options}
        name = options.get('name')
        if name == 'flat':
            return cls.flat()
        if name == 'round':
            return cls.round()
        if name == 'perturbed':
            return cls.perturbed(float(options.get('epsilon', 0.1)))
        if name == 'polynomial':
            return cls.polynomial(options.get('coefficients', [0.0]))
        if name == 'random_smooth':
            return cls.random_smooth(n, int(options.get('seed', 0)), float(options.get('amplitude', 0.2)))
        raise ConfigError(f"未知的共形指数: {name}")


def _fermi_radius(w: ConformalExponent, s_max: float):
    """dr/ds = −e^{w(r)}, r(0) = 1 的稠密解。"""
    def rhs(_, r):
        return -np.exp(w.radial_values(r)[0])
    sol = solve_ivp(rhs, (0.0, s_max), [1.0], method='DOP853', dense_output=True,
                    rtol=1e-12, atol=1e-14)
    if not sol.success:
        raise GeometryError(f"Fermi 半径方程求解失败: {sol.message}")
    if sol.y[0, -1] <= 0:
        raise GeometryError(f"s_max={s_max} 超出 r > 0 的范围")
    return sol.sol


@dataclass
class Chart:
    """带边界区域的坐标卡

    Attributes:
        kind: 图册种类
        n: 维数
        resolution: 每个方向的网格点数(决定差分步长)
        lo, hi: 坐标盒
        w: 共形指数(共形平坦类)
        metric_fn: 度量回调(general_grid / radial_profile)
        name: 目录名
        euler_characteristic: 目录给出的 χ(M, ∂M), 未知时为 None
    """

    kind: str
    n: int
    resolution: int
    lo: np.ndarray
    hi: np.ndarray
    w: Optional[ConformalExponent] = None
    metric_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ''
    euler_characteristic: Optional[int] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CHART_KINDS:
            raise DomainError(f"未知图册种类: {self.kind}")
        if self.resolution < 5:
            raise DomainError(f"分辨率 {self.resolution} < 5")
        if self.n < 2:
            raise DomainError(f"维数 n={self.n} 必须 >= 2")
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)
        if self.conformally_flat and self.w is None:
            self.w = ConformalExponent.flat()

    @property
    def conformally_flat(self) -> bool:
        return self.kind in ('half_ball_flat', 'ball_conformally_flat')

    @property
    def clamp(self) -> bool:
        """差分模板是否必须留在坐标盒内。"""
        return self.kind in ('radial_profile', 'general_grid')

    @property
    def h(self) -> np.ndarray:
        return (self.hi - self.lo) / (self.resolution - 1)

    @property
    def strides(self) -> Tuple[int, ...]:
        """grid_points 中沿各轴前进一格对应的行偏移, 最后一轴最快。"""
        return tuple(self.resolution ** (self.n - 1 - axis) for axis in range(self.n))

    def grid_points(self) -> np.ndarray:
        """坐标盒的全部网格节点, 按节点主序展平为 (resolution^n, n)。

        节点 (i_0, …, i_{n−1}) 位于第 Σ i_a·strides[a] 行。
        """
        axes = [np.linspace(self.lo[a], self.hi[a], self.resolution) for a in range(self.n)]
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack(mesh, axis=-1).reshape(-1, self.n)

    def stencil(self) -> Stencil:
        return Stencil(self.h, self.lo, self.hi, self.clamp)

    def with_resolution(self, resolution: int) -> 'Chart':
        return Chart(kind=self.kind, n=self.n, resolution=resolution, lo=self.lo, hi=self.hi,
                     w=self.w, metric_fn=self.metric_fn, name=self.name,
                     euler_characteristic=self.euler_characteristic, extras=dict(self.extras))

    def metric(self, points: np.ndarray) -> np.ndarray:
        """度量分量, 形状 (N, n, n)。"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.conformally_flat:
            factor = np.exp(-2.0 * self.w(points))
            return factor[:, None, None] * np.eye(self.n)
        return self.metric_fn(points)

    # ------------------------------------------------------------------
    # 区域与边界
    # ------------------------------------------------------------------
    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        if self.kind == 'half_ball_flat':
            return (np.linalg.norm(points, axis=-1) <= 1.0) & (points[:, -1] >= 0.0)
        if self.kind == 'ball_conformally_flat':
            return np.linalg.norm(points, axis=-1) <= 1.0
        return np.all((points >= self.lo) & (points <= self.hi), axis=-1)

    def probe_points(self, count: int, seed: int = 0, margin: float = 0.1) -> np.ndarray:
        """区域内部的可复现随机探测点, 与边界保持 margin 距离。"""
        rng = np.random.default_rng(seed)
        out = []
        have = 0
        while have < count:
            pts = rng.uniform(self.lo, self.hi, size=(4 * count, self.n))
            if self.kind == 'half_ball_flat':
                keep = (np.linalg.norm(pts, axis=-1) <= 1.0 - margin) & (pts[:, -1] >= margin)
            elif self.kind == 'ball_conformally_flat':
                keep = np.linalg.norm(pts, axis=-1) <= 1.0 - margin
            else:
                span = self.hi - self.lo
                keep = np.all((pts >= self.lo + margin * span) & (pts <= self.hi - margin * span),
                              axis=-1)
            out.append(pts[keep])
            have += int(keep.sum())
        return np.concatenate(out)[:count]

    def boundary_probe_points(self, count: int, seed: int = 0, margin: float = 0.2) -> np.ndarray:
        """边界上的可复现随机探测点。"""
        rng = np.random.default_rng(seed)
        if self.kind == 'ball_conformally_flat':
            v = rng.normal(size=(count, self.n))
            return v / np.linalg.norm(v, axis=-1, keepdims=True)
        if self.kind == 'half_ball_flat':
            out = []
            have = 0
            while have < count:
                pts = rng.uniform(-1.0, 1.0, size=(4 * count, self.n - 1))
                keep = np.linalg.norm(pts, axis=-1) <= 1.0 - margin
                out.append(pts[keep])
                have += int(keep.sum())
            tangential = np.concatenate(out)[:count]
            return np.hstack([tangential, np.zeros((count, 1))])
        span = self.hi[:-1] - self.lo[:-1]
        tangential = rng.uniform(self.lo[:-1] + margin * span, self.hi[:-1] - margin * span,
                                 size=(count, self.n - 1))
        return np.hstack([tangential, np.full((count, 1), self.lo[-1])])

    def flat_inner_normal(self, points: np.ndarray) -> np.ndarray:
        """共形平坦类: 过该点的水平集的欧氏内法向。"""
        points = np.atleast_2d(points)
        if self.kind == 'ball_conformally_flat':
            return -points / np.linalg.norm(points, axis=-1, keepdims=True)
        if self.kind == 'half_ball_flat':
            nu = np.zeros_like(points)
            nu[:, -1] = 1.0
            return nu
        raise DomainError(f"{self.kind} 没有平坦法向")

    def flat_principal_curvature(self, points: np.ndarray) -> np.ndarray:
        """共形平坦类: 水平集在平坦度量下关于内法向的主曲率 μ_δ。"""
        points = np.atleast_2d(points)
        if self.kind == 'ball_conformally_flat':
            return 1.0 / np.linalg.norm(points, axis=-1)
        if self.kind == 'half_ball_flat':
            return np.zeros(len(points))
        raise DomainError(f"{self.kind} 没有平坦主曲率")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'name': self.name,
            'n': self.n,
            'resolution': self.resolution,
            'lo': self.lo.tolist(),
            'hi': self.hi.tolist(),
            'w': None if self.w is None else {'name': self.w.name, **self.w.params},
            'euler_characteristic': self.euler_characteristic,
        }


# ----------------------------------------------------------------------
# 构造函数
# ----------------------------------------------------------------------
def _resolution(resolution: Optional[int]) -> int:
    return int(resolution or config.get('geom.resolution', 41))


def half_ball_flat(n: int, w: Optional[ConformalExponent] = None,
                   resolution: Optional[int] = None, name: str = 'half_ball') -> Chart:
    lo = np.full(n, -1.0)
    lo[-1] = 0.0
    return Chart(kind='half_ball_flat', n=n, resolution=_resolution(resolution), lo=lo,
                 hi=np.ones(n), w=w or ConformalExponent.flat(), name=name,
                 euler_characteristic=1)


def ball_conformally_flat(n: int, w: Optional[ConformalExponent] = None,
                          resolution: Optional[int] = None, name: str = 'ball') -> Chart:
    return Chart(kind='ball_conformally_flat', n=n, resolution=_resolution(resolution),
                 lo=np.full(n, -1.0), hi=np.ones(n), w=w or ConformalExponent.flat(),
                 name=name, euler_characteristic=1)


def hemisphere(n: int = 4, resolution: Optional[int] = None) -> Chart:
    """圆球面上半球的球模型, 边界为全测地赤道。"""
    return ball_conformally_flat(n, ConformalExponent.round(), resolution, name='hemisphere')


def radial_profile(n: int, w: Optional[ConformalExponent] = None,
                   resolution: Optional[int] = None, y_max: float = 0.5,
                   s_max: float = 0.4, name: str = 'radial_profile') -> Chart:
    """径向共形指数在边界球面附近的 Fermi 坐标卡

    s 为到边界的测地距离, y 为 S^{n−1} 上半球的图坐标;
    g = ds² + φ(s)² ĝ(y), φ = e^{−w(r(s))} r(s)。
    """
    w = w or ConformalExponent.flat()
    if not w.radial:
        raise DomainError("radial_profile 需要径向共形指数")
    radius = _fermi_radius(w, s_max)

    def metric(points):
        y = points[:, :-1]
        s = points[:, -1]
        r = radius(s)[0]
        phi = np.exp(-w.radial_values(r)[0]) * r
        y2 = np.sum(y ** 2, axis=-1)
        g_hat = np.eye(n - 1) + y[:, :, None] * y[:, None, :] / (1.0 - y2)[:, None, None]
        g = np.zeros((len(points), n, n))
        g[:, :-1, :-1] = (phi ** 2)[:, None, None] * g_hat
        g[:, -1, -1] = 1.0
        return g

    lo = np.full(n, -y_max)
    lo[-1] = 0.0
    hi = np.full(n, y_max)
    hi[-1] = s_max
    w0, w1, _ = w.radial_values(np.array([1.0]))
    mu = float((1.0 - w1[0]) * np.exp(w0[0]))
    return Chart(kind='radial_profile', n=n, resolution=_resolution(resolution), lo=lo, hi=hi,
                 w=w, metric_fn=metric, name=name, extras={'mu': mu, 'radius': radius})


def general_grid(n: int, metric: Callable[[np.ndarray], np.ndarray],
                 lo: Sequence[float], hi: Sequence[float],
                 resolution: Optional[int] = None, name: str = 'general') -> Chart:
    return Chart(kind='general_grid', n=n, resolution=_resolution(resolution),
                 lo=np.asarray(lo, float), hi=np.asarray(hi, float), metric_fn=metric, name=name)


def warped_metric(n: int, c: float = 0.5) -> Callable[[np.ndarray], np.ndarray]:
    """g = dx_n² + (1 − c x_n)² δ_{αβ}: Fermi 形式, 边界 x_n = 0 全脐, μ = c。"""
    def metric(points):
        f = (1.0 - c * points[:, -1]) ** 2
        g = np.zeros((len(points), n, n))
        g[:, :-1, :-1] = f[:, None, None] * np.eye(n - 1)
        g[:, -1, -1] = 1.0
        return g
    return metric


def tilted_metric(n: int, epsilon: float = 0.1) -> Callable[[np.ndarray], np.ndarray]:
    """非 Fermi、非共形平坦的光滑度量 δ + ε S(x)。"""
    def metric(points):
        g = np.broadcast_to(np.eye(n), (len(points), n, n)).copy()
        for i in range(n):
            for j in range(i, n):
                value = epsilon * np.sin(points[:, i] + 2.0 * points[:, j] + 0.3 * (i + j))
                if i == j:
                    value = value * 0.5
                g[:, i, j] += value
                if i != j:
                    g[:, j, i] += value
        return g
    return metric


def chart_from_config(options: Dict[str, Any]) -> Chart:
    """由键值配置构造图册

    支持的键: kind, n, resolution, lo, hi, w (名称或带参数的字典),
    metric ('euclidean' / 'warped' / 'tilted'), y_max, s_max。
    目录名 'hemisphere' 为 ball_conformally_flat + round 的简写。
    """
    options = dict(options)
    kind = options.get('kind', 'hemisphere')
    n = int(options.get('n', 4))
    resolution = options.get('resolution')
    w = ConformalExponent.from_config(options.get('w'), n) if options.get('w') is not None else None
    if kind == 'hemisphere':
        return hemisphere(n, resolution)
    if kind == 'half_ball_flat':
        return half_ball_flat(n, w, resolution)
    if kind == 'ball_conformally_flat':
        return ball_conformally_flat(n, w, resolution)
    if kind == 'radial_profile':
        return radial_profile(n, w, resolution, float(options.get('y_max', 0.5)),
                              float(options.get('s_max', 0.4)))
    if kind == 'general_grid':
        metric_name = options.get('metric', 'euclidean')
        if metric_name == 'euclidean':
            metric = lambda p: np.broadcast_to(np.eye(n), (len(p), n, n)).copy()  # noqa: E731
        elif metric_name == 'warped':
            metric = warped_metric(n, float(options.get('c', 0.5)))
        elif metric_name == 'tilted':
            metric = tilted_metric(n, float(options.get('epsilon', 0.1)))
        else:
            raise ConfigError(f"未知的度量: {metric_name}")
        lo = options.get('lo', [-0.5] * (n - 1) + [0.0])
        hi = options.get('hi', [0.5] * (n - 1) + [0.5])
        return general_grid(n, metric, lo, hi, resolution, name=metric_name)
    raise ConfigError(f"未知图册种类: {kind}")
