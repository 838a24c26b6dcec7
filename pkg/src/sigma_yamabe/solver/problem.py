"""径向 σ_k Yamabe 边值问题与形变路径

    σ_k^{1/k}(Λ(g^{−1}Â)) = RHS(x, u)          r ∈ [0, 1]
    u'(0) = 0
    ∂u/∂n + μ_g = μ̂ e^{−u}                     r = 1

路径决定 Λ 与右端:
  none   Λ = λ,                                 RHS = f(x, u)
  pos    Λ = λ + ((1−t)/2)σ_1(λ)e,              RHS = f_Θ(x)e^{2u},  t ∈ [−Θ, 1]
  lcf    Λ = λ + ((1−t)/2)σ_{k−1}^{1/(k−1)}(λ)e, RHS = f_Θ(x)e^{2u}, t ∈ [−Θ, 1]
  fixed  与 pos 相同的 Λ, RHS = σ_k^{1/k}(Λ(a))e^{2u}, u ≡ 0 对所有 t 成立
  defm   Λ = λ + (1−ζ(t))(V^{2/5}/√6 − a),       RHS = (1−t)(∫e^{−5u})^{2/5} + ζ(t)f(x, u)

其中 a 为背景 g^{−1}A 的谱, f_Θ = σ_k^{1/k}(Λ_{−Θ}(a))。
"""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from sigma_yamabe.config import config
from sigma_yamabe.errors import ConeViolationError, ConfigError, DomainError
from sigma_yamabe.geom.chart import ConformalExponent
from sigma_yamabe.solver.radial import (
    RadialGrid,
    RadialValues,
    radial_spectrum_derivatives,
    radial_spectrum_values,
)
from sigma_yamabe.symfun.cone import cone_margin, cone_mask
from sigma_yamabe.symfun.functions import sigma_and_gradient, spectrum_sigmas
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

TARGETS = ('constant', 'exp_minus', 'exp_plus', 'weighted')
PATHS = ('pos', 'lcf', 'defm', 'fixed')


def zeta(t: float) -> float:
    """C¹ 斜坡: ζ(0) = 0, t >= ½ 时 ζ = 1。"""
    s = min(max(2.0 * float(t), 0.0), 1.0)
    return 3.0 * s ** 2 - 2.0 * s ** 3


@dataclass(frozen=True)
class Target:
    """右端 f(x, u) = profile(r) e^{power·u}

    Attributes:
        name: 目录名
        power: u 的指数系数
        profile: r -> f(r), 必须为正
        params: 构造参数
    """

    name: str
    power: float
    profile: Callable[[np.ndarray], np.ndarray]
    params: Dict[str, Any] = field(default_factory=dict)

    def __call__(self, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        return self.profile(r) * np.exp(self.power * u)

    def derivative(self, r: np.ndarray, u: np.ndarray) -> np.ndarray:
        """∂f/∂u。"""
        return self.power * self(r, u)

    @classmethod
    def constant(cls, c: float = 1.0) -> 'Target':
        return cls('constant', 0.0, lambda r: np.full(np.shape(r), float(c)), {'c': float(c)})

    @classmethod
    def exp_minus(cls, c: float = 1.0) -> 'Target':
        """c e^{−2u}。"""
        return cls('exp_minus', -2.0, lambda r: np.full(np.shape(r), float(c)), {'c': float(c)})

    @classmethod
    def exp_plus(cls, c: float = 1.0) -> 'Target':
        """c e^{2u}。"""
        return cls('exp_plus', 2.0, lambda r: np.full(np.shape(r), float(c)), {'c': float(c)})

    @classmethod
    def weighted(cls, profile: Callable[[np.ndarray], np.ndarray], power: float = -2.0,
                 **params) -> 'Target':
        """f(r) e^{power·u}。"""
        return cls('weighted', float(power), profile, params)

    @classmethod
    def from_config(cls, options: Any) -> 'Target':
        if isinstance(options, str):
            options = {'name': options}
        options = dict(options or {'name': 'exp_minus'})
        name = options.pop('name', 'exp_minus')
        if name == 'weighted':
            coefficients = np.asarray(options.get('coefficients', [1.0]), dtype=float)
            return cls.weighted(lambda r: np.polynomial.polynomial.polyval(r ** 2, coefficients),
                                float(options.get('power', -2.0)), coefficients=coefficients.tolist())
        factories = {'constant': cls.constant, 'exp_minus': cls.exp_minus,
                     'exp_plus': cls.exp_plus}
        if name not in factories:
            raise ConfigError(f"未知的右端 {name!r}, 可选 {TARGETS}")
        try:
            return factories[name](**options)
        except TypeError as exc:
            raise ConfigError(f"右端 {name!r} 的参数无效: {exc}") from exc


@dataclass(frozen=True)
class RadialProblem:
    """单位球上的径向问题

    Attributes:
        n: 维数
        k: 阶数
        w: 径向背景指数, g = e^{−2w}δ
        target: 右端 f(x, u)
        mu_hat: 边界目标平均曲率 μ̂ >= 0
        nodes: r ∈ [0, 1] 上的节点数
    """

    n: int
    k: int
    w: ConformalExponent
    target: Target
    mu_hat: float = 0.0
    nodes: int = 201
    name: str = 'radial'

    def __post_init__(self):
        if self.n < 2 or not 1 <= self.k <= self.n:
            raise DomainError(f"需要 n >= 2 且 1 <= k <= n, 得到 n={self.n}, k={self.k}")
        if not self.w.radial:
            raise DomainError(f"背景指数 {self.w.name} 不是径向的")
        if self.mu_hat < 0:
            raise DomainError(f"μ̂ 必须非负, 得到 {self.mu_hat}")
        f = self.target.profile(self.grid.r)
        if not np.all(f > 0):
            raise DomainError(f"右端 f 必须为正, 最小值 {float(np.min(f)):.3e}")

    @property
    def grid(self) -> RadialGrid:
        return RadialGrid(self.nodes)

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    @property
    def background(self) -> RadialValues:
        return tuple(np.asarray(a, dtype=float) for a in self.w.radial_values(self.r))

    @property
    def mu_g(self) -> float:
        """背景边界平均曲率 e^{w(1)}(1 − w'(1))(内法向)。"""
        w, w1, _ = self.w.radial_values(np.array([1.0]))
        return float(np.exp(w[0]) * (1.0 - w1[0]))

    @property
    def weights(self) -> np.ndarray:
        """dV_g 的梯形权重。"""
        return self.grid.weights(self.n) * np.exp(-self.n * self.background[0])

    @property
    def volume(self) -> float:
        return float(np.sum(self.weights))

    def background_spectrum(self) -> np.ndarray:
        """u ≡ 0 时 g^{−1}A 的谱, 形状 (nodes, n)。"""
        zeros = np.zeros(self.nodes)
        return radial_spectrum_values(self.n, self.r, self.background, zeros, zeros, zeros)

    def with_nodes(self, nodes: int) -> 'RadialProblem':
        return replace(self, nodes=int(nodes))

    def to_dict(self) -> Dict[str, Any]:
        return {'name': self.name, 'n': self.n, 'k': self.k, 'w': self.w.name,
                'w_params': self.w.params, 'target': self.target.name,
                'target_params': self.target.params, 'mu_hat': self.mu_hat, 'nodes': self.nodes}


def manufactured_problem(n: int, k: int, w: ConformalExponent, exact: ConformalExponent,
                         nodes: int = 201) -> RadialProblem:
    """由 u_exact 反推右端 f(r)e^{2u} 与 μ̂, 使 u_exact 为精确解

    Args:
        exact: 径向函数, exact.radial_values(r) = (u, u', u''), 要求 u'(0) = 0
    """
    def profile(r):
        r = np.asarray(r, dtype=float)
        u, du, d2u = exact.radial_values(r)
        values = radial_spectrum_values(n, r, w.radial_values(r), u, du, d2u)
        if not np.all(cone_mask(values, k)):
            raise ConeViolationError(f"u_exact 的谱不在 Γ_{k}^+ 内")
        return spectrum_sigmas(values)[:, k] ** (1.0 / k) * np.exp(-2.0 * u)

    u1, du1, _ = exact.radial_values(np.array([1.0]))
    w1, dw1, _ = w.radial_values(np.array([1.0]))
    mu_g = np.exp(w1[0]) * (1.0 - dw1[0])
    mu_hat = float(np.exp(u1[0]) * (-np.exp(w1[0]) * du1[0] + mu_g))
    target = Target.weighted(profile, power=2.0, exact=exact.name)
    return RadialProblem(n=n, k=k, w=w, target=target, mu_hat=max(mu_hat, 0.0), nodes=nodes,
                         name=f'manufactured[{exact.name}]')


@dataclass(frozen=True)
class PathSpec:
    """形变路径

    Attributes:
        kind: 'none' 或 PATHS 之一
        theta: pos / lcf / fixed 路径的下界 −Θ
    """

    kind: str = 'none'
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in ('none',) + PATHS:
            raise DomainError(f"未知的路径 {self.kind!r}, 可选 {PATHS}")
        if self.theta < 0:
            raise DomainError(f"Θ 必须非负, 得到 {self.theta}")

    @property
    def t_start(self) -> float:
        if self.kind in ('pos', 'lcf', 'fixed'):
            return -float(self.theta)
        return 0.0 if self.kind == 'defm' else 1.0

    @property
    def t_end(self) -> float:
        return 1.0


def _shift_pos(values: np.ndarray, t: float) -> np.ndarray:
    return values + 0.5 * (1.0 - t) * values.sum(axis=-1, keepdims=True)


def _shift_lcf(values: np.ndarray, m: int, t: float) -> np.ndarray:
    base = spectrum_sigmas(values)[..., m - 1]
    return values + 0.5 * (1.0 - t) * (np.maximum(base, 0.0) ** (1.0 / (m - 1)))[..., None]


def theta_selection(problem: RadialProblem, kind: str = 'pos',
                    min_eigenvalue: Optional[float] = None, cap: Optional[int] = None) -> float:
    """最小的正 5 的倍数 Θ, 使 A^{−Θ} 的最小特征值 >= min_eigenvalue

    lcf 路径使用 A^{−Θ}_{k−1} = A + ((1+Θ)/2)σ_{k−1}^{1/(k−1)}(A)g。

    Raises:
        DomainError: 上限内找不到 Θ(例如 σ_1(A) <= 0)
    """
    min_eigenvalue = config.get('solver.theta_min_eigenvalue', 0.1) if min_eigenvalue is None \
        else min_eigenvalue
    cap = int(config.get('solver.theta_cap', 1000) if cap is None else cap)
    a = problem.background_spectrum()
    if kind == 'lcf':
        if problem.k < 2 or not np.all(cone_mask(a, problem.k - 1)):
            raise DomainError(f"lcf 路径需要 k >= 2 且 A ∈ Γ_{problem.k - 1}^+")
        scale = spectrum_sigmas(a)[:, problem.k - 1] ** (1.0 / (problem.k - 1))
    else:
        scale = a.sum(axis=-1)
    thetas = np.arange(5, cap + 1, 5, dtype=float)
    minima = np.min(a.min(axis=-1)[None, :] + 0.5 * (1.0 + thetas)[:, None] * scale[None, :],
                    axis=1)
    ok = np.nonzero(minima >= min_eigenvalue)[0]
    if ok.size == 0:
        raise DomainError(f"Θ <= {cap} 内 A^{{−Θ}} 的最小特征值达不到 {min_eigenvalue}")
    theta = float(thetas[ok[0]])
    logger.info(f"Θ = {theta:g}({kind} 路径, 最小特征值 {minima[ok[0]]:.4g})")
    return theta


@dataclass(frozen=True)
class ContinuationState:
    """路径上的一个点

    Attributes:
        t: 路径参数
        path: 路径
        U: 带虚节点的未知量
        history: 最近一次 Newton 求解的残差范数
        cone_margin: 各节点到 ∂Γ_k^+ 的最小距离
    """

    t: float
    path: PathSpec
    U: np.ndarray
    history: Tuple[float, ...] = ()
    cone_margin: float = float('nan')

    @property
    def u(self) -> np.ndarray:
        return np.asarray(self.U)[1:-1]

    @property
    def zeta(self) -> float:
        return zeta(self.t)

    def with_values(self, U: np.ndarray, **changes) -> 'ContinuationState':
        return replace(self, U=np.asarray(U, dtype=float), **changes)

    @classmethod
    def start(cls, problem: RadialProblem, path: Optional[PathSpec] = None,
              u0: Any = 0.0) -> 'ContinuationState':
        """路径起点; u0 为常数、节点值或径向函数。"""
        path = path or PathSpec()
        grid = problem.grid
        if isinstance(u0, ConformalExponent):
            U = grid.sample(u0.radial_values)
        elif callable(u0):
            U = grid.sample(u0)
        elif np.ndim(u0) == 0:
            U = np.full(grid.size, float(u0))
        else:
            U = grid.extend(np.asarray(u0, dtype=float))
        return cls(t=path.t_start, path=path, U=U)


@dataclass(frozen=True)
class Evaluation:
    """一次残差求值的节点量

    Attributes:
        residual: 残差向量, 长度 nodes + 2
        spectrum: 路径变换后的谱 Λ, 形状 (nodes, n)
        margin: 各节点的锥边距
        rhs: 各节点的右端
        jacobian: 需要时给出的 Jacobian
    """

    residual: np.ndarray
    spectrum: np.ndarray
    margin: np.ndarray
    rhs: np.ndarray
    jacobian: Optional[np.ndarray] = None


def _path_target(problem: RadialProblem, path: PathSpec, t: float) -> np.ndarray:
    a = problem.background_spectrum()
    if path.kind == 'pos':
        shifted = _shift_pos(a, -path.theta)
    elif path.kind == 'lcf':
        shifted = _shift_lcf(a, problem.k, -path.theta)
    else:
        shifted = _shift_pos(a, t)
    return spectrum_sigmas(shifted)[:, problem.k] ** (1.0 / problem.k)


def _raise_cone(values: np.ndarray, inside: np.ndarray, k: int, t: float) -> None:
    node = int(np.nonzero(~inside)[0][0])
    sig = spectrum_sigmas(values[node])[1:k + 1]
    raise ConeViolationError(f"t={t:g} 时节点 {node} 的谱不在 Γ_{k}^+ 内",
                             sigmas=sig, node=node, spectrum=values[node])


def evaluate(problem: RadialProblem, state: ContinuationState,
             jacobian: bool = False) -> Evaluation:
    """组装残差(可选 Jacobian)

    Raises:
        ConeViolationError: 某节点的 Λ 不在 Γ_k^+ 内, 携带节点与谱
        DomainError: defm 路径用于 n != 4 或 k != 2
    """
    n, k, t, kind = problem.n, problem.k, float(state.t), state.path.kind
    if kind == 'defm' and (n != 4 or k != 2):
        raise DomainError(f"defm 路径只对 n = 4, k = 2 定义, 得到 n={n}, k={k}")
    if kind == 'lcf' and k < 2:
        raise DomainError("lcf 路径需要 k >= 2")
    grid, r = problem.grid, problem.r
    h = grid.h
    U = np.asarray(state.U, dtype=float)
    u, du, d2u = grid.derivatives(U)
    background = problem.background
    lam = radial_spectrum_values(n, r, background, u, du, d2u)

    if kind == 'lcf':
        inner = cone_mask(lam, k - 1)
        if not np.all(inner):
            _raise_cone(lam, inner, k - 1, t)
        spectrum = _shift_lcf(lam, k, t)
    elif kind in ('pos', 'fixed'):
        spectrum = _shift_pos(lam, t)
    elif kind == 'defm':
        offset = (1.0 - zeta(t)) * (problem.volume ** 0.4 / np.sqrt(6.0)
                                    - problem.background_spectrum())
        spectrum = lam + offset
    else:
        spectrum = lam
    inside = cone_mask(spectrum, k)
    if not np.all(inside):
        _raise_cone(spectrum, inside, k, t)
    margin = cone_margin(spectrum, k)
    if kind == 'lcf':
        margin = np.minimum(margin, cone_margin(lam, k - 1))

    sigma, grad = sigma_and_gradient(spectrum, k)
    lhs = sigma ** (1.0 / k)

    weights = problem.weights
    integral = None
    if kind in ('pos', 'lcf', 'fixed'):
        rhs = _path_target(problem, state.path, t) * np.exp(2.0 * u)
        drhs = 2.0 * rhs
    elif kind == 'defm':
        integral = float(np.sum(np.exp(-5.0 * u) * weights))
        z = zeta(t)
        local = z * problem.target(r, u)
        rhs = (1.0 - t) * integral ** 0.4 + local
        drhs = z * problem.target.derivative(r, u)
    else:
        rhs = problem.target(r, u)
        drhs = problem.target.derivative(r, u)

    R = np.empty(grid.size)
    R[0] = (U[2] - U[0]) / (2.0 * h)
    R[1:-1] = lhs - rhs
    scale_b = np.exp(background[0][-1])
    R[-1] = -scale_b * (U[-1] - U[-3]) / (2.0 * h) + problem.mu_g \
        - problem.mu_hat * np.exp(-U[-2])
    J = None
    if jacobian:
        J = _jacobian(problem, state.path, t, U, lam, spectrum, sigma, grad, drhs, integral)
    return Evaluation(residual=R, spectrum=spectrum, margin=margin, rhs=rhs, jacobian=J)


def _jacobian(problem: RadialProblem, path: PathSpec, t: float, U: np.ndarray,
              lam: np.ndarray, spectrum: np.ndarray, sigma: np.ndarray, grad: np.ndarray,
              drhs: np.ndarray, integral: Optional[float]) -> np.ndarray:
    n, k = problem.n, problem.k
    grid, r = problem.grid, problem.r
    h, size = grid.h, grid.size
    g = (sigma ** (1.0 / k - 1.0) / k)[:, None] * grad
    if path.kind in ('pos', 'fixed'):
        G = g + 0.5 * (1.0 - t) * g.sum(axis=-1, keepdims=True)
    elif path.kind == 'lcf':
        base, dbase = sigma_and_gradient(lam, k - 1)
        ds = (base ** (1.0 / (k - 1) - 1.0) / (k - 1))[:, None] * dbase
        G = g + 0.5 * (1.0 - t) * g.sum(axis=-1, keepdims=True) * ds
    else:
        G = g
    G_r = G[:, 0]
    G_t = G[:, 1:].sum(axis=-1)
    _, du, _ = grid.derivatives(U)
    dr_dp, dr_dq, dt_dp, dt_dq = radial_spectrum_derivatives(r, problem.background, du)
    dp = G_r * dr_dp + G_t * dt_dp
    dq = G_r * dr_dq + G_t * dt_dq
    du_local = -drhs

    J = np.zeros((size, size))
    J[0, 0] = -1.0 / (2.0 * h)
    J[0, 2] = 1.0 / (2.0 * h)
    rows = np.arange(1, size - 1)
    J[rows, rows - 1] += -dp / (2.0 * h) + dq / h ** 2
    J[rows, rows] += -2.0 * dq / h ** 2 + du_local
    J[rows, rows + 1] += dp / (2.0 * h) + dq / h ** 2
    if path.kind == 'defm':
        u = U[1:-1]
        coeff = 2.0 * (1.0 - t) * integral ** -0.6 * np.exp(-5.0 * u) * problem.weights
        J[1:-1, 1:-1] += coeff[None, :]
    scale_b = np.exp(problem.background[0][-1])
    J[-1, -1] = -scale_b / (2.0 * h)
    J[-1, -3] = scale_b / (2.0 * h)
    J[-1, -2] = problem.mu_hat * np.exp(-U[-2])
    return J


def assemble_residual(problem: RadialProblem, state: ContinuationState) -> np.ndarray:
    """残差向量: 中心行 u'(0), 各节点方程, 边界行。"""
    return evaluate(problem, state).residual


def linearized_operator(problem: RadialProblem, state: ContinuationState) -> np.ndarray:
    """残差的 Jacobian, 三对角加 defm 路径的稠密块。"""
    return evaluate(problem, state, jacobian=True).jacobian


def fd_jacobian(problem: RadialProblem, state: ContinuationState,
                step: float = 1e-7) -> np.ndarray:
    """中心差分 Jacobian, 用于核对 linearized_operator。"""
    U = np.asarray(state.U, dtype=float)
    J = np.empty((U.size, U.size))
    for j in range(U.size):
        e = np.zeros_like(U)
        e[j] = step
        plus = assemble_residual(problem, state.with_values(U + e))
        minus = assemble_residual(problem, state.with_values(U - e))
        J[:, j] = (plus - minus) / (2.0 * step)
    return J


def problem_from_config(options: Dict[str, Any], nodes: Optional[int] = None) -> RadialProblem:
    """由 {'n', 'k', 'w', 'target', 'mu_hat'} 构造径向问题。"""
    options = dict(options or {})
    n = int(options.get('n', 4))
    w = ConformalExponent.from_config(options.get('w', 'round'), n)
    return RadialProblem(n=n, k=int(options.get('k', 2)), w=w,
                         target=Target.from_config(options.get('target', 'exp_minus')),
                         mu_hat=float(options.get('mu_hat', 0.0)),
                         nodes=int(nodes or options.get('nodes', config.get('solver.nodes', 201))),
                         name=str(options.get('name', 'radial')))


def hemisphere_constant_solution(n: int = 4, k: int = 2, c: float = 1.0) -> float:
    """σ_k^{1/k}(½e) = c e^{−2u} 的常数解 u* = −½ ln(σ_k^{1/k}(½e)/c)。"""
    value = spectrum_sigmas(np.full(n, 0.5))[k] ** (1.0 / k)
    return float(-0.5 * np.log(value / c))


def path_constant_solution(n: int, k: int, kind: str, t: float, theta: float) -> float:
    """半球面上 pos / lcf 路径的常数解(A = ½g)。"""
    a = np.full((1, n), 0.5)
    shift = (lambda s: _shift_lcf(a, k, s)) if kind == 'lcf' else (lambda s: _shift_pos(a, s))
    now = spectrum_sigmas(shift(t))[0, k] ** (1.0 / k)
    start = spectrum_sigmas(shift(-theta))[0, k] ** (1.0 / k)
    return float(0.5 * np.log(now / start))
