"""曲率计算

由度量分量的有限差分得到 Christoffel 符号、Riemann、Ricci、数量曲率、
Schouten、Weyl 与 Cotton 张量。共形平坦图册上 Schouten 张量由共形指数 w
精确给出, 通用差分管线保留为交叉检验。

指标约定: R_{ijkl} 全降指标, 球面 R_{1212} = K > 0;
Ric_{jl} = g^{ik}R_{ijkl}; Γ 存为 [N, k, i, j] 即 Γ^k_{ij}。
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Union

import numpy as np

from sigma_yamabe.config import config
from sigma_yamabe.errors import DomainError, GeometryError
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.symfun.functions import matrix_sigmas
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)


# ----------------------------------------------------------------------
# 张量代数
# ----------------------------------------------------------------------
def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h ⊙ k)_{ijkl} = h_ik k_jl + h_jl k_ik − h_il k_jk − h_jk k_il。"""
    return (np.einsum('...ik,...jl->...ijkl', h, k)
            + np.einsum('...jl,...ik->...ijkl', h, k)
            - np.einsum('...il,...jk->...ijkl', h, k)
            - np.einsum('...jk,...il->...ijkl', h, k))


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """列为 g-正交标准基的矩阵 E, 满足 E^T g E = I。"""
    L = np.linalg.cholesky(g)
    eye = np.broadcast_to(np.eye(g.shape[-1]), g.shape)
    return np.swapaxes(np.linalg.solve(L, eye), -1, -2)


def to_frame2(T: np.ndarray, E: np.ndarray) -> np.ndarray:
    return np.einsum('...ia,...jb,...ij->...ab', E, E, T)


def to_frame4(T: np.ndarray, E: np.ndarray) -> np.ndarray:
    return np.einsum('...ia,...jb,...kc,...ld,...ijkl->...abcd', E, E, E, E, T, optimize=True)


def christoffel(g: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Γ^e_{bc}, dg[N, c, a, b] = ∂_c g_ab。"""
    lower = 0.5 * (np.einsum('nbac->nabc', dg) + np.einsum('ncab->nabc', dg) - dg)
    return np.einsum('nea,nabc->nebc', np.linalg.inv(g), lower)


def riemann_from_jets(g: np.ndarray, gamma: np.ndarray, ddg: np.ndarray) -> np.ndarray:
    """ddg[N, c, d, a, b] = ∂_c ∂_d g_ab。"""
    second = 0.5 * (np.einsum('nbcad->nabcd', ddg) + np.einsum('nadbc->nabcd', ddg)
                    - np.einsum('nacbd->nabcd', ddg) - np.einsum('nbdac->nabcd', ddg))
    quadratic = (np.einsum('nef,nebc,nfad->nabcd', g, gamma, gamma, optimize=True)
                 - np.einsum('nef,nebd,nfac->nabcd', g, gamma, gamma, optimize=True))
    return second + quadratic


def schouten_from_ricci(g: np.ndarray, ricci: np.ndarray, scalar: np.ndarray) -> np.ndarray:
    n = g.shape[-1]
    if n < 3:
        raise DomainError(f"Schouten 张量需要 n >= 3, 得到 n={n}")
    return (ricci - scalar[:, None, None] * g / (2.0 * (n - 1))) / (n - 2)


def _check_positive(chart: Chart, x: np.ndarray, g: np.ndarray, offset: int = 0) -> None:
    eig = np.linalg.eigvalsh(g)
    bad = np.nonzero(eig[:, 0] <= 0)[0]
    if len(bad):
        i = int(bad[0])
        raise GeometryError(
            f"度量在节点 {offset + i} 处非正定 (最小特征值 {eig[i, 0]:.3e})",
            node=offset + i, point=x[i].tolist())


# ----------------------------------------------------------------------
# 逐点计算
# ----------------------------------------------------------------------
def metric_jets(chart: Chart, x: np.ndarray):
    stencil = chart.stencil()
    g = chart.metric(x)
    return g, stencil.gradient(chart.metric, x), stencil.hessian(chart.metric, x)


def curvature_at(chart: Chart, x: np.ndarray) -> Dict[str, np.ndarray]:
    """逐点的差分曲率, 不含 Cotton。"""
    g, dg, ddg = metric_jets(chart, x)
    gamma = christoffel(g, dg)
    riem = riemann_from_jets(g, gamma, ddg)
    g_inv = np.linalg.inv(g)
    ricci = np.einsum('nik,nijkl->njl', g_inv, riem)
    scalar = np.einsum('njl,njl->n', g_inv, ricci)
    return {'g': g, 'g_inv': g_inv, 'christoffel': gamma, 'riemann': riem,
            'ricci': ricci, 'scalar': scalar,
            'schouten_fd': schouten_from_ricci(g, ricci, scalar)}


def weyl_at(chart: Chart, x: np.ndarray):
    """返回 (g, 𝒲) 的降指标分量, 不构造完整曲率包。"""
    base = curvature_at(chart, x)
    return base['g'], base['riemann'] - kulkarni_nomizu(base['schouten_fd'], base['g'])


def exact_conformal_schouten(chart: Chart, v: Callable[[np.ndarray], np.ndarray],
                             x: np.ndarray) -> np.ndarray:
    """g = e^{−2v}δ 的 Schouten 张量 D²v + dv⊗dv − ½|Dv|²δ。"""
    stencil = chart.stencil()
    dv = stencil.gradient(v, x)
    ddv = stencil.hessian(v, x)
    sq = np.sum(dv ** 2, axis=-1)
    return ddv + dv[:, :, None] * dv[:, None, :] - 0.5 * sq[:, None, None] * np.eye(chart.n)


def schouten_function(chart: Chart) -> Callable[[np.ndarray], np.ndarray]:
    """点 -> A_{ij} 的求值函数。"""
    if chart.conformally_flat:
        return lambda x: exact_conformal_schouten(chart, chart.w, x)
    return lambda x: curvature_at(chart, x)['schouten_fd']


def covariant_derivative2(T: np.ndarray, dT: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """二阶协变张量的 D[a, b, c] = T_{ab,c}; dT[N, c, a, b] = ∂_c T_ab。"""
    return (np.einsum('ncab->nabc', dT)
            - np.einsum('neca,neb->nabc', gamma, T)
            - np.einsum('necb,nae->nabc', gamma, T))


def _evaluate_batch(chart: Chart, x: np.ndarray) -> Dict[str, np.ndarray]:
    base = curvature_at(chart, x)
    A_fn = schouten_function(chart)
    A = A_fn(x) if chart.conformally_flat else base['schouten_fd']
    dA = chart.stencil().gradient(A_fn, x)
    D = covariant_derivative2(A, dA, base['christoffel'])
    base['schouten'] = A
    base['schouten_derivative'] = D
    base['weyl'] = base['riemann'] - kulkarni_nomizu(base['schouten_fd'], base['g'])
    base['cotton'] = D - np.swapaxes(D, -1, -2)
    return base


# ----------------------------------------------------------------------
# 曲率包
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class CurvaturePack:
    """节点上的曲率场

    Attributes:
        chart: 来源图册
        points: 节点坐标 (N, n)
        g, g_inv: 度量及其逆
        christoffel: Γ^k_{ij}, 形状 (N, n, n, n)
        riemann, weyl: 全降指标四阶张量
        ricci, schouten: 二阶张量; schouten_fd 为通用差分管线的结果
        scalar: 数量曲率
        schouten_derivative: A_{ab,c}
        cotton: 𝒞_{abc} = A_{ab,c} − A_{ac,b}
    """

    chart: Chart
    points: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    schouten: np.ndarray
    schouten_fd: np.ndarray
    schouten_derivative: np.ndarray
    weyl: np.ndarray
    cotton: np.ndarray
    meta: Dict[str, float] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.chart.n

    def __len__(self) -> int:
        return len(self.points)

    def fields(self) -> Dict[str, np.ndarray]:
        """导出用的全部张量场。"""
        return {
            'g': self.g, 'ricci': self.ricci, 'R': self.scalar, 'A': self.schouten,
            'riemann': self.riemann, 'weyl': self.weyl, 'cotton': self.cotton,
        }

    def grid_field(self, name: str) -> np.ndarray:
        """网格曲率包中的场, 还原为 (resolution,)*n + 分量形状。

        Raises:
            DomainError: 曲率包不是建立在 chart.grid_points() 上
        """
        values = getattr(self, name)
        shape = (self.chart.resolution,) * self.n
        if len(values) != int(np.prod(shape)):
            raise DomainError(f"曲率包有 {len(values)} 个节点, 不是 {shape} 网格")
        return values.reshape(shape + values.shape[1:])

    def frame(self) -> np.ndarray:
        return orthonormal_frame(self.g)

    def schouten_endomorphism(self) -> np.ndarray:
        """g^{−1}A: 其特征值即 Schouten 张量的谱。"""
        return self.g_inv @ self.schouten

    def schouten_spectrum(self) -> np.ndarray:
        E = self.frame()
        return np.linalg.eigvalsh(to_frame2(self.schouten, E))

    def sigma_schouten(self, k: int) -> np.ndarray:
        """σ_k(g^{−1}A), 形状 (N,)。"""
        if not 0 <= k <= self.n:
            raise DomainError(f"k={k} 超出范围 [0, {self.n}]")
        return matrix_sigmas(self.schouten_endomorphism())[:, k]

    def weyl_norm_sq(self) -> np.ndarray:
        """|𝒲|² = 𝒲_{ijkl}𝒲^{ijkl}。"""
        W = to_frame4(self.weyl, self.frame())
        return np.einsum('nabcd,nabcd->n', W, W)

    def cotton_norm(self) -> np.ndarray:
        E = self.frame()
        C = np.einsum('nia,njb,nkc,nijk->nabc', E, E, E, self.cotton, optimize=True)
        return np.sqrt(np.einsum('nabc,nabc->n', C, C))

    def traceless_ricci_norm_sq(self) -> np.ndarray:
        E = self.ricci - self.scalar[:, None, None] * self.g / self.n
        M = self.g_inv @ E
        return np.einsum('nij,nji->n', M, M)

    def sigma2_decomposition_residual(self) -> float:
        """n = 4 时 σ_2(A) = (R²/12 − |E|²)/8 的最大残差。"""
        if self.n != 4:
            raise DomainError("σ_2 分解仅适用于 n = 4")
        rhs = (self.scalar ** 2 / 12.0 - self.traceless_ricci_norm_sq()) / 8.0
        return float(np.max(np.abs(self.sigma_schouten(2) - rhs)))

    def decomposition_residual(self) -> float:
        """max |R − 𝒲 − A ⊙ g|。"""
        rest = self.riemann - self.weyl - kulkarni_nomizu(self.schouten, self.g)
        return float(np.max(np.abs(rest)))

    def schouten_consistency(self) -> float:
        """精确 Schouten 与差分管线之差。"""
        return float(np.max(np.abs(self.schouten - self.schouten_fd)))

    def symmetry_residuals(self) -> Dict[str, float]:
        R = self.riemann
        residuals = {
            'antisym_ab': R + np.swapaxes(R, 1, 2),
            'antisym_cd': R + np.swapaxes(R, 3, 4),
            'pair': R - np.transpose(R, (0, 3, 4, 1, 2)),
            'bianchi': R + np.transpose(R, (0, 1, 3, 4, 2)) + np.transpose(R, (0, 1, 4, 2, 3)),
        }
        return {name: float(np.max(np.abs(value))) for name, value in residuals.items()}


def build_curvature(chart: Chart, points: Union[np.ndarray, str, None] = None,
                    workers: Optional[int] = None, seed: int = 0) -> CurvaturePack:
    """在节点上构造曲率包

    Args:
        chart: 图册
        points: 节点 (N, n); 'grid' 取 chart.grid_points() 的节点主序网格;
            默认取可复现的内部探测点
        workers: 并发线程数, 结果与求值顺序无关
        seed: 默认探测点的种子

    Returns:
        CurvaturePack: 曲率包

    Raises:
        GeometryError: 某节点度量非正定
    """
    if chart.n < 3:
        raise DomainError(f"曲率包需要 n >= 3, 得到 n={chart.n}")
    if isinstance(points, str):
        if points != 'grid':
            raise DomainError(f"未知的节点选择 {points!r}")
        points = chart.grid_points()
    elif points is None:
        points = chart.probe_points(int(config.get('geom.probe_points', 64)), seed=seed)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    _check_positive(chart, points, chart.metric(points))

    batch = int(config.get('geom.batch_size', 2048))
    chunks = [points[i:i + batch] for i in range(0, len(points), batch)]
    workers = int(workers or config.get('geom.workers', 1))
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda x: _evaluate_batch(chart, x), chunks))
    else:
        results = [_evaluate_batch(chart, x) for x in chunks]
    merged = {key: np.concatenate([r[key] for r in results]) for key in results[0]}

    pack = CurvaturePack(chart=chart, points=points, **merged)
    logger.debug(f"曲率包 {chart.name or chart.kind}: {len(points)} 个节点, h={chart.h[0]:.4g}")
    return pack


def conformal_schouten_at(chart: Chart, u: Callable[[np.ndarray], np.ndarray],
                          x: np.ndarray) -> np.ndarray:
    """Â = ∇²u + du⊗du − ½|∇u|²g + A_g 在任意点的降指标分量

    共形平坦图册上用 v = w + u 的平坦公式; 其余图册用协变 Hessian。
    """
    x = np.atleast_2d(x)
    if chart.conformally_flat:
        return exact_conformal_schouten(chart, lambda p: chart.w(p) + u(p), x)
    base = curvature_at(chart, x)
    return _conformal_shift(chart, u, x, base['g'], base['g_inv'], base['christoffel'],
                            base['schouten_fd'])


def _conformal_shift(chart, u, x, g, g_inv, gamma, A):
    stencil = chart.stencil()
    du = stencil.gradient(u, x)
    hess = stencil.hessian(u, x) - np.einsum('nkij,nk->nij', gamma, du)
    sq = np.einsum('ni,nij,nj->n', du, g_inv, du)
    return hess + du[:, :, None] * du[:, None, :] - 0.5 * sq[:, None, None] * g + A


def conformal_schouten(pack: CurvaturePack, u: Callable[[np.ndarray], np.ndarray],
                       points: Optional[np.ndarray] = None) -> np.ndarray:
    """ĝ = e^{−2u}g 的 Schouten 张量, 缺省在曲率包节点上求值。"""
    chart = pack.chart
    if points is not None or chart.conformally_flat:
        return conformal_schouten_at(chart, u, pack.points if points is None else points)
    return _conformal_shift(chart, u, pack.points, pack.g, pack.g_inv, pack.christoffel,
                            pack.schouten)
