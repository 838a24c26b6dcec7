"""边界几何

边界切片在边界节点上给出适配正交标准标架 (e_1, ..., e_{n−1}, N)、
第二基本形式 L(X, Y) = g(N, ∇_X Y)、主曲率 μ、平均曲率 h,
以及该标架下的 Schouten 分块与 Riemann 分量。N 为内法向。
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np
import pandas as pd

from sigma_yamabe.config import config
from sigma_yamabe.errors import UmbilicityError, UnsupportedChartError
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.geom.curvature import (
    CurvaturePack,
    build_curvature,
    christoffel,
    conformal_schouten,
    covariant_derivative2,
    to_frame2,
    to_frame4,
)
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

ScalarField = Callable[[np.ndarray], np.ndarray]


# ----------------------------------------------------------------------
# 标架与第二基本形式
# ----------------------------------------------------------------------
def christoffel_at(chart: Chart, x: np.ndarray) -> np.ndarray:
    return christoffel(chart.metric(x), chart.stencil().gradient(chart.metric, x))


def householder_tangents(nu: np.ndarray) -> np.ndarray:
    """欧氏单位向量 ν 的正交补的标准正交基, 形状 (M, n, n−1)。"""
    M, n = nu.shape
    e_n = np.zeros(n)
    e_n[-1] = 1.0
    v = nu - e_n
    norm2 = np.sum(v ** 2, axis=-1)
    H = np.broadcast_to(np.eye(n), (M, n, n)).copy()
    mask = norm2 > 1e-24
    H[mask] -= 2.0 * v[mask, :, None] * v[mask, None, :] / norm2[mask, None, None]
    return H[:, :, :-1]


def _conformal_frame(chart: Chart, x: np.ndarray):
    """共形平坦图册: 标架与主曲率 μ = e^{w}(∂_ν w + μ_δ)。"""
    nu = chart.flat_inner_normal(x)
    ew = np.exp(chart.w(x))
    dw = chart.stencil().gradient(chart.w, x)
    mu = ew * (np.sum(dw * nu, axis=-1) + chart.flat_principal_curvature(x))
    tangents = householder_tangents(nu)
    F = ew[:, None, None] * np.concatenate([tangents, nu[:, :, None]], axis=-1)
    n = chart.n
    L = mu[:, None, None] * np.eye(n - 1)
    return F, L, mu


def _coordinate_face_frame(chart: Chart, x: np.ndarray, gamma: Optional[np.ndarray] = None):
    """坐标面 x_n = const: N = g^{−1}dx^n/√g^{nn}, 切向量由 g_T 的 Cholesky 因子正交化。"""
    n = chart.n
    g = chart.metric(x)
    g_inv = np.linalg.inv(g)
    if gamma is None:
        gamma = christoffel_at(chart, x)
    gnn = g_inv[:, -1, -1]
    N = g_inv[:, :, -1] / np.sqrt(gnn)[:, None]
    C = np.linalg.cholesky(g[:, :-1, :-1])
    Ct = np.swapaxes(np.linalg.inv(C), -1, -2)
    E = np.zeros((len(x), n, n - 1))
    E[:, :-1, :] = Ct
    L_coord = gamma[:, -1, :-1, :-1] / np.sqrt(gnn)[:, None, None]
    L = np.einsum('nab,nac,nbd->ncd', L_coord, Ct, Ct)
    F = np.concatenate([E, N[:, :, None]], axis=-1)
    mu = np.trace(L, axis1=-2, axis2=-1) / (n - 1)
    return F, L, mu


def boundary_frame(chart: Chart, x: np.ndarray):
    """返回 (F, L_ON, μ): F 的列为 e_1..e_{n−1}, N 的坐标分量。"""
    if chart.conformally_flat:
        return _conformal_frame(chart, x)
    return _coordinate_face_frame(chart, x)


def principal_curvature_field(chart: Chart) -> ScalarField:
    """μ̃: 取过各点的水平集的平均主曲率, 作为 μ 的延拓。"""
    return lambda x: boundary_frame(chart, x)[2]


# ----------------------------------------------------------------------
# 边界切片
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class BoundarySlice:
    """边界节点上的几何量, 张量均在适配标架下

    Attributes:
        chart: 图册
        pack: 边界节点上的曲率包
        frame: (M, n, n) 标架, 末列为内法向 N
        L: 第二基本形式 (M, n−1, n−1)
        mu: 主曲率 h/(n−1)
        h: 平均曲率 tr L
        A_T, A_tn, A_nn: Schouten 分块
        R_ON: 标架下的 Riemann 张量
        umbilic_residual: max|L − μI|
    """

    chart: Chart
    pack: CurvaturePack
    frame: np.ndarray
    L: np.ndarray
    mu: np.ndarray
    h: np.ndarray
    A_T: np.ndarray
    A_tn: np.ndarray
    A_nn: np.ndarray
    R_ON: np.ndarray
    umbilic_residual: np.ndarray

    @property
    def n(self) -> int:
        return self.chart.n

    @property
    def points(self) -> np.ndarray:
        return self.pack.points

    @property
    def normal(self) -> np.ndarray:
        return self.frame[:, :, -1]

    @property
    def tangents(self) -> np.ndarray:
        return self.frame[:, :, :-1]

    @property
    def umbilic(self) -> bool:
        return float(np.max(self.umbilic_residual)) <= config.get('geom.umbilic_tolerance', 1e-6)

    def mu_field(self) -> ScalarField:
        return principal_curvature_field(self.chart)

    def tangential_gradient(self, f: ScalarField) -> np.ndarray:
        """e_α(f), 形状 (M, n−1)。"""
        df = self.chart.stencil().gradient(f, self.points)
        return np.einsum('nia,ni->na', self.tangents, df)

    def normal_derivative(self, f: ScalarField) -> np.ndarray:
        df = self.chart.stencil().gradient(f, self.points)
        return np.einsum('ni,ni->n', self.normal, df)

    def intrinsic_hessian(self, f: ScalarField) -> np.ndarray:
        """边界内蕴 Hessian: E^T(∂²f − Γ·∂f)E + L N(f)。"""
        x = self.points
        stencil = self.chart.stencil()
        df = stencil.gradient(f, x)
        hess = stencil.hessian(f, x) - np.einsum('nkij,nk->nij', self.pack.christoffel, df)
        E = self.tangents
        Nf = np.einsum('ni,ni->n', self.normal, df)
        return np.einsum('nia,njb,nij->nab', E, E, hess) + self.L * Nf[:, None, None]

    def to_frame(self) -> pd.DataFrame:
        rows = {'mu': self.mu, 'h': self.h, 'A_nn': self.A_nn,
                'umbilic_residual': self.umbilic_residual}
        df = pd.DataFrame(self.points, columns=[f'x{i}' for i in range(self.n)])
        for key, value in rows.items():
            df[key] = value
        return df


def build_boundary(chart: Chart, pack: Optional[CurvaturePack] = None,
                   points: Optional[np.ndarray] = None, require_umbilic: bool = False,
                   seed: int = 0) -> BoundarySlice:
    """构造边界切片

    Args:
        chart: 图册
        pack: 边界节点上的曲率包; 缺省时在 points(或边界探测点)上构造
        points: 边界节点
        require_umbilic: 为 True 时非脐边界抛出 UmbilicityError
        seed: 边界探测点种子

    Returns:
        BoundarySlice: 边界切片
    """
    if pack is None:
        if points is None:
            points = chart.boundary_probe_points(int(config.get('geom.probe_points', 64)), seed)
        pack = build_curvature(chart, points)
    x = pack.points
    n = chart.n

    if chart.conformally_flat:
        F, L, mu = _conformal_frame(chart, x)
    else:
        F, L, mu = _coordinate_face_frame(chart, x, pack.christoffel)
    h = np.trace(L, axis1=-2, axis2=-1)
    umbilic_residual = np.max(np.abs(L - mu[:, None, None] * np.eye(n - 1)), axis=(-2, -1))
    if require_umbilic:
        worst = float(np.max(umbilic_residual))
        if worst > config.get('geom.umbilic_tolerance', 1e-6):
            raise UmbilicityError(f"边界不是全脐的: 残差 {worst:.3e}", residual=worst)

    A_ON = to_frame2(pack.schouten, F)
    slc = BoundarySlice(
        chart=chart, pack=pack, frame=F, L=L, mu=mu, h=h,
        A_T=A_ON[:, :-1, :-1], A_tn=A_ON[:, :-1, -1], A_nn=A_ON[:, -1, -1],
        R_ON=to_frame4(pack.riemann, F), umbilic_residual=umbilic_residual)
    logger.debug(f"边界切片 {chart.name or chart.kind}: {len(x)} 个节点, "
                 f"max|μ|={np.max(np.abs(mu)):.3e}")
    return slc


# ----------------------------------------------------------------------
# 边界恒等式
# ----------------------------------------------------------------------
def _frame_derivative(slc: BoundarySlice) -> np.ndarray:
    """标架下的 A_{ab,c}。"""
    F = slc.frame
    return np.einsum('nia,njb,nkc,nijk->nabc', F, F, F, slc.pack.schouten_derivative,
                     optimize=True)


def check_boundary_identities(slc: BoundarySlice, pack: Optional[CurvaturePack] = None
                              ) -> Dict[str, float]:
    """边界恒等式的最大残差

    (a) A_{αn} = μ_α
    (b) μ_{α̃β̃} = A_{αn,β} + A_{nn}μδ_{αβ} − A_{αβ}μ
    (c) 当 𝒲 = 𝒞 = 0: R_{nαnβ} = A_{αβ} + A_{nn}δ_{αβ},
        A_{αβ,n} − 2μA_{αβ} = μ_{α̃β̃} − R_{αnβn}μ

    Returns:
        Dict[str, float]: a, b, c_curvature, c_normal 及切片上的 |𝒲|、|𝒞|
    """
    pack = pack or slc.pack
    n = slc.n
    eye = np.eye(n - 1)
    mu = slc.mu
    mu_fn = slc.mu_field()
    mu_t = slc.tangential_gradient(mu_fn)
    mu_hess = slc.intrinsic_hessian(mu_fn)
    D = _frame_derivative(slc)
    R = slc.R_ON
    t = slice(0, n - 1)

    res_a = slc.A_tn - mu_t
    A_an_b = D[:, t, -1, t]
    res_b = mu_hess - (A_an_b + (slc.A_nn * mu)[:, None, None] * eye
                       - slc.A_T * mu[:, None, None])
    R_nanb = R[:, -1, t, -1, t]
    res_c1 = R_nanb - (slc.A_T + slc.A_nn[:, None, None] * eye)
    A_ab_n = D[:, t, t, -1]
    R_anbn = R[:, t, -1, t, -1]
    res_c2 = (A_ab_n - 2.0 * mu[:, None, None] * slc.A_T) - (mu_hess - R_anbn * mu[:, None, None])

    report = {
        'a': float(np.max(np.abs(res_a))),
        'b': float(np.max(np.abs(res_b))),
        'c_curvature': float(np.max(np.abs(res_c1))),
        'c_normal': float(np.max(np.abs(res_c2))),
        'weyl': float(np.sqrt(np.max(pack.weyl_norm_sq()))),
        'cotton': float(np.max(pack.cotton_norm())),
        'umbilic_residual': float(np.max(slc.umbilic_residual)),
    }
    logger.debug(f"边界恒等式残差: {report}")
    return report


def check_structure_t(slc: BoundarySlice, S: Optional[np.ndarray] = None,
                      S_derivative: Optional[np.ndarray] = None) -> Dict[str, float]:
    """S 在脐边界上的结构条件

    (T0) S 对称; (T1) S_{αn} = μ_α; (T2) S_{αβ,n} − 2μS_{αβ} = μ_{α̃β̃} − R_{αnβn}μ。
    缺省 S = A(降指标坐标分量), 其协变导数取自曲率包。
    """
    n = slc.n
    F = slc.frame
    S = slc.pack.schouten if S is None else S
    D = slc.pack.schouten_derivative if S_derivative is None else S_derivative
    S_ON = to_frame2(S, F)
    D_ON = np.einsum('nia,njb,nkc,nijk->nabc', F, F, F, D, optimize=True)
    t = slice(0, n - 1)
    mu = slc.mu
    mu_fn = slc.mu_field()
    mu_hess = slc.intrinsic_hessian(mu_fn)
    R_anbn = slc.R_ON[:, t, -1, t, -1]

    t0 = S_ON - np.swapaxes(S_ON, -1, -2)
    t1 = S_ON[:, t, -1] - slc.tangential_gradient(mu_fn)
    t2 = (D_ON[:, t, t, -1] - 2.0 * mu[:, None, None] * S_ON[:, t, t]
          - (mu_hess - R_anbn * mu[:, None, None]))
    return {'T0': float(np.max(np.abs(t0))),
            'T1': float(np.max(np.abs(t1))),
            'T2': float(np.max(np.abs(t2)))}


def fermi_christoffels(slc: BoundarySlice, tol: float = 1e-10) -> pd.DataFrame:
    """Fermi 坐标下脐边界的 Christoffel 符号

    预期值 Γ^n_{αβ} = μg_{αβ}, Γ^β_{αn} = −μδ_{αβ}, Γ^n_{αn} = 0,
    以及 Γ̃^γ_{αβ} = Γ^γ_{αβ}; 与曲率包的差分值比较。

    Raises:
        UnsupportedChartError: 图册不是 Fermi 形式 (g_nn = 1, g_αn = 0)
    """
    chart = slc.chart
    if chart.kind == 'ball_conformally_flat':
        raise UnsupportedChartError("球坐标卡的边界不是坐标面, 没有 Fermi 形式")
    x = slc.points
    g = slc.pack.g
    off = max(float(np.max(np.abs(g[:, -1, -1] - 1.0))), float(np.max(np.abs(g[:, :-1, -1]))))
    # 法向一阶导数也需满足 Fermi 形式
    dg = chart.stencil().gradient(chart.metric, x)
    off = max(off, float(np.max(np.abs(dg[:, :, -1, -1]))), float(np.max(np.abs(dg[:, :, :-1, -1]))))
    if off > max(tol, 1e-8):
        raise UnsupportedChartError(f"图册不是 Fermi 形式: 偏差 {off:.3e}")

    n = chart.n
    gamma = slc.pack.christoffel
    mu = slc.mu[:, None, None]
    g_T = g[:, :-1, :-1]
    eye = np.eye(n - 1)
    expected = {
        'Gamma^n_ab': (gamma[:, -1, :-1, :-1], mu * g_T),
        'Gamma^b_an': (np.swapaxes(gamma[:, :-1, :-1, -1], -1, -2), -mu * eye),
        'Gamma^n_an': (gamma[:, -1, :-1, -1], np.zeros((len(x), n - 1))),
        'Gamma~^c_ab': (gamma[:, :-1, :-1, :-1], christoffel(g_T, dg[:, :-1, :-1, :-1])),
    }
    rows = []
    for symbol, (fd, exact) in expected.items():
        rows.append({'symbol': symbol,
                     'max_abs': float(np.max(np.abs(exact))),
                     'residual': float(np.max(np.abs(fd - exact)))})
    return pd.DataFrame(rows)


# ----------------------------------------------------------------------
# 法向导数恒等式与边界 Bianchi 恒等式
# ----------------------------------------------------------------------
def covariant_hessian_field(chart: Chart, u: ScalarField) -> Callable[[np.ndarray], np.ndarray]:
    """x -> ∇²u(x) 的坐标分量。"""
    def hess(x):
        stencil = chart.stencil()
        du = stencil.gradient(u, x)
        return stencil.hessian(u, x) - np.einsum('nkij,nk->nij', christoffel_at(chart, x), du)
    return hess


def compatible_factor(chart: Chart, u0: ScalarField, mu_hat: float,
                      q: Optional[ScalarField] = None) -> ScalarField:
    """半球面上满足 N(u) = −μ + μ̂e^{−u} 的函数

    u = u0(x') + x_n e^{−w(x',0)}(−μ(x') + μ̂e^{−u0}) + x_n² q(x')。
    """
    if chart.kind != 'half_ball_flat':
        raise UnsupportedChartError("只在共形平坦半球面上构造")
    mu_fn = principal_curvature_field(chart)

    def face(x):
        y = x.copy()
        y[:, -1] = 0.0
        return y

    def u(x):
        y = face(x)
        base = u0(y)
        slope = np.exp(-chart.w(y)) * (-mu_fn(y) + mu_hat * np.exp(-base))
        extra = 0.0 if q is None else q(y)
        return base + x[:, -1] * slope + x[:, -1] ** 2 * extra
    return u


def check_normal_derivative_identities(slc: BoundarySlice, u: ScalarField,
                                       mu_hat: float) -> Dict[str, float]:
    """对满足 u_n = −μ + μ̂e^{−u} 的 u 检验两条法向导数恒等式

    u_{nα} = −μ_α + μu_α − μ̂u_αe^{−u};
    u_{αβn} = (2μ − μ̂e^{−u})u_{αβ} − μu_{nn}δ + μ̂u_αu_βe^{−u} − μ_{α̃β̃}
              + μ_αu_β + μ_βu_α − μ_γu_γδ + R_{nβαn}(−μ + μ̂e^{−u})
              − μ(−μ + μ̂e^{−u})²δ。
    只在脐边界上成立。
    """
    chart = slc.chart
    x = slc.points
    n = slc.n
    t = slice(0, n - 1)
    eye = np.eye(n - 1)
    F = slc.frame
    mu = slc.mu
    mu_fn = slc.mu_field()
    mu_t = slc.tangential_gradient(mu_fn)
    mu_hess = slc.intrinsic_hessian(mu_fn)

    uval = u(x)
    eu = mu_hat * np.exp(-uval)
    du = chart.stencil().gradient(u, x)
    du_ON = np.einsum('nia,ni->na', F, du)
    u_t = du_ON[:, t]
    u_n = du_ON[:, -1]

    hess_fn = covariant_hessian_field(chart, u)
    H = hess_fn(x)
    H_ON = to_frame2(H, F)
    dH = chart.stencil().gradient(hess_fn, x)
    D = covariant_derivative2(H, dH, slc.pack.christoffel)
    D_ON = np.einsum('nia,njb,nkc,nijk->nabc', F, F, F, D, optimize=True)

    bc = u_n - (-mu + eu)
    nga = H_ON[:, -1, t] - (-mu_t + mu[:, None] * u_t - eu[:, None] * u_t)

    s = (-mu + eu)[:, None, None]
    rhs = ((2.0 * mu - eu)[:, None, None] * H_ON[:, t, t]
           - (mu * H_ON[:, -1, -1])[:, None, None] * eye
           + eu[:, None, None] * u_t[:, :, None] * u_t[:, None, :]
           - mu_hess
           + mu_t[:, :, None] * u_t[:, None, :] + u_t[:, :, None] * mu_t[:, None, :]
           - np.sum(mu_t * u_t, axis=-1)[:, None, None] * eye
           + np.swapaxes(slc.R_ON[:, -1, t, t, -1], -1, -2) * s
           - mu[:, None, None] * s ** 2 * eye)
    ngagb = D_ON[:, t, t, -1] - rhs
    return {'boundary_condition': float(np.max(np.abs(bc))),
            'nga': float(np.max(np.abs(nga))),
            'ngagb': float(np.max(np.abs(ngagb)))}


def check_boundary_bianchi(slc: BoundarySlice, u: ScalarField) -> Dict[str, float]:
    """边界 Bianchi 恒等式: 当 L̂ = 0 (即 u_n = −μ) 时
    Σ_α [(∇_N Â)(e_α, e_α) − 2μÂ(e_α, e_α)] = 0。"""
    chart = slc.chart
    x = slc.points
    F = slc.frame
    n = slc.n
    t = slice(0, n - 1)

    def A_hat(p):
        return conformal_schouten(slc.pack, u, p)

    Ah = A_hat(x)
    dAh = chart.stencil().gradient(A_hat, x)
    D = covariant_derivative2(Ah, dAh, slc.pack.christoffel)
    D_ON = np.einsum('nia,njb,nkc,nijk->nabc', F, F, F, D, optimize=True)
    A_ON = to_frame2(Ah, F)
    trace_n = np.trace(D_ON[:, t, t, -1], axis1=-2, axis2=-1)
    trace_A = np.trace(A_ON[:, t, t], axis1=-2, axis2=-1)
    residual = trace_n - 2.0 * slc.mu * trace_A
    u_n = slc.normal_derivative(u)
    return {'second_form': float(np.max(np.abs(u_n + slc.mu))),
            'bianchi': float(np.max(np.abs(residual))),
            'scale': float(np.max(np.abs(trace_n)))}
