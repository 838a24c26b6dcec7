"""共形变换 ĝ = e^{−2u}g 下的张量

所有边界量都在相应度量的适配正交标准标架下给出:
    Â_ON̂ = e^{2u}Â_ON, L̂ = e^{u}(u_n δ + L), μ̂ = e^{u}(u_n + μ),
    R̂_ON̂ = e^{2u}𝒲_ON + Â_ON̂ ⊙ I,
    dV_ĝ = e^{−nu}dV_g, dS_ĝ = e^{−(n−1)u}dS_g。
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from sigma_yamabe.geom.boundary import BoundarySlice, boundary_frame
from sigma_yamabe.geom.chart import Chart
from sigma_yamabe.geom.curvature import (
    CurvaturePack,
    conformal_schouten,
    conformal_schouten_at,
    kulkarni_nomizu,
    schouten_function,
    to_frame2,
    to_frame4,
    weyl_at,
)
from sigma_yamabe.symfun.functions import matrix_sigmas

ScalarField = Callable[[np.ndarray], np.ndarray]


def zero_field(x: np.ndarray) -> np.ndarray:
    return np.zeros(len(x))


def constant_field(c: float) -> ScalarField:
    return lambda x: np.full(len(x), float(c))


@dataclass(frozen=True)
class BoundaryGeometry:
    """边界节点上 B^k、ℬ、ℒ₄ 所需的标架分量"""

    A_T: np.ndarray
    A_tn: np.ndarray
    A_nn: np.ndarray
    L: np.ndarray
    mu: np.ndarray
    h: np.ndarray
    R_ON: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.A_T.shape[-1] + 1

    @property
    def umbilic_residual(self) -> np.ndarray:
        eye = np.eye(self.n - 1)
        return np.max(np.abs(self.L - self.mu[:, None, None] * eye), axis=(-2, -1))

    @classmethod
    def from_slice(cls, slc: BoundarySlice) -> 'BoundaryGeometry':
        return cls(A_T=slc.A_T, A_tn=slc.A_tn, A_nn=slc.A_nn, L=slc.L, mu=slc.mu, h=slc.h,
                   R_ON=slc.R_ON)

    @classmethod
    def umbilic(cls, A_T: np.ndarray, mu: np.ndarray) -> 'BoundaryGeometry':
        """由 (A^T, μ) 构造 L = μI 的脐边界数据(无法向分量)。"""
        A_T = np.asarray(A_T, dtype=float)
        mu = np.broadcast_to(np.asarray(mu, dtype=float), A_T.shape[:-2]).copy()
        m = A_T.shape[-1]
        L = mu[..., None, None] * np.eye(m)
        zeros = np.zeros(A_T.shape[:-2])
        return cls(A_T=A_T, A_tn=np.zeros(A_T.shape[:-1]), A_nn=zeros, L=L, mu=mu, h=m * mu)


def _hat(A_ON: np.ndarray, W_ON: Optional[np.ndarray], L: np.ndarray, mu: np.ndarray,
         u_b: np.ndarray, u_n: np.ndarray) -> BoundaryGeometry:
    m = L.shape[-1]
    eu = np.exp(u_b)
    A_hat = np.exp(2.0 * u_b)[:, None, None] * A_ON
    L_hat = eu[:, None, None] * (u_n[:, None, None] * np.eye(m) + L)
    mu_hat = eu * (u_n + mu)
    R_hat = None
    if W_ON is not None:
        R_hat = (np.exp(2.0 * u_b)[:, None, None, None, None] * W_ON
                 + kulkarni_nomizu(A_hat, np.eye(m + 1)))
    return BoundaryGeometry(A_T=A_hat[:, :-1, :-1], A_tn=A_hat[:, :-1, -1], A_nn=A_hat[:, -1, -1],
                            L=L_hat, mu=mu_hat, h=np.trace(L_hat, axis1=-2, axis2=-1), R_ON=R_hat)


def boundary_geometry(chart: Chart, x: np.ndarray, u: Optional[ScalarField] = None,
                      with_curvature: bool = False) -> BoundaryGeometry:
    """在任意边界点上求 g(u 缺省)或 ĝ = e^{−2u}g 的边界数据。

    Riemann 分量由 𝒲 + A ⊙ g 重组, 𝒲 取差分值。
    """
    x = np.atleast_2d(x)
    F, L, mu = boundary_frame(chart, x)
    u = u or zero_field
    A = conformal_schouten_at(chart, u, x) if u is not zero_field else schouten_function(chart)(x)
    W_ON = None
    if with_curvature:
        _, W = weyl_at(chart, x)
        W_ON = to_frame4(W, F)
    u_b = u(x)
    du = chart.stencil().gradient(u, x)
    u_n = np.einsum('ni,ni->n', F[:, :, -1], du)
    return _hat(to_frame2(A, F), W_ON, L, mu, u_b, u_n)


@dataclass(frozen=True)
class ConformalState:
    """ĝ = e^{−2u}g 在曲率包节点与边界节点上的量

    Attributes:
        pack: 底度量的曲率包
        slice: 底度量的边界切片(可缺省)
        u: 共形因子
        u_values: 节点上的 u
        A_hat: Â 的降指标坐标分量(相对 g 的坐标)
        boundary: ĝ 的边界数据(相对 ĝ 的标架)
        u_boundary: 边界节点上的 u
    """

    pack: CurvaturePack
    slice: Optional[BoundarySlice]
    u: ScalarField
    u_values: np.ndarray
    A_hat: np.ndarray
    boundary: Optional[BoundaryGeometry]
    u_boundary: Optional[np.ndarray]

    @property
    def chart(self) -> Chart:
        return self.pack.chart

    @property
    def n(self) -> int:
        return self.pack.n

    @property
    def volume_factor(self) -> np.ndarray:
        """dV_ĝ / dV_g = e^{−nu}。"""
        return np.exp(-self.n * self.u_values)

    @property
    def area_factor(self) -> Optional[np.ndarray]:
        """dS_ĝ / dS_g = e^{−(n−1)u}。"""
        if self.u_boundary is None:
            return None
        return np.exp(-(self.n - 1) * self.u_boundary)

    @property
    def mu_hat(self) -> Optional[np.ndarray]:
        return None if self.boundary is None else self.boundary.mu

    @property
    def L_hat(self) -> Optional[np.ndarray]:
        return None if self.boundary is None else self.boundary.L

    @property
    def h_hat(self) -> Optional[np.ndarray]:
        return None if self.boundary is None else self.boundary.h

    def schouten_endomorphism(self) -> np.ndarray:
        """ĝ^{−1}Â = e^{2u}g^{−1}Â。"""
        return np.exp(2.0 * self.u_values)[:, None, None] * (self.pack.g_inv @ self.A_hat)

    def sigma_hat(self, k: int) -> np.ndarray:
        return matrix_sigmas(self.schouten_endomorphism())[:, k]

    def spectrum_hat(self) -> np.ndarray:
        """ĝ 标架下 Â 的特征值, 形状 (N, n)。"""
        E = self.pack.frame()
        return np.linalg.eigvalsh(np.exp(2.0 * self.u_values)[:, None, None]
                                  * to_frame2(self.A_hat, E))

    def with_factor(self, u: ScalarField) -> 'ConformalState':
        return apply_conformal(self.pack, self.slice, u)


def apply_conformal(pack: CurvaturePack, slc: Optional[BoundarySlice],
                    u: Optional[ScalarField] = None) -> ConformalState:
    """将共形因子作用到曲率包与边界切片上

    Args:
        pack: 底度量的曲率包
        slc: 底度量的边界切片, 可为 None
        u: 共形因子, 缺省为 0

    Returns:
        ConformalState: ĝ = e^{−2u}g 的导出量
    """
    u = u or zero_field
    A_hat = conformal_schouten(pack, u)
    boundary = None
    u_b = None
    if slc is not None:
        u_b = u(slc.points)
        u_n = slc.normal_derivative(u)
        W_ON = to_frame4(slc.pack.weyl, slc.frame)
        A_ON = to_frame2(conformal_schouten(slc.pack, u), slc.frame)
        boundary = _hat(A_ON, W_ON, slc.L, slc.mu, u_b, u_n)
    return ConformalState(pack=pack, slice=slc, u=u, u_values=u(pack.points), A_hat=A_hat,
                          boundary=boundary, u_boundary=u_b)
