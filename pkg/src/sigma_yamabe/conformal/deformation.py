"""形变张量 A^t = A + ((1−t)/2)(tr_g A)g

t = 1 时回到 A; t 取 −Θ(Θ 充分大)时正曲率背景上 A^{−Θ} 正定。
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from sigma_yamabe.errors import DomainError
from sigma_yamabe.geom.curvature import CurvaturePack, conformal_schouten, to_frame2
from sigma_yamabe.symfun.functions import matrix_sigmas


def _check_parameter(t: float, theta: float) -> None:
    if theta < 0:
        raise DomainError(f"θ 必须非负, 得到 θ={theta}")
    if not -theta <= t <= 1.0:
        raise DomainError(f"形变参数需要 −θ <= t <= 1, 得到 t={t}, θ={theta}")


def deform(A: np.ndarray, g: np.ndarray, g_inv: np.ndarray, t: float) -> np.ndarray:
    """逐点 A + ((1−t)/2)(tr_g A)g。"""
    trace = np.einsum('...ij,...ij->...', g_inv, A)
    return A + 0.5 * (1.0 - t) * trace[..., None, None] * g


@dataclass(frozen=True)
class DeformedTensor:
    """形变张量场

    Attributes:
        t: 形变参数
        theta: 参数下界 −θ
        values: A^t 的降指标坐标分量, 形状 (N, n, n)
        g: 度量
        g_inv: 逆度量
        offset: 附加的 S(x), 无则为 None
    """

    t: float
    theta: float
    values: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    offset: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.values.shape[-1]

    def trace(self) -> np.ndarray:
        return np.einsum('nij,nij->n', self.g_inv, self.values)

    def endomorphism(self) -> np.ndarray:
        return self.g_inv @ self.values

    def sigma(self, k: int) -> np.ndarray:
        return matrix_sigmas(self.endomorphism())[:, k]

    def spectrum(self, frame: np.ndarray) -> np.ndarray:
        """正交标架 frame 下的特征值, 升序。"""
        return np.linalg.eigvalsh(to_frame2(self.values, frame))

    def positive_definite(self, frame: np.ndarray, margin: float = 0.0) -> bool:
        return bool(np.all(self.spectrum(frame)[:, 0] > margin))


def deformed_tensor(pack: CurvaturePack, t: float, theta: float = 0.0,
                    S: Optional[np.ndarray] = None) -> DeformedTensor:
    """曲率包节点上的 A^t (+ S)

    Args:
        pack: 曲率包
        t: 形变参数
        theta: 允许的下界为 −θ
        S: 可选的附加对称张量场, 形状 (N, n, n)

    Raises:
        DomainError: t 不在 [−θ, 1] 内
    """
    _check_parameter(t, theta)
    values = deform(pack.schouten, pack.g, pack.g_inv, t)
    if S is not None:
        values = values + S
    return DeformedTensor(t=float(t), theta=float(theta), values=values, g=pack.g,
                          g_inv=pack.g_inv, offset=S)


def deformed_conformal_schouten(pack: CurvaturePack, u: Callable[[np.ndarray], np.ndarray],
                                t: float, theta: float = 0.0) -> DeformedTensor:
    """Â^t = Â + ((1−t)/2)(tr_g Â)g

    展开即 ∇²u + du⊗du − ½|∇u|²g + ((1−t)/2)(Δu − ((n−2)/2)|∇u|²)g + A^t。
    """
    _check_parameter(t, theta)
    A_hat = conformal_schouten(pack, u)
    return DeformedTensor(t=float(t), theta=float(theta),
                          values=deform(A_hat, pack.g, pack.g_inv, t), g=pack.g,
                          g_inv=pack.g_inv)


def theta_tensor_four(pack: CurvaturePack, theta: float) -> np.ndarray:
    """n = 4 时 A^{−Θ} = ½(Ric + (Θ/6)Rg)。"""
    if pack.n != 4:
        raise DomainError(f"A^{{−Θ}} 的闭式只在 n = 4 时成立, 得到 n={pack.n}")
    return 0.5 * (pack.ricci + theta / 6.0 * pack.scalar[:, None, None] * pack.g)


def sigma2_four_expansion(A: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray]:
    """n = 4 正交标架下的 (σ_2(A^t), σ_2(A) + (3/2)(1−t)(2−t)σ_1(A)²)。"""
    A = np.asarray(A, dtype=float)
    if A.shape[-1] != 4:
        raise DomainError(f"展开式只在 n = 4 时成立, 得到 n={A.shape[-1]}")
    eye = np.eye(4)
    direct = matrix_sigmas(deform(A, eye, eye, t))[..., 2]
    sig = matrix_sigmas(A)
    closed = sig[..., 2] + 1.5 * (1.0 - t) * (2.0 - t) * sig[..., 1] ** 2
    return direct, closed
