"""Gårding锥与归一化算子

F(λ) = C(n,k)^{−1/k} σ_k(λ)^{1/k}, F(e) = 1。
结构条件 S0–S3 与条件 (A) 通过锥内随机采样检验。
"""

from typing import Optional, Tuple, Union

import numpy as np
from scipy.special import comb

from sigma_yamabe.config import config
from sigma_yamabe.errors import ConeViolationError, DomainError, SamplingError
from sigma_yamabe.models.tensors import ConeTag, Spectrum, StructureReport
from sigma_yamabe.symfun.functions import sigma_and_gradient, sigma_hessian, spectrum_sigmas
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)


def _values(lam: Union[Spectrum, np.ndarray]) -> np.ndarray:
    return lam.values if isinstance(lam, Spectrum) else np.asarray(lam, dtype=float)


def _check_k(k: int, n: int) -> None:
    if k < 1 or k > n:
        raise DomainError(f"k={k} 超出范围 [1, {n}]")


def cone_thresholds(values: np.ndarray, k: int, tol: Optional[float] = None) -> np.ndarray:
    """各 σ_i 的零阈值 τ(1 + |λ|_∞)^i, i = 1..k, 形状 (..., k)。"""
    tol = config.get('symfun.cone_tolerance', 1e-12) if tol is None else tol
    scale = 1.0 + np.max(np.abs(values), axis=-1)
    return tol * scale[..., None] ** np.arange(1, k + 1)


def cone_mask(values: np.ndarray, k: int, tol: Optional[float] = None) -> np.ndarray:
    """批量判断 λ ∈ Γ_k^+(严格在内部)。"""
    values = np.asarray(values, dtype=float)
    sig = spectrum_sigmas(values)[..., 1:k + 1]
    return np.all(sig > cone_thresholds(values, k, tol), axis=-1)


def cone_margin(values: np.ndarray, k: int) -> np.ndarray:
    """到锥边界的带符号尺度: min_i sign(σ_i)|σ_i|^{1/i}, 正值表示在锥内。"""
    values = np.asarray(values, dtype=float)
    sig = spectrum_sigmas(values)[..., 1:k + 1]
    roots = np.sign(sig) * np.abs(sig) ** (1.0 / np.arange(1, k + 1))
    return np.min(roots, axis=-1)


def cone_membership(lam: Union[Spectrum, np.ndarray], k: int,
                    tol: Optional[float] = None) -> ConeTag:
    """Γ_k^+ 成员判定

    Args:
        lam: 谱
        k: 锥的阶数, 1 <= k <= n
        tol: 零阈值系数 τ, 默认取配置 symfun.cone_tolerance

    Returns:
        ConeTag: inside / boundary / outside 及 σ_1..σ_k
    """
    values = _values(lam)
    _check_k(k, values.shape[-1])
    sig = spectrum_sigmas(values)[1:k + 1]
    thr = cone_thresholds(values, k, tol)
    if np.all(sig > thr):
        verdict = 'inside'
    elif np.any(sig < -thr):
        verdict = 'outside'
    else:
        verdict = 'boundary'
    return ConeTag(k=k, verdict=verdict, sigmas=sig.tolist())


def newton_maclaurin_margins(lam: Union[Spectrum, np.ndarray], k: int) -> np.ndarray:
    """l(n−k+1)σ_l σ_{k−1} − k(n−l+1)σ_{l−1}σ_k, l = 0..k−1 (σ_{−1} = 0)

    在 Γ_k^+ 内各项非负, 在 λ = e 处全为零。
    """
    values = _values(lam)
    n = values.shape[-1]
    _check_k(k, n)
    sig = spectrum_sigmas(values)
    margins = np.empty(values.shape[:-1] + (k,))
    for l in range(k):
        lower = sig[..., l - 1] if l >= 1 else 0.0
        margins[..., l] = (l * (n - k + 1) * sig[..., l] * sig[..., k - 1]
                           - k * (n - l + 1) * lower * sig[..., k])
    return margins


def gamma_t_shift(values: np.ndarray, m: int, t: float) -> np.ndarray:
    """λ + ((1−t)/2) σ_{m−1}^{1/(m−1)}(λ) e, 要求 σ_{m−1}(λ) > 0。"""
    values = np.asarray(values, dtype=float)
    if m < 2:
        raise DomainError(f"m={m} 必须 >= 2")
    base = spectrum_sigmas(values)[..., m - 1]
    if np.any(base <= 0):
        raise ConeViolationError(f"σ_{m - 1}(λ) <= 0, 平移无定义",
                                 sigmas=np.atleast_1d(base).ravel()[:1])
    return values + 0.5 * (1.0 - t) * (base ** (1.0 / (m - 1)))[..., None]


def gamma_t_membership(lam: Union[Spectrum, np.ndarray], m: int, t: float,
                       tol: Optional[float] = None) -> ConeTag:
    """Γ^t_m 判定: 平移后的谱是否属于 Γ_m^+。"""
    values = _values(lam)
    _check_k(m, values.shape[-1])
    base_tag = cone_membership(values, m - 1, tol) if m >= 2 else None
    if base_tag is None or not base_tag.inside:
        raise DomainError(f"Γ^t_{m} 仅对 Γ_{m - 1}^+ 内的谱定义")
    return cone_membership(gamma_t_shift(values, m, t), m, tol)


def _raise_outside(values: np.ndarray, k: int, inside: np.ndarray) -> None:
    bad = np.argwhere(~np.atleast_1d(inside))[0]
    point = np.atleast_2d(values)[tuple(bad)] if values.ndim > 1 else values
    sig = spectrum_sigmas(point)[1:k + 1]
    node = tuple(int(i) for i in bad) if values.ndim > 1 else None
    raise ConeViolationError(
        f"谱不在 Γ_{k}^+ 内: σ = {np.array2string(sig, precision=6)}",
        sigmas=sig, node=node, spectrum=point)


def normalized_operator(values: np.ndarray, k: int,
                        tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """批量计算 F 及其梯度 ∂F/∂λ_i

    Raises:
        ConeViolationError: 任一点不在 Γ_k^+ 内部
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    _check_k(k, n)
    inside = cone_mask(values, k, tol)
    if not np.all(inside):
        _raise_outside(values, k, inside)
    c = comb(n, k) ** (-1.0 / k)
    sigma, grad = sigma_and_gradient(values, k)
    value = c * sigma ** (1.0 / k)
    gradient = (c / k) * (sigma ** (1.0 / k - 1.0))[..., None] * grad
    return value, gradient


def normalized_hessian(values: np.ndarray, k: int) -> np.ndarray:
    """F 关于 λ 的 Hessian

    c(1/k)[σ^{1/k−1} ∂²σ + (1/k − 1)σ^{1/k−2} ∂σ ∂σ^T]
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    _check_k(k, n)
    inside = cone_mask(values, k)
    if not np.all(inside):
        _raise_outside(values, k, inside)
    c = comb(n, k) ** (-1.0 / k)
    sigma, grad = sigma_and_gradient(values, k)
    hess = sigma_hessian(values, k)
    outer = grad[..., :, None] * grad[..., None, :]
    return (c / k) * ((sigma ** (1.0 / k - 1.0))[..., None, None] * hess
                      + (1.0 / k - 1.0) * (sigma ** (1.0 / k - 2.0))[..., None, None] * outer)


def F_normalized(lam: Union[Spectrum, np.ndarray], k: int) -> Tuple[float, Spectrum]:
    """归一化算子 F = C(n,k)^{−1/k} σ_k^{1/k}

    Args:
        lam: Γ_k^+ 内的谱
        k: 阶数

    Returns:
        Tuple[float, Spectrum]: (F(λ), ∇F(λ))

    Raises:
        ConeViolationError: λ 不在 Γ_k^+ 内, 携带失败的 σ_i
    """
    values = _values(lam)
    value, gradient = normalized_operator(values, k)
    return float(value), Spectrum(gradient)


def sample_cone(n: int, k: int, count: int, seed: int = 0,
                box: Optional[Tuple[float, float]] = None,
                max_attempts: Optional[int] = None) -> np.ndarray:
    """在 [lo, hi]^n 中均匀抽样并拒绝 Γ_k^+ 外的点

    Args:
        n: 维数
        k: 锥的阶数
        count: 需要的样本数
        seed: 随机种子
        box: 抽样区间, 默认取配置 symfun.sampler_box
        max_attempts: 总抽样次数上限, 默认取配置 symfun.sampler_max_attempts

    Returns:
        np.ndarray: 形状 (count, n)

    Raises:
        SamplingError: 超过抽样上限仍不足 count 个
    """
    _check_k(k, n)
    if count < 1:
        raise DomainError(f"count={count} 必须 >= 1")
    lo, hi = box or config.get('symfun.sampler_box', [-1.0, 2.0])
    max_attempts = int(max_attempts or config.get('symfun.sampler_max_attempts', 100000))
    rng = np.random.default_rng(seed)
    accepted = []
    have = 0
    attempts = 0
    batch = max(2 * count, 64)
    while have < count:
        draw = min(batch, max_attempts - attempts)
        if draw <= 0:
            raise SamplingError(
                f"抽样 {attempts} 次后仅得到 {have}/{count} 个 Γ_{k}^+ 点", attempts=attempts)
        points = rng.uniform(lo, hi, size=(draw, n))
        attempts += draw
        keep = points[cone_mask(points, k)]
        accepted.append(keep)
        have += len(keep)
    return np.concatenate(accepted)[:count]


def check_structure_conditions(k: int, n: int, samples: int = 1000, seed: int = 0,
                               tol: Optional[float] = None) -> StructureReport:
    """在 Γ_k^+ 的随机样本上检验 S0–S3 与条件 (A)

    S0: F > 0; S1: Hessian 的最大特征值 <= tol·max(1, ‖H‖);
    S2: ∂F/∂λ_i > 0; S3: min_i F^i σ_1 / F >= 1/k;
    (A): 存在 λ_i <= 0 时 Σ_{j≠i} F^j / F^i <= n − k。
    另外检验 Euler 恒等式 Σ λ_i F^i = F 与 Σ F^i >= 1。

    Args:
        k: 阶数
        n: 维数
        samples: 样本数
        seed: 随机种子
        tol: 判定容差, 默认取配置 symfun.structure_tolerance

    Returns:
        StructureReport: 最差裕量与各项通过标志
    """
    if 2 * k < 2:
        raise DomainError(f"k={k} 必须 >= 1")
    tol = config.get('symfun.structure_tolerance', 1e-8) if tol is None else tol
    s1_tol = config.get('symfun.concavity_tolerance', 1e-8)
    points = sample_cone(n, k, samples, seed)
    value, grad = normalized_operator(points, k)
    hess = normalized_hessian(points, k)

    max_eig = np.linalg.eigvalsh(hess)[:, -1]
    hess_norm = np.maximum(1.0, np.abs(hess).max(axis=(-2, -1)))
    sigma1 = points.sum(axis=-1)
    eps_each = (grad * sigma1[:, None]).min(axis=-1) / value
    epsilon = float(eps_each.min())

    rho = float('nan')
    has_nonpos = points <= 0
    if np.any(has_nonpos):
        totals = grad.sum(axis=-1, keepdims=True)
        ratios = (totals - grad) / grad
        rho = float(ratios[has_nonpos].max())

    euler = np.abs((points * grad).sum(axis=-1) - value) / np.maximum(1.0, np.abs(value))
    grad_sum = grad.sum(axis=-1)

    margins = {
        'S0': float(value.min()),
        'S1': float(-(max_eig / hess_norm).max()),
        'S2': float(grad.min()),
        'S3': epsilon - 1.0 / k,
        'A': (n - k) - rho if np.isfinite(rho) else float('inf'),
        'euler': float(-euler.max()),
        'sum_gradient': float(grad_sum.min() - 1.0),
    }
    checks = {
        'S0': margins['S0'] > 0,
        'S1': margins['S1'] >= -s1_tol,
        'S2': margins['S2'] > 0,
        'S3': margins['S3'] >= -tol,
        'A': margins['A'] >= -tol,
        'euler': margins['euler'] >= -tol,
        'sum_gradient': margins['sum_gradient'] >= -tol,
    }
    logger.info(f"结构条件 n={n}, k={k}: ε={epsilon:.6g}, ρ={rho:.6g}, "
                f"通过={all(checks.values())}")
    return StructureReport(n=n, k=k, samples=len(points), epsilon=epsilon, rho=rho,
                           checks=checks, margins=margins)
