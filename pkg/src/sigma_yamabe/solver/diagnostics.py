"""解的诊断量: ĝ 的曲率与体积, 先验量监视, 极值点处的不等式链"""

from typing import Any, Dict

import numpy as np
from scipy.integrate import simpson
from scipy.special import comb

from sigma_yamabe.conformal.boundary_terms import boundary_Bk
from sigma_yamabe.conformal.state import BoundaryGeometry
from sigma_yamabe.solver.problem import ContinuationState, RadialProblem
from sigma_yamabe.solver.radial import radial_spectrum_values, sphere_area
from sigma_yamabe.symfun.functions import spectrum_sigmas


def _fields(problem: RadialProblem, state: ContinuationState):
    u, du, d2u = problem.grid.derivatives(state.U)
    lam = radial_spectrum_values(problem.n, problem.r, problem.background, u, du, d2u)
    return u, du, d2u, lam


def laplacian(problem: RadialProblem, u: np.ndarray, du: np.ndarray,
              d2u: np.ndarray) -> np.ndarray:
    """径向 Δ_g u = e^{2w}(u'' + (n−1)u'/r − (n−2)w'u'), r = 0 处为 e^{2w} n u''。"""
    n, r = problem.n, problem.r
    w, w1, _ = problem.background
    safe = np.where(r > 0, r, 1.0)
    inner = np.where(r > 0, d2u + (n - 1) * du / safe - (n - 2) * w1 * du, n * d2u)
    return np.exp(2.0 * w) * inner


def solution_diagnostics(problem: RadialProblem, state: ContinuationState) -> Dict[str, Any]:
    """σ_k(ĝ^{−1}Â) 场, 达到的 μ̂, V_ĝ 与 F_k(ĝ)。"""
    n, k, r = problem.n, problem.k, problem.r
    w, w1, _ = problem.background
    u, du, _, lam = _fields(problem, state)
    sigma = spectrum_sigmas(lam)[:, k]
    sigma_hat = np.exp(2.0 * k * u) * sigma
    area = sphere_area(n)
    density = area * r ** (n - 1) * np.exp(-n * (u + w))
    volume = float(simpson(density, x=r))
    mu_hat = float(np.exp(u[-1]) * (-np.exp(w[-1]) * du[-1] + problem.mu_g))
    interior = float(simpson(sigma_hat * density, x=r))
    boundary = 0.0
    if k <= n - 1:
        A_T = np.exp(2.0 * u[-1]) * lam[-1, 1] * np.eye(n - 1)[None]
        geom = BoundaryGeometry.umbilic(A_T, np.array([mu_hat]))
        B = float(np.asarray(boundary_Bk(geom, n, k, form='umbilic')).ravel()[0])
        boundary = B * area * np.exp(-(n - 1) * (u[-1] + w[-1]))
    return {'sigma_k_hat': sigma_hat.tolist(),
            'sigma_k_min': float(np.min(sigma_hat)), 'sigma_k_max': float(np.max(sigma_hat)),
            'mu_hat': mu_hat, 'mu_hat_target': problem.mu_hat,
            'mu_hat_error': abs(mu_hat - problem.mu_hat), 'volume': volume,
            'F_interior': interior, 'F_boundary': boundary, 'F_k': interior + boundary}


def monitors(problem: RadialProblem, state: ContinuationState) -> Dict[str, float]:
    """C⁰/C¹/C² 先验量, defm 路径另加 (1−t)(∫e^{−5u})^{2/5}。"""
    u, du, d2u, _ = _fields(problem, state)
    w = problem.background[0]
    values = {'sup_u': float(np.max(u)), 'inf_u': float(np.min(u)),
              'max_gradient': float(np.max(np.exp(w) * np.abs(du))),
              'max_laplacian': float(np.max(laplacian(problem, u, du, d2u)))}
    if state.path.kind == 'defm':
        integral = float(np.sum(np.exp(-5.0 * u) * problem.weights))
        values['integral_bound'] = (1.0 - float(state.t)) * integral ** 0.4
    return values


def extremal_diagnostics(problem: RadialProblem, solution: Any,
                         tol: float = 1e-8) -> Dict[str, Any]:
    """最大值点处的最大值原理与 σ_k^{1/k} <= C(n,k)^{1/k} σ_1 / n

    solution 为 SolveReport 或 ContinuationState(只用到 U)。

    内部最大值点要求 Δu <= 0; 边界最大值点(∂u/∂n = 0 时)要求 |∇u| ≈ 0。
    """
    n, k, r = problem.n, problem.k, problem.r
    w = problem.background[0]
    u, du, d2u, lam = _fields(problem, solution)
    lap = laplacian(problem, u, du, d2u)
    i_max, i_min = int(np.argmax(u)), int(np.argmin(u))
    gap = float(u[i_max] - u[i_min])
    on_boundary = i_max == len(r) - 1 and gap > tol
    gradient = float(np.exp(w[i_max]) * abs(du[i_max]))
    if on_boundary:
        principle = gradient <= max(tol, 10.0 * problem.grid.h ** 2)
    else:
        principle = lap[i_max] <= max(tol, 10.0 * problem.grid.h ** 2)
    sig = spectrum_sigmas(lam[i_max])
    root = float(max(sig[k], 0.0) ** (1.0 / k))
    bound = float(comb(n, k) ** (1.0 / k) * sig[1] / n)
    return {'r_max': float(r[i_max]), 'u_max': float(u[i_max]),
            'r_min': float(r[i_min]), 'u_min': float(u[i_min]), 'gap': gap,
            'constant': gap <= tol,
            'max_location': 'boundary' if on_boundary else 'interior',
            'laplacian_at_max': float(lap[i_max]), 'gradient_at_max': gradient,
            'max_principle_holds': bool(principle),
            'sigma_root': root, 'sigma_bound': bound,
            'sigma_chain_holds': bool(root <= bound + 1e-12 * max(1.0, abs(bound)))}
