"""对称函数恒等式套件

在随机对称矩阵上检验 σ_k 的三条计算路径、Newton 张量的迹/递推/导数
恒等式、法向分量公式、混合函数的缩并与变分公式、σ_{q,r}(A^T, μI)
的闭式, Γ_k^+ 上的结构条件与 Newton-MacLaurin 不等式, 以及脐边界上
B^k 两种形式的一致性。
"""

from math import factorial
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from sigma_yamabe.conformal.boundary_terms import boundary_Bk
from sigma_yamabe.conformal.state import BoundaryGeometry
from sigma_yamabe.suites.base import BaseSuite, CheckTask, SuiteResult, check_row
from sigma_yamabe.symfun import (
    check_structure_conditions,
    faddeev_leverrier,
    matrix_sigmas,
    mixed_newton,
    mixed_sigma,
    mixed_sigmas,
    newton_maclaurin_margins,
    sample_cone,
    sigma_derivative,
    sigma_k_kronecker,
    spectrum_sigmas,
)
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

DIMENSIONS = (3, 4, 5, 6)
STRUCTURE_CASES = ((3, 1), (4, 2), (6, 2), (6, 3))
BOUNDARY_CASES = ((6, 3), (8, 3), (8, 4))
FD_TOL = 1e-6
# 极化的舍入误差随阶数按 2^q 放大
MIXED_TOL = 1e-8
MIXED_DIMENSIONS = (3, 4, 5)
BROKEN = 'broken-coefficient'


def random_symmetric(rng: np.random.Generator, m: int, count: int) -> np.ndarray:
    X = rng.normal(size=(count, m, m))
    return 0.5 * (X + np.swapaxes(X, -1, -2))


def relative(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """max |lhs − rhs| / max(1, |rhs|), 按实例取尺度。"""
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    diff = np.abs(lhs - rhs).reshape(len(lhs), -1).max(axis=-1)
    scale = np.maximum(1.0, np.abs(rhs).reshape(len(rhs), -1).max(axis=-1))
    return float(np.max(diff / scale))


class IdentitiesSuite(BaseSuite):
    """对称函数恒等式套件"""

    name = 'identities'

    def _rng(self, tag: int) -> np.random.Generator:
        return np.random.default_rng([self.settings.seed, tag])

    @property
    def broken(self) -> bool:
        return self.settings.test_mode == BROKEN

    @property
    def mixed_tol(self) -> float:
        return max(self.settings.tol, MIXED_TOL)

    def sigma_paths(self) -> Dict[str, Any]:
        """特征值、特征多项式与 Kronecker 三条路径一致。"""
        rng = self._rng(1)
        worst = 0.0
        for m in DIMENSIONS:
            W = random_symmetric(rng, m, self.settings.samples)
            poly = matrix_sigmas(W)
            eig = spectrum_sigmas(np.linalg.eigvalsh(W))
            kron = np.stack([sigma_k_kronecker(W, q) for q in range(m + 1)], axis=-1)
            worst = max(worst, relative(eig, poly), relative(kron, poly))
        return check_row(worst, self.settings.tol, 'sigma_k: Kronecker formula vs eigenvalues')

    def newton_trace(self) -> Dict[str, Any]:
        """tr T_q(W) = (m − q)σ_q(W)。"""
        rng = self._rng(2)
        # 测试模式下注入错误的系数 (m − q + 1)
        shift = 1 if self.broken else 0
        worst = 0.0
        for m in DIMENSIONS:
            W = random_symmetric(rng, m, self.settings.samples)
            sig, T = faddeev_leverrier(W)
            trace = np.trace(T, axis1=-2, axis2=-1)
            coefficient = (m - np.arange(m + 1) + shift)
            worst = max(worst, relative(trace, coefficient * sig))
        return check_row(worst, self.settings.tol, 'tr T_k(W) = (m-k) sigma_k(W)',
                         test_mode=self.settings.test_mode)

    def newton_recursion(self) -> Dict[str, Any]:
        """T_q = σ_q I − T_{q−1}W, 且等于 Σ_j (−1)^j σ_{q−j} W^j, T_m = 0。"""
        rng = self._rng(3)
        worst = 0.0
        for m in DIMENSIONS:
            W = random_symmetric(rng, m, self.settings.samples)
            sig, T = faddeev_leverrier(W)
            powers = [np.broadcast_to(np.eye(m), W.shape)]
            for _ in range(m):
                powers.append(powers[-1] @ W)
            for q in range(1, m + 1):
                rec = sig[:, q, None, None] * np.eye(m) - T[:, q - 1] @ W
                poly = sum((-1) ** j * sig[:, q - j, None, None] * powers[j]
                           for j in range(q + 1))
                worst = max(worst, relative(T[:, q], rec), relative(T[:, q], poly))
            worst = max(worst, relative(T[:, m], np.zeros_like(W)))
        return check_row(worst, self.settings.tol, 'T_k(W) = sigma_k I - T_{k-1}(W) W')

    def newton_derivative(self) -> Dict[str, Any]:
        """∂σ_q/∂W_ij = T_{q−1}^{ji}, 中心差分步长 1e-5。"""
        rng = self._rng(4)
        h = 1e-5
        count = min(self.settings.samples, 100)
        worst = 0.0
        for m in DIMENSIONS:
            W = rng.normal(size=(count, m, m))
            fd = np.zeros((count, m + 1, m, m))
            for i in range(m):
                for j in range(m):
                    E = np.zeros((m, m))
                    E[i, j] = h
                    fd[:, :, i, j] = (matrix_sigmas(W + E) - matrix_sigmas(W - E)) / (2.0 * h)
            for q in range(1, m + 1):
                worst = max(worst, relative(fd[:, q], sigma_derivative(W, q)))
        return check_row(worst, FD_TOL, 'd sigma_q / dW = T_{q-1}', step=h)

    def normal_entries(self) -> Dict[str, Any]:
        """T_q(A)^n_n = σ_q(A^T), T_q(A)^α_n = −T_{q−1}(A^T)^α_β A^β_n。"""
        rng = self._rng(5)
        worst = 0.0
        for m in DIMENSIONS:
            A = random_symmetric(rng, m, self.settings.samples)
            A_T, A_n = A[:, :-1, :-1], A[:, :-1, -1]
            _, T = faddeev_leverrier(A)
            sig_T, T_T = faddeev_leverrier(A_T)
            for q in range(m):
                worst = max(worst, relative(T[:, q, -1, -1], sig_T[:, q]))
                if q >= 1:
                    rhs = -np.einsum('nab,nb->na', T_T[:, q - 1], A_n)
                    worst = max(worst, relative(T[:, q, :-1, -1], rhs))
        return check_row(worst, self.settings.tol, 'T_q(A)^n_n = sigma_q(A^T)')

    def mixed_normal_entries(self) -> Dict[str, Any]:
        """T_{q,r}(A, μI)^α_n = −(r/q)T_{q−1,r−1}(A^T, μI)^α_β A^β_n。"""
        rng = self._rng(6)
        worst = 0.0
        for m in MIXED_DIMENSIONS:
            A = random_symmetric(rng, m, self.settings.samples)
            mu = rng.normal(size=self.settings.samples)
            B = mu[:, None, None] * np.eye(m)
            B_T = mu[:, None, None] * np.eye(m - 1)
            for q in range(1, m):
                for r in range(q + 1):
                    lhs = mixed_newton(A, B, q, r)[:, :-1, -1]
                    if r == 0:
                        rhs = np.zeros_like(lhs)
                    else:
                        rhs = -(r / q) * np.einsum(
                            'nab,nb->na', mixed_newton(A[:, :-1, :-1], B_T, q - 1, r - 1),
                            A[:, :-1, -1])
                    worst = max(worst, relative(lhs, rhs))
        return check_row(worst, self.mixed_tol, 'T_{q,r}(A, mu g)^alpha_n normal entries')

    def mixed_contraction(self) -> Dict[str, Any]:
        """T_{q,r}(A,B)^i_j A^j_i = (q+1)σ_{q+1,r+1}(A, B)。"""
        rng = self._rng(7)
        worst = 0.0
        for m in MIXED_DIMENSIONS:
            A = random_symmetric(rng, m, self.settings.samples)
            B = random_symmetric(rng, m, self.settings.samples)
            for q in range(m):
                sig = mixed_sigmas(A, B, q + 1)
                for r in range(q + 1):
                    lhs = np.einsum('nij,nji->n', mixed_newton(A, B, q, r), A)
                    worst = max(worst, relative(lhs, (q + 1) * sig[:, r + 1]))
        return check_row(worst, self.mixed_tol,
                         'T_{q,r}(A,B) A = (q+1) sigma_{q+1,r+1}(A,B)')

    def mixed_variation(self) -> Dict[str, Any]:
        """σ_{q+1,r+1} 沿 A' = kAφ + M, B' = lBφ + N 的导数公式。"""
        rng = self._rng(8)
        h = 1e-5
        count = min(self.settings.samples, 100)
        worst = 0.0
        for m in MIXED_DIMENSIONS:
            A, B, M, N = (random_symmetric(rng, m, count) for _ in range(4))
            kk, ll, phi = (rng.normal(size=count)[:, None, None] for _ in range(3))
            dA = kk * A * phi + M
            dB = ll * B * phi + N
            scalar = (kk * phi).ravel(), (ll * phi).ravel()
            for q in range(m - 1):
                plus = mixed_sigmas(A + h * dA, B + h * dB, q + 1)
                minus = mixed_sigmas(A - h * dA, B - h * dB, q + 1)
                base = mixed_sigmas(A, B, q + 1)
                for r in range(q + 1):
                    fd = (plus[:, r + 1] - minus[:, r + 1]) / (2.0 * h)
                    formula = ((scalar[0] * (r + 1) + scalar[1] * (q - r)) * base[:, r + 1]
                               + (r + 1) / (q + 1)
                               * np.einsum('nij,nji->n', mixed_newton(A, B, q, r), M))
                    if r < q:
                        formula = formula + (q - r) / (q + 1) * np.einsum(
                            'nij,nji->n', mixed_newton(A, B, q, r + 1), N)
                    worst = max(worst, relative(fd, formula))
        return check_row(worst, FD_TOL, 'first variation of sigma_{q+1,r+1}', step=h)

    def mixed_closed_form(self) -> Dict[str, Any]:
        """σ_{q,r}(A^T, μI) = r!(m−r)!/(q!(m−q)!) σ_r(A^T) μ^{q−r}。"""
        rng = self._rng(9)
        worst = 0.0
        for m in MIXED_DIMENSIONS:
            A_T = random_symmetric(rng, m, self.settings.samples)
            mu = rng.normal(size=self.settings.samples)
            sig = matrix_sigmas(A_T)
            for q in range(m + 1):
                values = mixed_sigmas(A_T, mu[:, None, None] * np.eye(m), q)
                for r in range(q + 1):
                    expected = (factorial(r) * factorial(m - r) / (factorial(q) * factorial(m - q))
                                * sig[:, r] * mu ** (q - r))
                    worst = max(worst, relative(values[:, r], expected))
        # n = 4 的特例 σ_{2,1}(A^T, μI) = ((n−2)/2)σ_1(A^T)μ
        A_T = random_symmetric(rng, 3, self.settings.samples)
        mu = rng.normal(size=self.settings.samples)
        lhs = mixed_sigma(A_T, mu[:, None, None] * np.eye(3), 2, 1)
        worst = max(worst, relative(lhs, np.trace(A_T, axis1=-2, axis2=-1) * mu))
        return check_row(worst, self.mixed_tol, 'sigma_{q,r}(A^T, mu g) closed form')

    def boundary_forms(self) -> Dict[str, Any]:
        """全脐边界上 B^k 的一般形式与脐形式一致。"""
        rng = self._rng(10)
        count = min(self.settings.samples, 200)
        worst = 0.0
        for n, k in BOUNDARY_CASES:
            A_T = 0.5 * random_symmetric(rng, n - 1, count)
            geom = BoundaryGeometry.umbilic(A_T, rng.uniform(-1.0, 1.0, size=count))
            worst = max(worst, relative(boundary_Bk(geom, n, k, form='general'),
                                        boundary_Bk(geom, n, k, form='umbilic')))
        return check_row(worst, self.mixed_tol, 'B^k general form on umbilic boundaries',
                         cases=[list(case) for case in BOUNDARY_CASES])

    def structure(self, n: int, k: int) -> Dict[str, Any]:
        report = check_structure_conditions(k, n, self.settings.samples,
                                            seed=self.settings.seed)
        residual = max(0.0, -min(report.margins['S3'], report.margins['A'],
                                 report.margins['euler'], report.margins['sum_gradient']))
        return dict(passed=report.passed, residual=residual, tolerance=1e-8,
                    paper_ref='structure conditions (S0)-(S3), (A), eps = 1/k, rho = n-k',
                    epsilon=report.epsilon, rho=report.rho, checks=report.checks)

    def newton_maclaurin(self) -> Dict[str, Any]:
        """Γ_k^+ 上裕量非负, λ = e 处取等号。"""
        worst_inside = 0.0
        worst_equal = 0.0
        for n, k in STRUCTURE_CASES:
            points = sample_cone(n, k, self.settings.samples, seed=self.settings.seed + n + k)
            margins = newton_maclaurin_margins(points, k)
            scale = np.maximum(1.0, np.abs(spectrum_sigmas(points)).max(axis=-1)) ** 2
            worst_inside = max(worst_inside, float(np.max(-margins / scale[:, None])))
            equal = newton_maclaurin_margins(np.ones(n), k)
            worst_equal = max(worst_equal, float(np.max(np.abs(equal))))
        residual = max(worst_inside, 0.0)
        return dict(passed=bool(residual <= 1e-12 and worst_equal <= 1e-12), residual=residual,
                    tolerance=1e-12, paper_ref='Newton-MacLaurin inequality',
                    equality_at_e=worst_equal)

    def tasks(self) -> List[CheckTask]:
        tasks: List[CheckTask] = [
            ('sigma_k_paths', self.sigma_paths),
            ('newton_trace', self.newton_trace),
            ('newton_recursion', self.newton_recursion),
            ('newton_derivative', self.newton_derivative),
            ('newton_normal_entries', self.normal_entries),
            ('mixed_normal_entries', self.mixed_normal_entries),
            ('mixed_contraction', self.mixed_contraction),
            ('mixed_first_variation', self.mixed_variation),
            ('mixed_closed_form', self.mixed_closed_form),
            ('newton_maclaurin', self.newton_maclaurin),
            ('boundary_Bk_forms', self.boundary_forms),
        ]
        for n, k in STRUCTURE_CASES:
            tasks.append((f'structure[n={n},k={k}]', lambda n=n, k=k: self.structure(n, k)))
        return tasks

    def run(self) -> SuiteResult:
        ledger = self.new_ledger()
        rows = self.run_checks(ledger, self.tasks())
        logger.debug(f"恒等式检查完成: {len(rows)} 项, 失败 {ledger.failures}")
        table = pd.DataFrame([{'check': row['check'], 'passed': row['passed'],
                               'residual': row['residual'], 'tolerance': row['tolerance']}
                              for row in rows])
        return SuiteResult(ledger, {'identities': table},
                           {'seed': self.settings.seed, 'samples': self.settings.samples})
