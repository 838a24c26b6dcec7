"""变分结构套件

F_k 方向导数与一阶变分闭式的比较, 临界维数 n = 2k 的不变性,
体积变分, 权 2k−1 边界不变量的变分, 半球面的 Euler-Lagrange 残差,
以及局部共形平坦时 Newton 张量的无散度性。
"""

from typing import Any, Dict, List, Tuple

import pandas as pd

from sigma_yamabe.conformal import QuadratureOrders, apply_conformal
from sigma_yamabe.config import config
from sigma_yamabe.geom import (
    ConformalExponent,
    ball_conformally_flat,
    build_boundary,
    build_curvature,
    hemisphere,
)
from sigma_yamabe.suites.base import (
    BaseSuite,
    CheckTask,
    SuiteResult,
    check_row,
    refinement_row,
)
from sigma_yamabe.utils.logger import get_logger
from sigma_yamabe.variation import (
    Perturbation,
    VariationReport,
    divergence_free_check,
    euler_lagrange_residual,
    first_variation_check,
    local_invariant_variation_check,
    volume_variation_check,
)

logger = get_logger(__name__)

ORDERS = {
    4: QuadratureOrders(radial=10, angular=6, azimuth=8, box=9),
    5: QuadratureOrders(radial=8, angular=6, azimuth=8, box=9),
    6: QuadratureOrders(radial=6, angular=4, azimuth=6, box=9),
}


def variation_orders(n: int) -> QuadratureOrders:
    return ORDERS.get(n, ORDERS[6])


def _state(chart, with_boundary: bool = True):
    pack = build_curvature(chart)
    return apply_conformal(pack, build_boundary(chart) if with_boundary else None)


class VariationSuite(BaseSuite):
    """变分结构套件"""

    name = 'variation'

    def __init__(self, settings=None):
        super().__init__(settings)
        self.reports: Dict[str, VariationReport] = {}

    @property
    def resolution(self) -> int:
        return int(config.get('variation.resolution', 81))

    @property
    def tolerance(self) -> float:
        return float(config.get('variation.tolerance', 1e-3))

    @property
    def perturbation(self) -> Perturbation:
        return Perturbation.from_config(config.get('variation.perturbation', 'radial_bump'))

    def cases(self) -> List[Tuple[int, int]]:
        """(n, k): 命令行给出的一组在前, 然后是配置中的其他组。"""
        cases = [(self.settings.n, self.settings.k)]
        for n, k in config.get('variation.cases', [[5, 2], [6, 2]]):
            if (n, k) not in cases:
                cases.append((int(n), int(k)))
        return [(n, k) for n, k in cases if 2 <= k <= n - 1]

    def first_variation(self, n: int, k: int) -> Dict[str, Any]:
        """n ≠ 2k: 相对残差; n = 2k: 闭式为零, 差分导数应为零。"""
        state = _state(hemisphere(n, resolution=self.resolution))
        report = first_variation_check(state, k, self.perturbation, orders=variation_orders(n))
        self.reports[f'first_variation[n={n},k={k}]'] = report
        details = dict(perturbation=report.perturbation, fd_derivative=report.fd_derivative,
                       formula_value=report.formula_value,
                       order_estimate=report.order_estimate)
        if n == 2 * k:
            return check_row(abs(report.fd_derivative), self.tolerance,
                             'dF_{n/2}/dt = 0 in the critical dimension', **details)
        return check_row(report.relative_residual, self.tolerance,
                         'dF_k/dt = (2k-n)(int sigma_k phi + oint B^k phi)', **details)

    def zero_direction(self) -> Dict[str, Any]:
        state = _state(hemisphere(self.settings.n, resolution=self.settings.resolutions[0]))
        report = first_variation_check(state, self.settings.k, Perturbation.zero())
        return check_row(report.residual, 0.0, 'phi = 0 gives a zero derivative',
                         fd_derivative=report.fd_derivative)

    def volume(self) -> Dict[str, Any]:
        """dV/dt = −n∫φ dV。"""
        n = self.settings.n
        state = _state(hemisphere(n, resolution=self.settings.resolutions[0]),
                       with_boundary=False)
        report = volume_variation_check(state, self.perturbation, orders=variation_orders(n))
        self.reports['volume_variation'] = report
        return check_row(report.relative_residual, 1e-9, 'dV/dt = -n int phi dV',
                         formula_value=report.formula_value)

    def mu_power(self) -> Dict[str, Any]:
        """平坦单位球上 μ^{2k−1} 沿 Neumann 扰动的变分。"""
        n, k = self.settings.n, self.settings.k
        state = _state(ball_conformally_flat(n, resolution=self.settings.resolutions[0]),
                       with_boundary=False)
        report = local_invariant_variation_check(state, k, Perturbation.neumann_bump(),
                                                 'mu_power', orders=variation_orders(n))
        self.reports['local_invariant[mu_power]'] = report
        return check_row(report.relative_residual, 1e-6,
                         'weight 2k-1 boundary invariants vary by (2k-n)',
                         formula_value=report.formula_value)

    def l4(self) -> Dict[str, Any]:
        """全测地边界上 ℒ₄ 的积分及其变分都为零。"""
        state = _state(hemisphere(4, resolution=31), with_boundary=False)
        report = local_invariant_variation_check(state, 2, Perturbation.x1_mode(0.5), 'l4',
                                                 orders=variation_orders(4))
        self.reports['local_invariant[l4]'] = report
        residual = max(abs(report.fd_derivative), abs(report.formula_value))
        return check_row(residual, self.tolerance, 'L_4 on a totally geodesic boundary',
                         fd_derivative=report.fd_derivative, formula_value=report.formula_value)

    def euler_lagrange(self) -> Dict[str, Any]:
        """半球面: σ_k 为常数, B^k = 0。"""
        chart = hemisphere(self.settings.n, resolution=self.settings.resolutions[-1])
        residual = euler_lagrange_residual(_state(chart), self.settings.k)
        passed = residual.max_interior <= self.tolerance and residual.max_boundary <= 1e-4
        return dict(passed=passed, residual=max(residual.max_interior, residual.max_boundary),
                    tolerance=self.tolerance,
                    paper_ref='critical points: sigma_k constant and B^k = 0',
                    interior=residual.max_interior, boundary=residual.max_boundary)

    def divergence(self, q: int) -> Dict[str, Any]:
        """局部共形平坦时 ∇_i T_q(A)^i_j = 0, 散度随加密下降。"""
        n = self.settings.n
        w = ConformalExponent.random_smooth(n, seed=self.settings.seed + 4)
        chart = ball_conformally_flat(n, w, resolution=self.settings.resolutions[0])
        frame = divergence_free_check(chart, q, resolutions=self.settings.resolutions,
                                      seed=self.settings.seed)
        values = frame['max_divergence'].tolist()
        paper_ref = 'Newton tensors of A are divergence free on LCF charts'
        if len(values) == 1:
            return check_row(values[0], self.tolerance, paper_ref)
        # 只要求按二阶下降, 绝对大小取决于 w 的振幅
        return refinement_row(values[0], values[-1], max(values[0], 1e-9), paper_ref,
                              max_newton=float(frame['max_newton'].max()))

    def tasks(self) -> List[CheckTask]:
        tasks: List[CheckTask] = []
        for n, k in self.cases():
            tasks.append((f'first_variation[n={n},k={k}]',
                          lambda n=n, k=k: self.first_variation(n, k)))
        if self.settings.k >= 2:
            tasks.append(('zero_direction', self.zero_direction))
        tasks.extend([
            ('volume_variation', self.volume),
            ('local_invariant[mu_power]', self.mu_power),
        ])
        if (self.settings.n, self.settings.k) == (4, 2):
            tasks.append(('local_invariant[l4]', self.l4))
        tasks.append(('euler_lagrange', self.euler_lagrange))
        for q in range(1, self.settings.n):
            tasks.append((f'divergence_free[q={q}]', lambda q=q: self.divergence(q)))
        return tasks

    def run(self) -> SuiteResult:
        ledger = self.new_ledger()
        self.run_checks(ledger, self.tasks())
        table = pd.DataFrame([report.to_row() for _, report in sorted(self.reports.items())])
        return SuiteResult(ledger, {'variation': table},
                           {'n': self.settings.n, 'k': self.settings.k,
                            'perturbation': self.perturbation.name})
