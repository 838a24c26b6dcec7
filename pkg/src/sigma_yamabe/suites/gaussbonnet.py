"""Gauss-Bonnet 与 F_k 套件

半球面上 F_k 的闭式值与 χ, 平坦半球面片与平坦球的基准值,
n = 2k 时 F_k 的共形不变性, E_n 与 Q_{i,n} 两条路径的一致性,
以及非局部共形平坦图册被拒绝。
"""

from math import comb, pi
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.special import gamma

from sigma_yamabe.conformal import (
    FunctionalValue,
    QuadratureOrders,
    apply_conformal,
    c2,
    euler_characteristic,
    evaluate_functional,
    functional_Fk,
    gauss_bonnet_four,
    gauss_bonnet_integrands,
)
from sigma_yamabe.config import config
from sigma_yamabe.errors import UnsupportedChartError
from sigma_yamabe.geom import (
    ball_conformally_flat,
    build_boundary,
    build_curvature,
    chart_from_config,
    general_grid,
    half_ball_flat,
    tilted_metric,
)
from sigma_yamabe.suites.base import BaseSuite, CheckTask, SuiteResult, check_row, suite_orders
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)


def sphere_area(m: int) -> float:
    """单位球面 S^m 的面积。"""
    return 2.0 * pi ** ((m + 1) / 2.0) / gamma((m + 1) / 2.0)


def hemisphere_value(n: int, k: int) -> float:
    """标准半球面: σ_k(A) = C(n, k)/2^k, 边界全测地, F_k = σ_k |S^n|/2。"""
    return comb(n, k) / 2.0 ** k * 0.5 * sphere_area(n)


def flat_ball_value(n: int, k: int) -> float:
    """平坦单位球: A = 0, L = I, F_k = C_2(n, k, 0)|S^{n−1}|。"""
    return c2(n, k, 0) * sphere_area(n - 1)


class GaussBonnetSuite(BaseSuite):
    """Gauss-Bonnet 与 F_k 套件"""

    name = 'gaussbonnet'

    def __init__(self, settings=None):
        super().__init__(settings)
        self.tables: Dict[str, Any] = {}
        self._base: Optional[FunctionalValue] = None
        self._transformed: Optional[FunctionalValue] = None

    @property
    def orders(self) -> QuadratureOrders:
        return suite_orders(self.settings.n)

    @property
    def fine(self) -> int:
        return self.settings.resolutions[-1]

    @property
    def coarse(self) -> int:
        return self.settings.resolutions[0]

    @property
    def accuracy(self) -> float:
        return float(config.get('conformal.accuracy_tolerance', 1e-3))

    @property
    def even(self) -> bool:
        return self.settings.n % 2 == 0

    def _chart(self):
        return chart_from_config({'kind': self.settings.chart, 'n': self.settings.n,
                                  'resolution': self.fine})

    def base_value(self) -> FunctionalValue:
        if self._base is None:
            self._base = evaluate_functional(self._chart(), k=self.settings.k,
                                             orders=self.orders)
        return self._base

    def _tolerance(self, *values: FunctionalValue) -> float:
        errors = [v.error for v in values if np.isfinite(v.error)]
        return max(3.0 * max(errors, default=0.0), 1e-2)

    def functional_value(self) -> Dict[str, Any]:
        """半球面与闭式值比较, 其他图册只看求积误差。"""
        value = self.base_value()
        n, k = self.settings.n, self.settings.k
        details = dict(value.to_dict())
        if self.settings.chart == 'hemisphere':
            expected = hemisphere_value(n, k)
            return check_row(abs(value.total - expected), self._tolerance(value),
                             'F_k of the round hemisphere', expected=expected, **details)
        return check_row(value.error, self.accuracy * max(1.0, abs(value.total)),
                         'F_k quadrature error estimate', **details)

    def euler(self) -> Dict[str, Any]:
        """n = 2k: χ = F_{n/2}(n/2)!/(2π)^{n/2}。"""
        value = self.base_value()
        chi = euler_characteristic(value.total, self.settings.n)
        expected = self._chart().euler_characteristic
        return check_row(abs(chi - expected), 1e-2, 'Euler characteristic from F_{n/2}',
                         chi=chi, expected=expected)

    def flat_half_ball(self) -> Dict[str, Any]:
        chart = half_ball_flat(self.settings.n, resolution=self.coarse)
        value = evaluate_functional(chart, k=self.settings.k, orders=self.orders,
                                    estimate_error=False)
        return check_row(abs(value.total), 1e-10, 'F_k = 0 on a flat half ball',
                         total=value.total)

    def flat_ball(self) -> Dict[str, Any]:
        """平坦单位球: F_k 全部来自边界。"""
        n, k = self.settings.n, self.settings.k
        chart = ball_conformally_flat(n, resolution=self.coarse)
        value = evaluate_functional(chart, k=k, orders=self.orders, estimate_error=False)
        expected = flat_ball_value(n, k)
        residual = max(abs(value.interior), abs(value.boundary - expected))
        return check_row(residual, 1e-8 * max(1.0, expected), 'F_k of the flat unit ball',
                         interior=value.interior, boundary=value.boundary, expected=expected)

    def invariance(self) -> Dict[str, Any]:
        """n = 2k: 随机光滑 u 下 F_k 的漂移不超过求积误差估计的三倍。"""
        rng = np.random.default_rng([self.settings.seed, 11])
        count = int(config.get('conformal.invariance_samples', 5))
        chart = self._chart()
        pack, slc = build_curvature(chart), build_boundary(chart)
        base = self.base_value()
        worst, margin = 0.0, float('inf')
        drifts = []
        for a, b in rng.uniform(-0.1, 0.1, size=(count, 2)):
            def u(x, a=a, b=b):
                return a * x[:, 0] + b * np.sum(x ** 2, axis=-1)

            value = functional_Fk(apply_conformal(pack, slc, u), self.settings.k, self.orders)
            drift = abs(value.total - base.total)
            tolerance = self._tolerance(base, value)
            drifts.append(drift)
            if tolerance - drift < margin:
                worst, margin = drift, tolerance - drift
                self._transformed = value
        tolerance = worst + margin
        return check_row(worst, tolerance, 'conformal invariance of F_{n/2}',
                         samples=count, drifts=drifts, base=base.total)

    def integrands(self) -> Dict[str, Any]:
        """E_n 与 Q_{i,n}: Levi-Civita 路径与 σ 路径一致。"""
        chart = self._chart()
        gb = gauss_bonnet_integrands(build_curvature(chart), build_boundary(chart))
        self.tables['gauss_bonnet_integrands'] = gb.to_frame()
        scale = max(1.0, float(np.max(np.abs(gb.E_sigma))))
        if gb.Q_closed is not None:
            scale = max(scale, float(np.max(np.abs(gb.Q_closed))))
        residual = max(gb.interior_discrepancy, gb.boundary_discrepancy)
        return check_row(residual, 1e-8 * scale, 'E_n and Q_{i,n} via sigma_k',
                         weyl_max=gb.weyl_max)

    def four_dimensional(self) -> Dict[str, Any]:
        """32π²χ = ∫|𝒲|² + 16(∫σ_2 + ½∮ℬ)。"""
        report = gauss_bonnet_four(self._chart(), self.orders)
        return check_row(abs(report['chi'] - report['chi_expected']), 1e-2,
                         'four-dimensional Gauss-Bonnet with boundary', **report)

    def non_lcf_rejected(self) -> Dict[str, Any]:
        """非局部共形平坦图册必须报错而不是给出数值。"""
        n = self.settings.n
        chart = general_grid(n, tilted_metric(n, 0.2), [-0.5] * (n - 1) + [0.0],
                             [0.5] * n, resolution=self.coarse)
        try:
            gauss_bonnet_integrands(build_curvature(chart))
        except UnsupportedChartError as e:
            return dict(passed=True, residual=0.0, tolerance=0.0,
                        paper_ref='locally conformally flat charts only', message=str(e))
        return dict(passed=False, residual=1.0, tolerance=0.0,
                    paper_ref='locally conformally flat charts only')

    def tasks(self) -> List[CheckTask]:
        n, k = self.settings.n, self.settings.k
        tasks: List[CheckTask] = [
            ('functional_value', self.functional_value),
            ('flat_half_ball', self.flat_half_ball),
            ('flat_ball', self.flat_ball),
        ]
        if n == 2 * k:
            if self._chart().euler_characteristic is not None:
                tasks.append(('euler_characteristic', self.euler))
            tasks.append(('conformal_invariance', self.invariance))
        if self.even and n <= 6:
            tasks.extend([('gauss_bonnet_integrands', self.integrands),
                          ('non_lcf_rejected', self.non_lcf_rejected)])
        if n == 4:
            tasks.append(('gauss_bonnet_four', self.four_dimensional))
        return tasks

    def run(self) -> SuiteResult:
        ledger = self.new_ledger()
        # 共形不变性与 χ 共享同一次基准求积
        self.base_value()
        self.run_checks(ledger, self.tasks())
        values = {'base': self._base, 'conformal': self._transformed}
        self.tables['functional'] = pd.DataFrame(
            [dict(label=label, **value.to_dict()) for label, value in values.items()
             if value is not None])
        return SuiteResult(ledger, dict(self.tables),
                           {'chart': self.settings.chart, 'n': self.settings.n,
                            'k': self.settings.k})
