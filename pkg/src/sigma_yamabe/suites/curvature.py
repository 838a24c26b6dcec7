"""曲率与边界几何套件

曲率包的代数恒等式, 共形平坦半球面上边界恒等式的网格加密,
脐边界上的结构条件 (T0)–(T2), Fermi 坐标下的 Christoffel 符号,
法向导数恒等式与边界 Bianchi 恒等式。
"""

from typing import Any, Dict, List

import numpy as np

from sigma_yamabe.config import config
from sigma_yamabe.data.io import DataIO
from sigma_yamabe.geom import (
    ConformalExponent,
    ball_conformally_flat,
    build_boundary,
    build_curvature,
    chart_from_config,
    check_boundary_bianchi,
    check_boundary_identities,
    check_normal_derivative_identities,
    check_structure_t,
    compatible_factor,
    fermi_christoffels,
    half_ball_flat,
    radial_profile,
)
from sigma_yamabe.suites.base import (
    BaseSuite,
    CheckTask,
    SuiteResult,
    check_row,
    refinement_row,
)
from sigma_yamabe.utils.logger import get_logger

logger = get_logger(__name__)

# 代数恒等式只受舍入误差影响
ALGEBRAIC_TOL = 1e-9
IDENTITY_KEYS = ('a', 'b', 'c_curvature')


class CurvatureSuite(BaseSuite):
    """曲率与边界几何套件"""

    name = 'curvature'

    def __init__(self, settings=None):
        super().__init__(settings)
        self.tables: Dict[str, Any] = {}
        self._identity_reports: List[Dict[str, float]] = []

    @property
    def coarse(self) -> int:
        return self.settings.resolutions[0]

    @property
    def fine(self) -> int:
        return self.settings.resolutions[-1]

    @property
    def points(self) -> int:
        return int(config.get('geom.suite_points', 6))

    @property
    def tolerance(self) -> float:
        return float(config.get('geom.identity_tolerance', 1e-3))

    def _chart(self, resolution: int):
        return chart_from_config({'kind': self.settings.chart, 'n': self.settings.n,
                                  'resolution': resolution})

    def pack_identities(self) -> Dict[str, Any]:
        """R = 𝒲 + A ⊙ g 与 Riemann 的指标对称性。"""
        chart = self._chart(self.fine)
        pack = build_curvature(chart, chart.probe_points(self.points, seed=self.settings.seed))
        self.tables['curvature_pack'] = DataIO.flatten_fields(pack.points, pack.fields())
        residuals = dict(pack.symmetry_residuals())
        residuals['decomposition'] = pack.decomposition_residual()
        if chart.n == 4:
            residuals['sigma2_decomposition'] = pack.sigma2_decomposition_residual()
        return check_row(max(residuals.values()), ALGEBRAIC_TOL, 'R = W + A (.) g',
                         chart=self.settings.chart, resolution=self.fine, **residuals)

    def _boundary_identities(self) -> List[Dict[str, float]]:
        if not self._identity_reports:
            w = ConformalExponent.random_smooth(self.settings.n, seed=self.settings.seed)
            points = half_ball_flat(self.settings.n, w).boundary_probe_points(
                self.points, seed=self.settings.seed)
            for resolution in sorted({self.coarse, self.fine}):
                chart = half_ball_flat(self.settings.n, w, resolution=resolution)
                self._identity_reports.append(
                    check_boundary_identities(build_boundary(chart, points=points)))
        return self._identity_reports

    def boundary_identity(self, key: str) -> Dict[str, Any]:
        reports = self._boundary_identities()
        paper_ref = f'boundary identity ({key[0]}) on conformally flat half balls'
        if len(reports) == 1:
            return check_row(reports[0][key], self.tolerance, paper_ref)
        return refinement_row(reports[0][key], reports[-1][key], self.tolerance, paper_ref,
                              resolutions=[self.coarse, self.fine])

    def structure_t(self) -> Dict[str, Any]:
        """S = A 在径向扰动球的脐边界上满足 (T0)–(T2)。"""
        chart = ball_conformally_flat(self.settings.n, ConformalExponent.perturbed(0.2),
                                      resolution=self.fine)
        slc = build_boundary(chart, points=chart.boundary_probe_points(self.points))
        report = check_structure_t(slc)
        passed = report['T0'] <= 1e-12 and report['T1'] <= 1e-4 and report['T2'] <= self.tolerance
        return dict(passed=passed, residual=max(report.values()), tolerance=self.tolerance,
                    paper_ref='structure conditions (T0)-(T2) for S = A', **report)

    def fermi(self) -> Dict[str, Any]:
        """Fermi 坐标卡上 Γ^n_αβ = μg_αβ, Γ^β_αn = −μδ, Γ^n_αn = 0。"""
        chart = radial_profile(self.settings.n, ConformalExponent.polynomial([0.0, 0.2]),
                               resolution=self.fine)
        slc = build_boundary(chart, points=chart.boundary_probe_points(self.points))
        table = fermi_christoffels(slc)
        self.tables['fermi_christoffels'] = table
        return check_row(float(table['residual'].max()), 1e-5,
                         'Christoffel symbols in Fermi coordinates', mu=chart.extras['mu'])

    def normal_derivatives(self) -> Dict[str, Any]:
        """u_n = −μ + μ̂e^{−u} 时的一阶与二阶法向导数恒等式。"""
        w = ConformalExponent.random_smooth(self.settings.n, seed=self.settings.seed + 7,
                                            amplitude=0.15)
        chart = half_ball_flat(self.settings.n, w, resolution=self.fine)
        mu_hat = 0.5
        u = compatible_factor(chart, lambda x: 0.1 * np.sin(x[:, 0]) + 0.2 * x[:, 1] ** 2,
                              mu_hat=mu_hat, q=lambda x: 0.3 * x[:, 0])
        slc = build_boundary(chart, points=chart.boundary_probe_points(self.points,
                                                                       seed=self.settings.seed))
        report = check_normal_derivative_identities(slc, u, mu_hat=mu_hat)
        passed = (report['boundary_condition'] <= 1e-6 and report['nga'] <= 1e-4
                  and report['ngagb'] <= self.tolerance)
        return dict(passed=passed, residual=max(report.values()), tolerance=self.tolerance,
                    paper_ref='normal derivatives of u under u_n = -mu + mu_hat e^{-u}',
                    mu_hat=mu_hat, **report)

    def bianchi(self) -> Dict[str, Any]:
        """平坦球上 u = round 指数 (L̂ = 0) 时的边界 Bianchi 恒等式。"""
        chart = ball_conformally_flat(self.settings.n, resolution=self.fine)
        slc = build_boundary(chart, points=chart.boundary_probe_points(self.points))
        report = check_boundary_bianchi(slc, ConformalExponent.round())
        passed = report['second_form'] <= 1e-5 and report['bianchi'] <= self.tolerance
        return dict(passed=passed, residual=report['bianchi'], tolerance=self.tolerance,
                    paper_ref='boundary Bianchi identity for totally geodesic boundary', **report)

    def tasks(self) -> List[CheckTask]:
        tasks: List[CheckTask] = [('curvature_pack', self.pack_identities)]
        for key in IDENTITY_KEYS:
            tasks.append((f'boundary_identity[{key}]', lambda key=key: self.boundary_identity(key)))
        tasks.extend([
            ('structure_t', self.structure_t),
            ('fermi_christoffels', self.fermi),
            ('normal_derivatives', self.normal_derivatives),
            ('boundary_bianchi', self.bianchi),
        ])
        return tasks

    def run(self) -> SuiteResult:
        ledger = self.new_ledger()
        # 加密检查共享两级网格上的结果, 先在主线程算好
        self._boundary_identities()
        self.run_checks(ledger, self.tasks())
        return SuiteResult(ledger, dict(self.tables),
                           {'chart': self.settings.chart, 'n': self.settings.n,
                            'resolutions': list(self.settings.resolutions)})
