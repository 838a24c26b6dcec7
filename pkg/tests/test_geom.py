#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试差分模板、图册、曲率包与边界几何。
"""

import unittest

import numpy as np

from sigma_yamabe.config import config
from sigma_yamabe.errors import (
    ConfigError,
    DomainError,
    GeometryError,
    UmbilicityError,
    UnsupportedChartError,
)
from sigma_yamabe.geom import (
    ConformalExponent,
    Stencil,
    ball_conformally_flat,
    build_boundary,
    build_curvature,
    chart_from_config,
    check_boundary_bianchi,
    check_boundary_identities,
    check_normal_derivative_identities,
    check_structure_t,
    compatible_factor,
    fd_weights,
    fermi_christoffels,
    general_grid,
    half_ball_flat,
    hemisphere,
    kulkarni_nomizu,
    radial_profile,
    tilted_metric,
)


def _refines(coarse: float, fine: float, floor: float = 1e-9) -> bool:
    return fine <= max(coarse / 3.5, floor)


class TestStencil(unittest.TestCase):
    """五点差分模板。"""

    def setUp(self):
        self.stencil = Stencil(np.array([0.1, 0.1]), np.zeros(2), np.ones(2), clamp=True)

    @staticmethod
    def f(x):
        return x[:, 0] ** 4 + x[:, 0] ** 2 * x[:, 1] ** 2 + x[:, 1] ** 3

    def test_central_weights(self):
        """中心一阶导数权重 (1/12, −2/3, 0, 2/3, −1/12)。"""
        w = fd_weights(np.arange(-2, 3), 1)
        np.testing.assert_allclose(w, [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12], atol=1e-13)

    def test_window_starts(self):
        """边界附近窗口平移到盒内。"""
        coord = np.array([0.0, 0.05, 0.5, 1.0])
        np.testing.assert_array_equal(self.stencil.starts(coord, 0), [0, 0, -2, -4])

    def test_polynomial_exact(self):
        """四次多项式的梯度与 Hessian 在盒内任意位置精确。"""
        x = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 0.3], [0.02, 0.97]])
        grad = self.stencil.gradient(self.f, x)
        hess = self.stencil.hessian(self.f, x)
        x0, x1 = x[:, 0], x[:, 1]
        np.testing.assert_allclose(grad[:, 0], 4 * x0 ** 3 + 2 * x0 * x1 ** 2, atol=1e-9)
        np.testing.assert_allclose(grad[:, 1], 2 * x0 ** 2 * x1 + 3 * x1 ** 2, atol=1e-9)
        np.testing.assert_allclose(hess[:, 0, 0], 12 * x0 ** 2 + 2 * x1 ** 2, atol=1e-8)
        np.testing.assert_allclose(hess[:, 0, 1], 4 * x0 * x1, atol=1e-8)
        np.testing.assert_allclose(hess[:, 1, 1], 2 * x0 ** 2 + 6 * x1, atol=1e-8)
        np.testing.assert_array_equal(hess[:, 0, 1], hess[:, 1, 0])

    def test_box_too_small(self):
        """盒宽小于 4h 时报错。"""
        with self.assertRaises(GeometryError):
            Stencil(np.array([0.5]), np.zeros(1), np.ones(1), clamp=True)


class TestCharts(unittest.TestCase):
    """图册与共形指数目录。"""

    def test_round_profile(self):
        """round: w(1) = 0, w'(1) = 1, 且与点函数一致。"""
        w = ConformalExponent.round()
        w0, w1, w2 = w.radial_values(np.array([1.0]))
        self.assertAlmostEqual(w0[0], 0.0, places=14)
        self.assertAlmostEqual(w1[0], 1.0, places=14)
        self.assertAlmostEqual(w2[0], 0.0, places=14)
        x = np.array([[0.3, 0.4, 0.0, 0.0]])
        self.assertAlmostEqual(w(x)[0], np.log((1 + 0.25) / 2), places=14)

    def test_perturbed_keeps_geodesic(self):
        """扰动不改变 w'(1) = 1。"""
        w = ConformalExponent.perturbed(0.3)
        self.assertAlmostEqual(w.radial_values(np.array([1.0]))[1][0], 1.0, places=14)

    def test_polynomial_derivatives(self):
        """多项式指数的径向导数与差商一致。"""
        w = ConformalExponent.polynomial([0.1, -0.2, 0.05])
        r = np.array([0.3, 0.7])
        d = 1e-5
        v, v1, v2 = w.radial_values(r)
        vp, vm = w.radial_values(r + d)[0], w.radial_values(r - d)[0]
        np.testing.assert_allclose(v1, (vp - vm) / (2 * d), atol=1e-8)
        np.testing.assert_allclose(v2, (vp - 2 * v + vm) / d ** 2, atol=1e-4)

    def test_from_config(self):
        """按名称构造; 未知名称为配置错误。"""
        self.assertEqual(ConformalExponent.from_config('round').name, 'round')
        w = ConformalExponent.from_config({'name': 'perturbed', 'epsilon': 0.2})
        self.assertEqual(w.params['epsilon'], 0.2)
        with self.assertRaises(ConfigError):
            ConformalExponent.from_config('bogus')

    def test_resolution_guard(self):
        """分辨率必须 >= 5。"""
        with self.assertRaises(DomainError):
            half_ball_flat(3, resolution=4)

    def test_grid_spacing(self):
        chart = half_ball_flat(3, resolution=21)
        np.testing.assert_allclose(chart.h, [0.1, 0.1, 0.05])

    def test_probe_points_inside(self):
        """探测点可复现且位于区域内。"""
        chart = hemisphere(4, resolution=21)
        a = chart.probe_points(20, seed=3)
        b = chart.probe_points(20, seed=3)
        np.testing.assert_array_equal(a, b)
        self.assertTrue(np.all(chart.contains(a)))
        face = half_ball_flat(3).boundary_probe_points(10)
        np.testing.assert_array_equal(face[:, -1], 0.0)

    def test_radial_profile_flat(self):
        """平坦指数下 r(s) = 1 − s, μ = 1。"""
        chart = radial_profile(3, resolution=21)
        self.assertAlmostEqual(chart.extras['mu'], 1.0, places=14)
        g = chart.metric(np.array([[0.0, 0.0, 0.25]]))
        np.testing.assert_allclose(g[0], np.diag([0.5625, 0.5625, 1.0]), atol=1e-10)

    def test_chart_from_config(self):
        chart = chart_from_config({'kind': 'hemisphere', 'n': 4, 'resolution': 21})
        self.assertEqual(chart.kind, 'ball_conformally_flat')
        self.assertEqual(chart.w.name, 'round')
        chart = chart_from_config({'kind': 'general_grid', 'n': 3, 'metric': 'warped'})
        self.assertEqual(chart.name, 'warped')
        with self.assertRaises(ConfigError):
            chart_from_config({'kind': 'torus'})


class TestCurvature(unittest.TestCase):
    """曲率包。"""

    def test_flat_chart(self):
        """w ≡ 0: 全部曲率为零。"""
        chart = half_ball_flat(4, resolution=21)
        pack = build_curvature(chart, chart.probe_points(8))
        for name in ('riemann', 'ricci', 'schouten', 'weyl', 'cotton'):
            self.assertLess(float(np.max(np.abs(getattr(pack, name)))), 1e-9, name)

    def test_round_sphere_schouten(self):
        """球模型: A = ½g, σ_2(A) = 3/2, 𝒲 ≈ 0。"""
        chart = hemisphere(4, resolution=41)
        pack = build_curvature(chart, chart.probe_points(12))
        self.assertLess(float(np.max(np.abs(pack.schouten - 0.5 * pack.g))), 1e-4)
        np.testing.assert_allclose(pack.sigma_schouten(2), 1.5, atol=1e-4)
        np.testing.assert_allclose(pack.scalar, 12.0, atol=1e-2)
        self.assertLess(float(np.sqrt(np.max(pack.weyl_norm_sq()))), 1e-2)
        self.assertLess(float(np.max(pack.cotton_norm())), 1e-3)
        self.assertLess(pack.schouten_consistency(), 1e-2)

    def test_riemann_symmetries(self):
        """Riemann 指标对称性与第一 Bianchi 恒等式到舍入误差。"""
        chart = general_grid(4, tilted_metric(4, 0.1), [-0.5] * 3 + [0.0], [0.5] * 4,
                             resolution=21)
        pack = build_curvature(chart, chart.probe_points(8))
        for name, value in pack.symmetry_residuals().items():
            self.assertLess(value, 1e-9, name)

    def test_sigma2_decomposition(self):
        """n = 4: σ_2(A) = (R²/12 − |E|²)/8。"""
        chart = general_grid(4, tilted_metric(4, 0.2), [-0.5] * 3 + [0.0], [0.5] * 4,
                             resolution=21)
        pack = build_curvature(chart, chart.probe_points(8))
        self.assertLess(pack.sigma2_decomposition_residual(), 1e-9)
        self.assertLess(pack.decomposition_residual(), 1e-9)

    def test_weyl_refinement(self):
        """随机光滑共形指数: ‖𝒲‖_∞ 随加密至少二阶下降。"""
        w = ConformalExponent.random_smooth(4, seed=5)
        points = half_ball_flat(4, w, resolution=21).probe_points(8, seed=1)
        norms = []
        for resolution in (21, 41):
            pack = build_curvature(half_ball_flat(4, w, resolution=resolution), points)
            norms.append(float(np.sqrt(np.max(pack.weyl_norm_sq()))))
        self.assertTrue(_refines(*norms), norms)

    def test_kulkarni_nomizu_sphere(self):
        """½g ⊙ g 给出截面曲率 1。"""
        g = np.eye(3)
        R = kulkarni_nomizu(0.5 * g, g)
        self.assertAlmostEqual(R[0, 1, 0, 1], 1.0)
        self.assertAlmostEqual(R[0, 1, 1, 0], -1.0)

    def test_non_positive_metric(self):
        """度量非正定时报告节点。"""
        chart = general_grid(3, lambda p: -np.broadcast_to(np.eye(3), (len(p), 3, 3)).copy(),
                             [0, 0, 0], [1, 1, 1], resolution=11)
        with self.assertRaises(GeometryError) as ctx:
            build_curvature(chart, np.array([[0.5, 0.5, 0.5]]))
        self.assertEqual(ctx.exception.node, 0)

    def test_two_dimensions_rejected(self):
        chart = half_ball_flat(2, resolution=11)
        with self.assertRaises(DomainError):
            build_curvature(chart, np.array([[0.0, 0.5]]))

    def test_concurrent_evaluation_is_order_independent(self):
        """并发分批求值与串行结果逐位一致。"""
        chart = hemisphere(3, resolution=21)
        points = chart.probe_points(24)
        old = config.get('geom.batch_size')
        config.set('geom.batch_size', 5, save=False)
        try:
            serial = build_curvature(chart, points, workers=1)
            parallel = build_curvature(chart, points, workers=4)
        finally:
            config.set('geom.batch_size', old, save=False)
        np.testing.assert_array_equal(serial.riemann, parallel.riemann)
        np.testing.assert_array_equal(serial.cotton, parallel.cotton)

    def test_grid_storage(self):
        """网格节点按节点主序存放, strides 给出各轴的行偏移。"""
        chart = general_grid(3, tilted_metric(3, 0.1), [0.0, 0.0, 0.0], [0.6, 0.6, 0.6],
                             resolution=7)
        self.assertEqual(chart.strides, (49, 7, 1))
        pack = build_curvature(chart, 'grid')
        self.assertEqual(len(pack), 7 ** 3)
        h = 0.1
        np.testing.assert_allclose(pack.points[1] - pack.points[0], [0.0, 0.0, h])
        np.testing.assert_allclose(pack.points[7] - pack.points[0], [0.0, h, 0.0])
        np.testing.assert_allclose(pack.points[49] - pack.points[0], [h, 0.0, 0.0])
        node = 2 * 49 + 3 * 7 + 5
        np.testing.assert_allclose(pack.points[node], [0.2, 0.3, 0.5])
        grid = pack.grid_field('riemann')
        self.assertEqual(grid.shape, (7, 7, 7, 3, 3, 3, 3))
        np.testing.assert_array_equal(grid[2, 3, 5], pack.riemann[node])
        pointwise = build_curvature(chart, pack.points[[node]])
        np.testing.assert_allclose(pointwise.riemann[0], pack.riemann[node], rtol=1e-12,
                                   atol=1e-12)
        with self.assertRaises(DomainError):
            pointwise.grid_field('riemann')
        with self.assertRaises(DomainError):
            build_curvature(chart, 'lattice')


class TestBoundary(unittest.TestCase):
    """边界切片与边界恒等式。"""

    def test_flat_face(self):
        """平坦半球面 x_n = 0: L = 0, h = 0, 恒等式 0 = 0。"""
        chart = half_ball_flat(3, resolution=21)
        slc = build_boundary(chart, points=chart.boundary_probe_points(8))
        np.testing.assert_array_equal(slc.L, 0.0)
        np.testing.assert_array_equal(slc.h, 0.0)
        report = check_boundary_identities(slc)
        for key in ('a', 'b', 'c_curvature', 'c_normal'):
            self.assertLess(report[key], 1e-9, key)

    def test_flat_unit_sphere(self):
        """平坦单位球面, 内法向: μ = 1。"""
        chart = ball_conformally_flat(3, resolution=21)
        slc = build_boundary(chart, points=chart.boundary_probe_points(8))
        np.testing.assert_allclose(slc.mu, 1.0, atol=1e-12)
        np.testing.assert_allclose(slc.h, 2.0, atol=1e-12)
        self.assertTrue(slc.umbilic)

    def test_hemisphere_equator(self):
        """球模型赤道全测地: μ̂ = −1 + 1 = 0。"""
        chart = hemisphere(4, resolution=41)
        slc = build_boundary(chart, points=chart.boundary_probe_points(8))
        np.testing.assert_allclose(slc.mu, 0.0, atol=1e-5)
        report = check_boundary_identities(slc)
        for key in ('a', 'b', 'c_curvature', 'c_normal'):
            self.assertLess(report[key], 1e-3, key)

    def test_identities_refine(self):
        """随机光滑共形指数的半球面: 边界恒等式残差随加密下降。"""
        w = ConformalExponent.random_smooth(3, seed=2)
        points = half_ball_flat(3, w).boundary_probe_points(6, seed=4)
        reports = []
        for resolution in (21, 41):
            chart = half_ball_flat(3, w, resolution=resolution)
            reports.append(check_boundary_identities(build_boundary(chart, points=points)))
        for key in ('a', 'b', 'c_curvature'):
            self.assertTrue(_refines(reports[0][key], reports[1][key]), (key, reports))
            self.assertLess(reports[1][key], 1e-4, key)

    def test_structure_t_radial(self):
        """径向扰动指数的球: S = A 满足 (T0)–(T2)。"""
        chart = ball_conformally_flat(4, ConformalExponent.perturbed(0.2), resolution=41)
        slc = build_boundary(chart, points=chart.boundary_probe_points(6))
        report = check_structure_t(slc)
        self.assertLess(report['T0'], 1e-12)
        self.assertLess(report['T1'], 1e-4)
        self.assertLess(report['T2'], 1e-3)

    def test_warped_general_chart(self):
        """通用差分管线: 翘曲度量的边界 μ = c, 恒等式成立。"""
        chart = chart_from_config({'kind': 'general_grid', 'n': 3, 'metric': 'warped',
                                   'c': 0.5, 'resolution': 21})
        slc = build_boundary(chart, points=chart.boundary_probe_points(6), require_umbilic=True)
        np.testing.assert_allclose(slc.mu, 0.5, atol=1e-8)
        report = check_boundary_identities(slc)
        for key in ('a', 'b', 'c_curvature', 'c_normal'):
            self.assertLess(report[key], 1e-4, key)

    def test_non_umbilic_rejected(self):
        """倾斜度量的边界面不是全脐的。"""
        chart = general_grid(3, tilted_metric(3, 0.2), [-0.5, -0.5, 0.0], [0.5, 0.5, 0.5],
                             resolution=21)
        with self.assertRaises(UmbilicityError) as ctx:
            build_boundary(chart, points=chart.boundary_probe_points(4), require_umbilic=True)
        self.assertGreater(ctx.exception.residual, 1e-6)

    def test_fermi_flat(self):
        """平坦半球面: 三类 Christoffel 符号全为零。"""
        chart = half_ball_flat(3, resolution=21)
        table = fermi_christoffels(build_boundary(chart, points=chart.boundary_probe_points(4)))
        self.assertEqual(len(table), 4)
        self.assertLess(float(table['max_abs'].max()), 1e-9)
        self.assertLess(float(table['residual'].max()), 1e-9)

    def test_fermi_radial_profile(self):
        """μ ≠ 0 的 Fermi 坐标卡: 差分 Christoffel 与预期值一致。"""
        chart = radial_profile(3, ConformalExponent.polynomial([0.0, 0.2]), resolution=21)
        slc = build_boundary(chart, points=chart.boundary_probe_points(4))
        np.testing.assert_allclose(slc.mu, chart.extras["mu"], atol=1e-5)
        self.assertAlmostEqual(chart.extras['mu'], 0.6 * np.exp(0.2), places=12)
        table = fermi_christoffels(slc).set_index('symbol')
        self.assertLess(table['residual'].max(), 1e-5)
        self.assertEqual(table.loc['Gamma^n_an', 'max_abs'], 0.0)

    def test_fermi_rejects_non_fermi(self):
        chart = ball_conformally_flat(3, resolution=21)
        slc = build_boundary(chart, points=chart.boundary_probe_points(4))
        with self.assertRaises(UnsupportedChartError):
            fermi_christoffels(slc)
        chart = half_ball_flat(3, ConformalExponent.random_smooth(3), resolution=21)
        slc = build_boundary(chart, points=chart.boundary_probe_points(4))
        with self.assertRaises(UnsupportedChartError):
            fermi_christoffels(slc)

    def test_normal_derivative_identities(self):
        """满足 u_n = −μ + μ̂e^{−u} 的 u: 一阶与二阶法向导数恒等式。"""
        w = ConformalExponent.random_smooth(3, seed=7, amplitude=0.15)
        chart = half_ball_flat(3, w, resolution=41)
        u = compatible_factor(chart, lambda x: 0.1 * np.sin(x[:, 0]) + 0.2 * x[:, 1] ** 2,
                              mu_hat=0.5, q=lambda x: 0.3 * x[:, 0])
        slc = build_boundary(chart, points=chart.boundary_probe_points(5, seed=2))
        report = check_normal_derivative_identities(slc, u, mu_hat=0.5)
        self.assertLess(report['boundary_condition'], 1e-6)
        self.assertLess(report["nga"], 1e-4)
        self.assertLess(report["ngagb"], 1e-3)

    def test_compatible_factor_requires_half_ball(self):
        with self.assertRaises(UnsupportedChartError):
            compatible_factor(hemisphere(3), lambda x: x[:, 0], 0.5)

    def test_boundary_bianchi(self):
        """平坦球上取 u = round 指数 (L̂ = 0): 边界 Bianchi 恒等式。"""
        chart = ball_conformally_flat(4, resolution=41)
        u = ConformalExponent.round()
        slc = build_boundary(chart, points=chart.boundary_probe_points(6))
        report = check_boundary_bianchi(slc, u)
        self.assertLess(report["second_form"], 1e-5)
        self.assertLess(report["bianchi"], 1e-3)
        self.assertGreater(report['scale'], 1.0)


if __name__ == '__main__':
    unittest.main()
