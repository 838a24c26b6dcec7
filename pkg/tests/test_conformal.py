#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试共形变换、边界曲率项、Gauss-Bonnet 被积函数与 F_k 泛函。
"""

import unittest
from math import pi

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sigma_yamabe.config import config
from sigma_yamabe.conformal import (
    BoundaryGeometry,
    QuadratureOrders,
    apply_conformal,
    b2_decomposition_residual,
    ball_rule,
    boundary_B2,
    boundary_Bk,
    boundary_gb4,
    boundary_geometry,
    box_rule,
    c1,
    c2,
    conformal_volume,
    deform,
    deformed_conformal_schouten,
    deformed_tensor,
    double_factorial,
    euler_characteristic,
    evaluate_functional,
    functional_Fk,
    gauss_bonnet_four,
    gauss_bonnet_integrands,
    half_ball_rule,
    l4_invariant,
    l4_weight_check,
    pfaffian_density,
    sigma2_four_expansion,
    sphere_rule,
    theta_tensor_four,
    umbilic_bracket,
    umbilic_closed_B2,
)
from sigma_yamabe.errors import DomainError, UmbilicityError, UnsupportedChartError
from sigma_yamabe.geom import (
    ConformalExponent,
    ball_conformally_flat,
    build_boundary,
    build_curvature,
    general_grid,
    half_ball_flat,
    hemisphere,
    kulkarni_nomizu,
    tilted_metric,
)
from sigma_yamabe.symfun import sample_cone

SMALL_ORDERS = QuadratureOrders(radial=12, angular=10, azimuth=16, box=9)


def _random_symmetric(rng, count, m, scale=0.5):
    X = rng.normal(scale=scale, size=(count, m, m))
    return 0.5 * (X + np.swapaxes(X, -1, -2))


def _umbilic_geometry(A_ON, mu):
    """由正交标架下的 A 与 μ 构造带 Riemann 分量的脐边界数据(𝒲 = 0)。"""
    n = A_ON.shape[-1]
    m = n - 1
    L = mu[:, None, None] * np.eye(m)
    return BoundaryGeometry(A_T=A_ON[:, :-1, :-1], A_tn=A_ON[:, :-1, -1], A_nn=A_ON[:, -1, -1],
                            L=L, mu=mu, h=m * mu, R_ON=kulkarni_nomizu(A_ON, np.eye(n)))


class TestQuadrature(unittest.TestCase):
    """求积规则的测度与多项式精度。"""

    def test_sphere_measures(self):
        """|S^2| = 4π, |S^3| = 2π²。"""
        self.assertAlmostEqual(sphere_rule(2, 8, 16).measure, 4 * pi, places=12)
        self.assertAlmostEqual(sphere_rule(3, 8, 16).measure, 2 * pi ** 2, places=12)

    def test_ball_measure(self):
        """|B^4| = π²/2。"""
        self.assertAlmostEqual(ball_rule(4, SMALL_ORDERS).measure, pi ** 2 / 2, places=12)

    def test_half_ball(self):
        """|B^3_+| = 2π/3, ∫x_3 = π/4。"""
        rule = half_ball_rule(3, SMALL_ORDERS)
        self.assertAlmostEqual(rule.measure, 2 * pi / 3, places=10)
        self.assertAlmostEqual(rule.integrate(lambda x: x[:, 2]), pi / 4, places=10)

    def test_sphere_polynomial(self):
        """∫_{S^2} x_1² = 4π/3。"""
        rule = sphere_rule(2, 8, 16)
        self.assertAlmostEqual(rule.integrate(lambda x: x[:, 0] ** 2), 4 * pi / 3, places=12)

    def test_box_rule(self):
        """Simpson 规则对三次多项式精确。"""
        rule = box_rule(np.array([0.0, -1.0]), np.array([1.0, 1.0]), 9)
        value = rule.integrate(lambda x: x[:, 0] ** 3 + x[:, 1] ** 2)
        self.assertAlmostEqual(value, 0.5 + 2.0 / 3.0, places=12)

    def test_batched_sum_is_deterministic(self):
        """分批大小不影响积分到舍入误差。"""
        rule = ball_rule(3, SMALL_ORDERS)
        f = lambda x: np.exp(x[:, 0]) * np.cos(x[:, 1])  # noqa: E731
        self.assertAlmostEqual(rule.integrate(f, batch=7), rule.integrate(f, batch=10000),
                               places=12)


class TestBoundaryTerms(unittest.TestCase):
    """B²、B^k、ℬ 与 ℒ₄ 的代数性质。"""

    def test_double_factorial(self):
        """(−1)!! = 0!! = 1, 5!! = 15, 6!! = 48。"""
        self.assertEqual(double_factorial(-1), 1)
        self.assertEqual(double_factorial(0), 1)
        self.assertEqual(double_factorial(5), 15)
        self.assertEqual(double_factorial(6), 48)
        with self.assertRaises(DomainError):
            double_factorial(-3)

    def test_coefficients_match_b2(self):
        """k = 2 时 C_1 回到 B² 的系数。"""
        for n in (4, 5, 6, 7):
            self.assertAlmostEqual(c1(n, 2, 1), 2.0 / (n - 2))
            self.assertAlmostEqual(c1(n, 2, 0), 2.0 / ((n - 2) * (n - 3)))
            self.assertAlmostEqual(c2(n, 2, 1), 1.0)
            self.assertAlmostEqual(c2(n, 2, 0), (n - 1) / 3.0)

    def test_totally_geodesic_b2(self):
        """L = 0 时 B² = 0。"""
        rng = np.random.default_rng(0)
        for n in (3, 4, 6):
            A_T = _random_symmetric(rng, 20, n - 1)
            geom = BoundaryGeometry.umbilic(A_T, np.zeros(20))
            np.testing.assert_allclose(boundary_B2(geom), 0.0, atol=1e-12)

    def test_umbilic_closed_forms(self):
        """脐边界: n >= 4 为 (σ_1 + (n−1)μ²/3)μ, n = 3 为 (σ_1 + 2μ²/3)μ。"""
        rng = np.random.default_rng(1)
        for n in (3, 4, 5, 7):
            A_T = _random_symmetric(rng, 50, n - 1)
            mu = rng.uniform(-1.0, 1.0, 50)
            geom = BoundaryGeometry.umbilic(A_T, mu)
            np.testing.assert_allclose(boundary_B2(geom), umbilic_closed_B2(A_T, mu),
                                       rtol=1e-10, atol=1e-12)

    def test_general_equals_umbilic(self):
        """L = μI 时 B^k 的两种形式一致。"""
        rng = np.random.default_rng(2)
        for n, k in ((6, 3), (8, 3), (8, 4)):
            A_T = _random_symmetric(rng, 1000, n - 1)
            mu = rng.uniform(-1.0, 1.0, 1000)
            geom = BoundaryGeometry.umbilic(A_T, mu)
            general = boundary_Bk(geom, n, k, form='general')
            umbilic = boundary_Bk(geom, n, k, form='umbilic')
            np.testing.assert_allclose(general, umbilic, rtol=1e-9, atol=1e-10)

    def test_zero_mean_curvature(self):
        """h = 0 的脐边界上 B^k = 0。"""
        rng = np.random.default_rng(3)
        for n, k in ((4, 2), (6, 3), (5, 3)):
            A_T = _random_symmetric(rng, 30, n - 1)
            geom = BoundaryGeometry.umbilic(A_T, np.zeros(30))
            np.testing.assert_allclose(boundary_Bk(geom, n, k), 0.0, atol=1e-12)

    def test_bracket_positive_in_cone(self):
        """A ∈ Γ_k^+ 时脐形式的括号为正, 故 B^k = 0 推出 μ = 0。"""
        rng = np.random.default_rng(4)
        for n, k in ((4, 2), (5, 3), (6, 3)):
            lam = sample_cone(n, k, 200, seed=n + k)
            A_T = np.zeros((200, n - 1, n - 1))
            idx = np.arange(n - 1)
            A_T[:, idx, idx] = lam[:, :-1]
            mu = rng.uniform(-2.0, 2.0, 200)
            self.assertTrue(np.all(umbilic_bracket(A_T, mu, k) > 0))
            geom = BoundaryGeometry.umbilic(A_T, mu)
            Bk = boundary_Bk(geom, n, k, form='umbilic')
            np.testing.assert_allclose(Bk, umbilic_bracket(A_T, mu, k) * mu, rtol=1e-12)

    def test_form_errors(self):
        """n < 2k 时一般形式与非脐边界报错。"""
        rng = np.random.default_rng(5)
        A_T = _random_symmetric(rng, 5, 4)
        L = _random_symmetric(rng, 5, 4)
        mu = np.trace(L, axis1=-2, axis2=-1) / 4
        geom = BoundaryGeometry(A_T=A_T, A_tn=np.zeros((5, 4)), A_nn=np.zeros(5), L=L, mu=mu,
                                h=4 * mu)
        with self.assertRaises(DomainError):
            boundary_Bk(geom, 5, 3, form='general')
        with self.assertRaises(DomainError):
            boundary_Bk(geom, 5, 3)
        with self.assertRaises(UmbilicityError):
            boundary_Bk(geom, 5, 3, form='umbilic')
        with self.assertRaises(DomainError):
            boundary_Bk(geom, 5, 3, form='spectral')
        with self.assertRaises(DomainError):
            boundary_B2(BoundaryGeometry.umbilic(np.zeros((1, 1, 1)), np.zeros(1)))

    def test_b2_decomposition(self):
        """𝒲 = 0 的脐边界上 B² = ½ℬ + ¼ℒ₄, 且 ℒ₄ = 0。"""
        rng = np.random.default_rng(6)
        A_ON = _random_symmetric(rng, 100, 4)
        mu = rng.uniform(-1.0, 1.0, 100)
        geom = _umbilic_geometry(A_ON, mu)
        self.assertLess(np.max(b2_decomposition_residual(geom)), 1e-10)
        np.testing.assert_allclose(l4_invariant(geom), 0.0, atol=1e-10)

    def test_gb4_simple_cases(self):
        """全测地边界 ℬ = 0; 平坦单位球面 ℬ = 2。"""
        rng = np.random.default_rng(7)
        A_ON = _random_symmetric(rng, 10, 4)
        np.testing.assert_allclose(boundary_gb4(_umbilic_geometry(A_ON, np.zeros(10))), 0.0,
                                   atol=1e-12)
        flat = _umbilic_geometry(np.zeros((3, 4, 4)), np.ones(3))
        np.testing.assert_allclose(boundary_gb4(flat), 2.0, atol=1e-12)
        with self.assertRaises(DomainError):
            boundary_gb4(BoundaryGeometry.umbilic(np.zeros((2, 4, 4)), np.ones(2)))

    def test_flat_half_ball(self):
        """平坦半球面片的 ℬ = ℒ₄ = 0。"""
        chart = half_ball_flat(4, resolution=21)
        x = chart.boundary_probe_points(16, seed=0)
        geom = boundary_geometry(chart, x, with_curvature=True)
        np.testing.assert_allclose(boundary_gb4(geom), 0.0, atol=1e-10)
        np.testing.assert_allclose(l4_invariant(geom), 0.0, atol=1e-10)

    def test_decomposition_on_conformally_flat_chart(self):
        """共形平坦球坐标卡的边界上 B² = ½ℬ + ¼ℒ₄。"""
        chart = ball_conformally_flat(4, ConformalExponent.random_smooth(4, seed=2),
                                      resolution=31)
        x = chart.boundary_probe_points(16, seed=1)
        geom = boundary_geometry(chart, x, lambda p: 0.1 * p[:, 0], with_curvature=True)
        scale = max(1.0, float(np.max(np.abs(boundary_B2(geom)))))
        self.assertLess(np.max(b2_decomposition_residual(geom)), 1e-8 * scale)

    def test_l4_weight(self):
        """ℒ₄(ĝ) = e^{3u}ℒ₄(g): 一般度量与脐共形平坦边界。"""
        u = lambda p: 0.2 * np.sin(p[:, 0]) + 0.1 * p[:, -1]  # noqa: E731
        chart = general_grid(4, tilted_metric(4, 0.2), np.array([-0.5, -0.5, -0.5, 0.0]),
                             np.array([0.5, 0.5, 0.5, 0.5]), resolution=21)
        report = l4_weight_check(chart, u, seed=3)
        self.assertLess(report['residual'], 1e-6 * max(1.0, report['scale']))
        report = l4_weight_check(hemisphere(4, resolution=31), u, seed=3)
        self.assertLess(report['residual'], 1e-6)


class TestConformalState(unittest.TestCase):
    """apply_conformal 的平凡与往返情形。"""

    @classmethod
    def setUpClass(cls):
        cls.chart = hemisphere(4, resolution=41)
        cls.pack = build_curvature(cls.chart)
        cls.slice = build_boundary(cls.chart)

    def test_identity_change(self):
        """u ≡ 0: Â = A, μ̂ = μ。"""
        state = apply_conformal(self.pack, self.slice)
        np.testing.assert_allclose(state.A_hat, self.pack.schouten, atol=1e-12)
        np.testing.assert_allclose(state.mu_hat, self.slice.mu, atol=1e-12)
        np.testing.assert_allclose(state.volume_factor, 1.0)

    def test_constant_shift(self):
        """u ≡ c: Â 分量不变, V_ĝ = e^{−nc}V_g。"""
        c = 0.3
        state = apply_conformal(self.pack, self.slice, lambda x: np.full(len(x), c))
        np.testing.assert_allclose(state.A_hat, self.pack.schouten, atol=1e-8)
        np.testing.assert_allclose(state.mu_hat, np.exp(c) * self.slice.mu, atol=1e-8)
        V = conformal_volume(self.chart, orders=SMALL_ORDERS)
        V_hat = conformal_volume(self.chart, lambda x: np.full(len(x), c), SMALL_ORDERS)
        self.assertAlmostEqual(V_hat, np.exp(-4 * c) * V, places=10)

    def test_round_trip_to_flat(self):
        """半球面上取 u = −w 回到平坦度量, Â ≡ 0。"""
        state = apply_conformal(self.pack, self.slice, lambda x: -self.chart.w(x))
        np.testing.assert_allclose(state.A_hat, 0.0, atol=1e-12)
        np.testing.assert_allclose(state.sigma_hat(2), 0.0, atol=1e-12)

    def test_round_sphere_boundary(self):
        """半球面的赤道全测地, A^T = ½I。"""
        x = self.chart.boundary_probe_points(8, seed=4)
        geom = boundary_geometry(self.chart, x)
        np.testing.assert_allclose(geom.mu, 0.0, atol=1e-5)
        np.testing.assert_allclose(geom.A_T, np.broadcast_to(0.5 * np.eye(3), geom.A_T.shape),
                                   atol=1e-4)

    def test_state_matches_pointwise_geometry(self):
        """切片路径与逐点路径给出相同的 μ̂。"""
        u = lambda x: 0.1 * x[:, 0] + 0.05 * np.sum(x ** 2, axis=-1)  # noqa: E731
        state = apply_conformal(self.pack, self.slice, u)
        geom = boundary_geometry(self.chart, self.slice.points, u)
        np.testing.assert_allclose(state.mu_hat, geom.mu, atol=1e-10)
        np.testing.assert_allclose(state.boundary.A_T, geom.A_T, atol=1e-10)


class TestGaussBonnet(unittest.TestCase):
    """E_n 与 Q_{i,n} 的两条路径。"""

    def test_round_sphere(self):
        """半球面: E_4 = 8σ_2 = 12, 两条路径一致。"""
        chart = hemisphere(4, resolution=41)
        pack = build_curvature(chart)
        gb = gauss_bonnet_integrands(pack, build_boundary(chart))
        np.testing.assert_allclose(gb.E_sigma, 12.0, atol=2e-3)
        self.assertLess(gb.interior_discrepancy, 1e-10)
        self.assertLess(gb.boundary_discrepancy, 1e-10)
        self.assertEqual(gb.Q_sum.shape[-1], 2)

    def test_flat_chart(self):
        """平坦图册上 E_n = Q_{i,n} = 0。"""
        chart = half_ball_flat(4, resolution=21)
        gb = gauss_bonnet_integrands(build_curvature(chart), build_boundary(chart))
        np.testing.assert_allclose(gb.E_pfaffian, 0.0, atol=1e-12)
        np.testing.assert_allclose(gb.Q_sum, 0.0, atol=1e-12)
        np.testing.assert_allclose(gb.Q_closed, 0.0, atol=1e-12)

    def test_random_conformally_flat(self):
        """随机共形平坦度量: 两条路径一致。"""
        chart = ball_conformally_flat(4, ConformalExponent.random_smooth(4, seed=3),
                                      resolution=41)
        old = config.get('geom.weyl_threshold')
        config.set('geom.weyl_threshold', 0.1, save=False)
        try:
            gb = gauss_bonnet_integrands(build_curvature(chart), build_boundary(chart))
        finally:
            config.set('geom.weyl_threshold', old, save=False)
        scale = max(1.0, float(np.max(np.abs(gb.E_sigma))))
        self.assertLess(gb.interior_discrepancy, 1e-8 * scale)
        scale = max(1.0, float(np.max(np.abs(gb.Q_closed))))
        self.assertLess(gb.boundary_discrepancy, 1e-8 * scale)
        self.assertEqual(len(gb.to_frame()), 3)

    def test_sigma_path_q_six(self):
        """n = 6 的 Q_{i,6} 两条路径在随机数据上一致。"""
        from sigma_yamabe.conformal import q_density_closed, q_density_sum

        rng = np.random.default_rng(8)
        A_T = _random_symmetric(rng, 5, 5)
        L = _random_symmetric(rng, 5, 5)
        for i in range(3):
            np.testing.assert_allclose(q_density_sum(A_T, L, i), q_density_closed(A_T, L, i),
                                       rtol=1e-9, atol=1e-10)

    def test_non_conformally_flat_rejected(self):
        """一般度量的 𝒲 超出阈值时报错。"""
        chart = general_grid(4, tilted_metric(4, 0.2), np.array([-0.5, -0.5, -0.5, 0.0]),
                             np.array([0.5, 0.5, 0.5, 0.5]), resolution=21)
        with self.assertRaises(UnsupportedChartError):
            gauss_bonnet_integrands(build_curvature(chart))

    def test_four_dimensional_assembly(self):
        """半球面: 32π²χ = ∫|𝒲|² + 16(∫σ_2 + ½∮ℬ) 给出 χ = 1。"""
        chart = hemisphere(4, resolution=41)
        report = gauss_bonnet_four(chart, QuadratureOrders(8, 6, 8, 5))
        self.assertAlmostEqual(report['chi'], 1.0, delta=1e-2)
        self.assertEqual(report['chi_expected'], 1)
        self.assertLess(abs(report['boundary']), 1e-3)
        self.assertLess(report['weyl'], 1e-3)

    def test_four_dimensional_assembly_curved_boundary(self):
        """w = 0.3r² 的共形平坦球: 边界非全测地, ∮ℬ 不为零, χ 仍为 1。"""
        chart = ball_conformally_flat(4, ConformalExponent.polynomial([0.0, 0.3]),
                                      resolution=41)
        report = gauss_bonnet_four(chart)
        self.assertGreater(abs(report['boundary']), 1.0)
        self.assertAlmostEqual(report['chi'], 1.0, delta=1e-2)
        self.assertEqual(report['chi_expected'], 1)

    def test_odd_dimension_rejected(self):
        with self.assertRaises(DomainError):
            pfaffian_density(np.zeros((1, 5, 5, 5, 5)))

    def test_euler_characteristic(self):
        """χ = F_{n/2}(n/2)!/(2π)^{n/2}。"""
        self.assertAlmostEqual(euler_characteristic(2 * pi ** 2, 4), 1.0)
        self.assertAlmostEqual(euler_characteristic(8 * pi ** 3 / 3, 6), 2.0)


class TestFunctional(unittest.TestCase):
    """F_k 的求积。"""

    @classmethod
    def setUpClass(cls):
        cls.chart = hemisphere(4, resolution=41)
        cls.value = evaluate_functional(cls.chart, k=2, orders=SMALL_ORDERS)

    def test_hemisphere_value(self):
        """半球面 F_2 = 2π², χ = 1。"""
        self.assertAlmostEqual(self.value.total, 2 * pi ** 2, delta=1e-2)
        self.assertAlmostEqual(self.value.interior, 1.5 * 4 * pi ** 2 / 3, delta=1e-2)
        self.assertLess(abs(self.value.boundary), 1e-3)
        self.assertAlmostEqual(euler_characteristic(self.value.total, 4), 1.0, delta=1e-3)
        self.assertAlmostEqual(self.value.volume, 4 * pi ** 2 / 3, delta=1e-8)
        self.assertTrue(np.isfinite(self.value.error))

    def test_conformal_invariance(self):
        """F_2 在 n = 4 的共形变换下不变。"""
        u = lambda x: 0.1 * x[:, 0] + 0.05 * np.sum(x ** 2, axis=-1)  # noqa: E731
        pack = build_curvature(self.chart)
        state = apply_conformal(pack, build_boundary(self.chart), u)
        value = functional_Fk(state, 2, SMALL_ORDERS)
        drift = abs(value.total - self.value.total)
        self.assertLess(drift, max(3 * max(value.error, self.value.error), 1e-2))
        self.assertGreater(abs(value.boundary), 1e-3)

    def test_flat_ball_boundary(self):
        """平坦单位球: F_2 全部来自边界, 等于 2π²。"""
        chart = ball_conformally_flat(4, resolution=21)
        value = evaluate_functional(chart, k=2, orders=SMALL_ORDERS, estimate_error=False)
        self.assertAlmostEqual(value.interior, 0.0, places=10)
        self.assertAlmostEqual(value.boundary, 2 * pi ** 2, places=8)
        self.assertTrue(np.isnan(value.error))

    def test_flat_half_ball(self):
        """平坦半球面片上 F_k = 0。"""
        chart = half_ball_flat(4, resolution=21)
        for k in (1, 2, 3):
            value = evaluate_functional(chart, k=k, orders=SMALL_ORDERS, estimate_error=False)
            self.assertAlmostEqual(value.total, 0.0, places=10)

    def test_l4_only_for_four(self):
        with self.assertRaises(DomainError):
            evaluate_functional(half_ball_flat(5, resolution=21), k=2, with_l4=True)
        with self.assertRaises(DomainError):
            evaluate_functional(self.chart, k=4)


class TestDeformation(unittest.TestCase):
    """形变张量 A^t。"""

    @given(st.floats(min_value=-5.0, max_value=1.0), st.integers(min_value=0, max_value=2 ** 16))
    @settings(max_examples=50, deadline=None)
    def test_trace_identity(self, t, seed):
        """tr A^t = (1 + n(1−t)/2) tr A。"""
        rng = np.random.default_rng(seed)
        n = 5
        A = _random_symmetric(rng, 4, n)
        B = rng.normal(size=(4, n, n))
        g = B @ np.swapaxes(B, -1, -2) + n * np.eye(n)
        g_inv = np.linalg.inv(g)
        trace = np.einsum('nij,nij->n', g_inv, A)
        deformed = np.einsum('nij,nij->n', g_inv, deform(A, g, g_inv, t))
        np.testing.assert_allclose(deformed, (1 + n * (1 - t) / 2) * trace, rtol=1e-9,
                                   atol=1e-10)

    @given(st.floats(min_value=-10.0, max_value=1.0), st.integers(min_value=0, max_value=2 ** 16))
    @settings(max_examples=50, deadline=None)
    def test_sigma2_expansion(self, t, seed):
        """n = 4: σ_2(A^t) = σ_2(A) + (3/2)(1−t)(2−t)σ_1(A)²。"""
        A = _random_symmetric(np.random.default_rng(seed), 8, 4)
        direct, closed = sigma2_four_expansion(A, t)
        np.testing.assert_allclose(direct, closed, rtol=1e-9, atol=1e-9)

    def test_pack_level(self):
        """t = 1 回到 A; A^{−Θ} = ½(Ric + (Θ/6)Rg); 参数越界报错。"""
        chart = general_grid(4, tilted_metric(4, 0.1), np.array([-0.5, -0.5, -0.5, 0.0]),
                             np.array([0.5, 0.5, 0.5, 0.5]), resolution=21)
        pack = build_curvature(chart)
        np.testing.assert_array_equal(deformed_tensor(pack, 1.0).values, pack.schouten)
        theta = 20.0
        D = deformed_tensor(pack, -theta, theta)
        np.testing.assert_allclose(D.values, theta_tensor_four(pack, theta), atol=1e-9)
        np.testing.assert_allclose(D.trace(), (1 + 2 * (1 + theta)) * np.einsum(
            'nij,nij->n', pack.g_inv, pack.schouten), rtol=1e-9, atol=1e-9)
        with self.assertRaises(DomainError):
            deformed_tensor(pack, 1.5)
        with self.assertRaises(DomainError):
            deformed_tensor(pack, -2.0, theta=1.0)

    def test_positive_curvature_theta(self):
        """半球面上 A^{−Θ} 正定。"""
        chart = hemisphere(4, resolution=41)
        pack = build_curvature(chart)
        D = deformed_tensor(pack, -10.0, 10.0)
        self.assertTrue(D.positive_definite(pack.frame(), margin=0.1))
        u = lambda x: 0.1 * x[:, 1]  # noqa: E731
        Dh = deformed_conformal_schouten(pack, u, -10.0, 10.0)
        self.assertEqual(Dh.values.shape, pack.schouten.shape)


if __name__ == '__main__':
    unittest.main()
