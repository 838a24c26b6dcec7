#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试一阶变分、局部不变量变分、体积变分与 Euler-Lagrange 残差。
"""

import unittest
from math import pi

import numpy as np

from sigma_yamabe.conformal import QuadratureOrders, apply_conformal, integrate_interior
from sigma_yamabe.errors import ConfigError, DomainError
from sigma_yamabe.geom import (
    ConformalExponent,
    ball_conformally_flat,
    build_boundary,
    build_curvature,
    half_ball_flat,
    hemisphere,
)
from sigma_yamabe.variation import (
    Perturbation,
    divergence_free_check,
    euler_lagrange_residual,
    first_variation_check,
    local_invariant_variation_check,
    order_estimate,
    richardson,
    volume_variation_check,
)

ORDERS_4 = QuadratureOrders(radial=10, angular=6, azimuth=8, box=9)
ORDERS_5 = QuadratureOrders(radial=8, angular=6, azimuth=8, box=9)
ORDERS_6 = QuadratureOrders(radial=6, angular=4, azimuth=6, box=9)


def _state(chart, with_boundary=True):
    pack = build_curvature(chart)
    return apply_conformal(pack, build_boundary(chart) if with_boundary else None)


class TestExtrapolation(unittest.TestCase):
    """Richardson 外推与收敛阶估计。"""

    def test_richardson_exact_for_even_series(self):
        """D(t) = 3 + 2t² + 5t⁴ 外推回 3。"""
        steps = [1e-1, 5e-2, 2.5e-2]
        values = [3 + 2 * t ** 2 + 5 * t ** 4 for t in steps]
        self.assertAlmostEqual(richardson(steps, values), 3.0, places=12)

    def test_order_estimate(self):
        """t² 误差给出阶 2; 常数序列给出 NaN。"""
        steps = [1e-2, 5e-3, 2.5e-3]
        self.assertAlmostEqual(order_estimate(steps, [1 + t ** 2 for t in steps]), 2.0, places=6)
        self.assertTrue(np.isnan(order_estimate(steps, [1.0, 1.0, 1.0])))


class TestPerturbations(unittest.TestCase):
    """扰动目录。"""

    def test_catalog(self):
        x = np.array([[0.5, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
        np.testing.assert_allclose(Perturbation.from_config('x1_mode')(x), [0.5, 0.0])
        np.testing.assert_allclose(Perturbation.constant(2.0)(x), [2.0, 2.0])
        np.testing.assert_allclose(Perturbation.neumann_bump(0.5)(x)[1], 1.0)
        bump = Perturbation.from_config({'name': 'radial_bump', 'width': 1.0})
        np.testing.assert_allclose(bump(x), np.exp(-0.5 * np.array([0.25, 1.0])))
        np.testing.assert_array_equal(Perturbation.from_config('zero')(x), [0.0, 0.0])

    def test_unknown_perturbation(self):
        with self.assertRaises(ConfigError):
            Perturbation.from_config('dipole')
        with self.assertRaises(ConfigError):
            Perturbation.from_config({'name': 'constant', 'slope': 1.0})

    def test_volume_preserving_projection(self):
        """投影后 ∫φ dV = 0。"""
        chart = hemisphere(4, resolution=21)
        phi = Perturbation.radial_bump().project(chart, orders=ORDERS_4)
        self.assertTrue(phi.volume_preserving)
        self.assertAlmostEqual(integrate_interior(chart, phi, orders=ORDERS_4), 0.0, places=10)


class TestFirstVariation(unittest.TestCase):
    """dF_k/dt 与闭式的比较。"""

    def test_constant_direction(self):
        """φ ≡ c, n = 5, k = 2: F 按 e^{(2k−n)tc} 缩放。"""
        state = _state(hemisphere(5, resolution=41))
        report = first_variation_check(state, 2, Perturbation.constant(0.5),
                                       steps=[1e-3, 5e-4, 2.5e-4], orders=ORDERS_5)
        self.assertLess(report.relative_residual, 1e-5)
        self.assertLess(report.formula_value, 0.0)

    def test_radial_bump_five(self):
        """n = 5, k = 2, 径向扰动。"""
        state = _state(hemisphere(5, resolution=81))
        report = first_variation_check(state, 2, Perturbation.radial_bump(), orders=ORDERS_5)
        self.assertLess(report.relative_residual, 1e-3)
        self.assertEqual(len(report.derivatives), 3)
        self.assertIn('relative_residual', report.to_dict())

    def test_radial_bump_six(self):
        """n = 6, k = 2, 径向扰动。"""
        state = _state(hemisphere(6, resolution=81))
        report = first_variation_check(state, 2, Perturbation.radial_bump(), orders=ORDERS_6)
        self.assertLess(report.relative_residual, 1e-3)

    def test_critical_dimension(self):
        """n = 2k 时 F_{n/2} 与度量无关, 导数为零。"""
        state = _state(hemisphere(4, resolution=81))
        report = first_variation_check(state, 2, Perturbation.radial_bump(), orders=ORDERS_4)
        self.assertEqual(report.formula_value, 0.0)
        self.assertLess(abs(report.fd_derivative), 1e-3)

    def test_zero_direction(self):
        """φ = 0 经过同一差分流程, 每个中心差分都恰为零。"""
        state = _state(hemisphere(4, resolution=21))
        report = first_variation_check(state, 2, Perturbation.zero(), orders=ORDERS_4)
        self.assertEqual(report.derivatives, [0.0] * len(report.steps))
        self.assertEqual(report.fd_derivative, 0.0)
        self.assertEqual(report.residual, 0.0)
        self.assertTrue(np.isnan(report.order_estimate))

    def test_curved_boundary_five(self):
        """w = 0.3r² 的共形平坦球, 边界脐但 μ ≠ 0, B² 项参与比较。"""
        chart = ball_conformally_flat(5, ConformalExponent.polynomial([0.0, 0.3]), resolution=81)
        report = first_variation_check(_state(chart), 2, Perturbation.radial_bump(),
                                       orders=ORDERS_5)
        self.assertNotEqual(report.extras['boundary'], 0.0)
        self.assertLess(report.relative_residual, 1e-3)

    def test_curved_boundary_critical(self):
        """同一球在 n = 4: 弯曲边界上 F_2 仍与共形因子无关。"""
        chart = ball_conformally_flat(4, ConformalExponent.polynomial([0.0, 0.3]), resolution=81)
        report = first_variation_check(_state(chart), 2, Perturbation.radial_bump(),
                                       orders=ORDERS_4)
        self.assertLess(abs(report.fd_derivative), 1e-3)

    def test_first_order_excluded(self):
        """k = 1 没有对应的边界项, 拒绝。"""
        state = _state(hemisphere(4, resolution=21))
        with self.assertRaises(DomainError):
            first_variation_check(state, 1, Perturbation.constant())
        with self.assertRaises(DomainError):
            first_variation_check(state, 2, Perturbation.constant(), steps=[1e-3, 1e-2])


class TestLocalInvariants(unittest.TestCase):
    """权 2k−1 的边界不变量。"""

    def test_mu_power_flat_ball(self):
        """平坦单位球 n = 6, k = 2, 𝓛 = μ³, 边界上 ∂_nφ = 0。"""
        state = _state(ball_conformally_flat(6, resolution=21), with_boundary=False)
        report = local_invariant_variation_check(state, 2, Perturbation.neumann_bump(),
                                                 'mu_power', orders=ORDERS_6)
        self.assertLess(report.relative_residual, 1e-6)
        self.assertAlmostEqual(report.formula_value, -2.0 * pi ** 3, places=8)

    def test_l4_totally_geodesic(self):
        """半球面上 ℒ₄ ≡ 0, 两边都为零。"""
        state = _state(hemisphere(4, resolution=31), with_boundary=False)
        report = local_invariant_variation_check(state, 2, Perturbation.x1_mode(0.5), 'l4',
                                                 orders=ORDERS_4)
        self.assertLess(abs(report.fd_derivative), 1e-3)
        self.assertLess(abs(report.formula_value), 1e-3)

    def test_zero_direction(self):
        state = _state(hemisphere(4, resolution=21), with_boundary=False)
        report = local_invariant_variation_check(state, 2, Perturbation.zero(), 'mu_power',
                                                 orders=ORDERS_4)
        self.assertEqual(report.derivatives, [0.0] * len(report.steps))
        self.assertEqual(report.residual, 0.0)

    def test_unknown_invariant(self):
        state = _state(hemisphere(4, resolution=21), with_boundary=False)
        with self.assertRaises(DomainError):
            local_invariant_variation_check(state, 2, Perturbation.constant(), 'pfaffian')
        with self.assertRaises(DomainError):
            local_invariant_variation_check(state, 3, Perturbation.constant(), 'l4')


class TestVolumeAndCriticality(unittest.TestCase):
    """体积变分、Euler-Lagrange 残差与散度。"""

    def test_volume_variation(self):
        """dV/dt = −n∫φ dV。"""
        state = _state(hemisphere(4, resolution=21), with_boundary=False)
        report = volume_variation_check(state, Perturbation.radial_bump(), orders=ORDERS_4)
        self.assertLess(report.relative_residual, 1e-9)

    def test_round_hemisphere_is_critical(self):
        """半球面: σ_2 ≡ 3/2, B² = 0。"""
        residual = euler_lagrange_residual(_state(hemisphere(4, resolution=41)), 2)
        self.assertLess(residual.max_interior, 1e-3)
        self.assertLess(residual.max_boundary, 1e-4)

    def test_flat_half_ball(self):
        residual = euler_lagrange_residual(_state(half_ball_flat(4, resolution=21)), 2)
        self.assertLess(residual.max_interior, 1e-12)
        self.assertLess(residual.max_boundary, 1e-12)

    def test_perturbed_metric_not_critical(self):
        chart = ball_conformally_flat(4, ConformalExponent.random_smooth(4, seed=1),
                                      resolution=41)
        residual = euler_lagrange_residual(_state(chart), 2)
        self.assertGreater(residual.max_interior, 1e-4)

    def test_newton_tensor_divergence_free(self):
        """局部共形平坦时 T_q(A) 无散度, 散度随加密下降。"""
        chart = ball_conformally_flat(4, ConformalExponent.random_smooth(4, seed=4),
                                      resolution=21)
        for q in (1, 2, 3):
            frame = divergence_free_check(chart, q, resolutions=(21, 41))
            coarse, fine = frame['max_divergence'].tolist()
            self.assertLessEqual(fine, max(coarse / 3.5, 1e-9))


if __name__ == '__main__':
    unittest.main()
