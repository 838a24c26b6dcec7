#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试Gårding锥判定、归一化算子与结构条件。
"""

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sigma_yamabe.errors import ConeViolationError, DomainError, SamplingError
from sigma_yamabe.models.tensors import Spectrum
from sigma_yamabe.symfun import (
    F_normalized,
    check_structure_conditions,
    cone_membership,
    gamma_t_membership,
    newton_maclaurin_margins,
    normalized_hessian,
    normalized_operator,
    sample_cone,
)


class TestConeMembership(unittest.TestCase):
    """Γ_k^+ 成员判定。"""

    def test_all_ones_inside(self):
        """e = (1,…,1) 属于每个 Γ_k^+。"""
        for k in range(1, 6):
            tag = cone_membership(Spectrum.ones(5), k)
            self.assertTrue(tag.inside)
            self.assertEqual(len(tag.sigmas), k)

    def test_inside_example(self):
        """λ = (1, 1, −0.4) ∈ Γ_2^+。"""
        tag = cone_membership(Spectrum([1.0, 1.0, -0.4]), 2)
        self.assertEqual(tag.verdict, 'inside')
        self.assertAlmostEqual(tag.sigmas[0], 1.6, places=14)
        self.assertAlmostEqual(tag.sigmas[1], 0.2, places=14)

    def test_outside_example(self):
        """λ = (1, −1, 1): σ_2 = −1, 在锥外。"""
        tag = cone_membership(Spectrum([1.0, -1.0, 1.0]), 2)
        self.assertEqual(tag.verdict, 'outside')
        self.assertAlmostEqual(tag.sigmas[1], -1.0, places=14)

    def test_boundary_verdict(self):
        """σ_2 = 0 落在边界上。"""
        tag = cone_membership(np.array([1.0, 0.0, 0.0]), 2)
        self.assertEqual(tag.verdict, 'boundary')

    def test_order_range(self):
        """k = 0 或 k > n 为定义域错误。"""
        with self.assertRaises(DomainError):
            cone_membership(Spectrum.ones(3), 0)
        with self.assertRaises(DomainError):
            cone_membership(Spectrum.ones(3), 4)

    def test_newton_maclaurin_equality_at_e(self):
        """λ = e 处 Newton-MacLaurin 取等号。"""
        for n, k in [(3, 2), (4, 2), (6, 3), (6, 6)]:
            margins = newton_maclaurin_margins(Spectrum.ones(n), k)
            self.assertLessEqual(np.max(np.abs(margins)), 1e-12)

    def test_newton_maclaurin_inside_cone(self):
        """锥内样本满足 Newton-MacLaurin 不等式。"""
        points = sample_cone(5, 3, 300, seed=2)
        margins = newton_maclaurin_margins(points, 3)
        self.assertGreaterEqual(margins.min(), -1e-10)

    def test_gamma_t_membership(self):
        """t = 1 时 Γ^t_m 即 Γ_m^+; t 减小时平移向锥内。"""
        lam = np.array([1.0, 1.0, 1.0, -0.2])
        self.assertTrue(gamma_t_membership(lam, 2, 1.0).inside)
        lam_out = np.array([1.0, 1.0, -0.9, -0.9])
        self.assertEqual(gamma_t_membership(lam_out, 2, 1.0).verdict, 'outside')
        self.assertTrue(gamma_t_membership(lam_out, 2, -4.0).inside)


class TestNormalizedOperator(unittest.TestCase):
    """归一化算子 F 的取值与导数。"""

    def test_normalization(self):
        """F(e) = 1, F(2e) = 2, F(e/2) = 1/2。"""
        self.assertAlmostEqual(F_normalized(Spectrum.ones(4), 2)[0], 1.0, places=14)
        self.assertAlmostEqual(F_normalized(Spectrum.ones(4, 2.0), 2)[0], 2.0, places=14)
        self.assertAlmostEqual(F_normalized(np.full(4, 0.5), 2)[0], 0.5, places=14)

    def test_outside_raises(self):
        """锥外的谱抛出携带 σ_i 的 ConeViolationError。"""
        with self.assertRaises(ConeViolationError) as ctx:
            F_normalized(Spectrum([1.0, -1.0, 1.0]), 2)
        self.assertAlmostEqual(ctx.exception.sigmas[1], -1.0)
        self.assertIsInstance(ctx.exception, ValueError)

    def test_batch_error_reports_node(self):
        """批量计算时报告失败节点。"""
        values = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 1.0]])
        with self.assertRaises(ConeViolationError) as ctx:
            normalized_operator(values, 2)
        self.assertEqual(ctx.exception.node, (1,))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.1, 10.0))
    def test_euler_and_homogeneity(self, seed, c):
        """F(cλ) = cF(λ), Σ λ_i F^i = F。"""
        lam = sample_cone(4, 2, 1, seed=seed)[0]
        value, grad = F_normalized(lam, 2)
        self.assertAlmostEqual(F_normalized(c * lam, 2)[0], c * value,
                               delta=1e-10 * max(1.0, c * value))
        self.assertAlmostEqual(float(lam @ grad.values), value, delta=1e-10 * max(1.0, value))
        self.assertTrue(np.all(grad.values > 0))

    def test_hessian_against_finite_differences(self):
        """Hessian 与梯度的中心差分一致。"""
        lam = np.array([1.0, 0.8, 0.5, -0.1])
        H = normalized_hessian(lam, 3)
        h = 1e-6
        fd = np.zeros((4, 4))
        for j in range(4):
            e = np.zeros(4)
            e[j] = h
            fd[:, j] = (normalized_operator(lam + e, 3)[1] - normalized_operator(lam - e, 3)[1]) / (2 * h)
        np.testing.assert_allclose(H, fd, atol=1e-6)


class TestStructureConditions(unittest.TestCase):
    """结构条件 S0–S3 与 (A)。"""

    def test_linear_case(self):
        """k = 1: F 线性, S1 裕量为 0, ρ = n − 1。"""
        report = check_structure_conditions(1, 3, samples=200, seed=0)
        self.assertEqual(report.margins['S1'], 0.0)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.rho, 2.0, places=10)

    def test_sigma2_four_dimensions(self):
        """(n, k) = (4, 2), 10³ 个样本全部通过, ε >= 1/2。"""
        report = check_structure_conditions(2, 4, samples=1000, seed=1)
        self.assertTrue(report.passed, msg=str(report.checks))
        self.assertGreaterEqual(report.epsilon, 0.5 - 1e-8)
        self.assertLessEqual(report.rho, 2.0 + 1e-8)
        self.assertEqual(report.samples, 1000)

    def test_higher_orders(self):
        """(6,2) 与 (6,3) 通过全部条件。"""
        for k in (2, 3):
            report = check_structure_conditions(k, 6, samples=1000, seed=5)
            self.assertTrue(report.passed, msg=f"k={k}: {report.checks}")
            self.assertGreaterEqual(report.epsilon, 1.0 / k - 1e-8)
            self.assertLessEqual(report.rho, 6 - k + 1e-8)

    def test_condition_a_example(self):
        """λ = (1,1,1,−0.2): Σ_{j≠4} F^j <= 2 F^4。"""
        _, grad = F_normalized(Spectrum([1.0, 1.0, 1.0, -0.2]), 2)
        g = grad.values
        self.assertLessEqual(g[:3].sum(), 2.0 * g[3] + 1e-12)

    def test_seed_reproducibility(self):
        """同一种子给出相同报告。"""
        a = check_structure_conditions(2, 4, samples=100, seed=9)
        b = check_structure_conditions(2, 4, samples=100, seed=9)
        self.assertEqual(a, b)


class TestSampler(unittest.TestCase):
    """锥内拒绝抽样。"""

    def test_samples_inside(self):
        """所有样本都在锥内, 且可复现。"""
        a = sample_cone(6, 3, 50, seed=4)
        b = sample_cone(6, 3, 50, seed=4)
        np.testing.assert_array_equal(a, b)
        for lam in a:
            self.assertTrue(cone_membership(lam, 3).inside)

    def test_retry_cap(self):
        """抽样上限耗尽时抛出 SamplingError。"""
        with self.assertRaises(SamplingError) as ctx:
            sample_cone(6, 6, 100, seed=0, box=(-1.0, 0.01), max_attempts=200)
        self.assertEqual(ctx.exception.attempts, 200)


if __name__ == '__main__':
    unittest.main()
