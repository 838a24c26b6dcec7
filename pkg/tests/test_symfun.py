#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
测试初等对称函数、Newton张量与混合函数模块。
"""

import unittest
from math import comb, factorial

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sigma_yamabe.errors import DomainError
from sigma_yamabe.models.tensors import Spectrum, SymTensor
from sigma_yamabe.symfun import (
    faddeev_leverrier,
    matrix_sigmas,
    mixed_newton,
    mixed_newton_kronecker,
    mixed_sigma,
    mixed_sigma_kronecker,
    mixed_sigmas,
    newton_tensor,
    newton_tensor_kronecker,
    sigma_derivative,
    sigma_k,
    sigma_k_kronecker,
    spectrum_sigmas,
)


def random_symmetric(rng, n, batch=()):
    M = rng.normal(size=batch + (n, n))
    return 0.5 * (M + np.swapaxes(M, -1, -2))


class TestSigmaK(unittest.TestCase):
    """σ_k 的计算与定义域。"""

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_identity(self):
        """σ_2(I_4) = C(4,2) = 6。"""
        self.assertAlmostEqual(sigma_k(SymTensor.identity(4), 2), 6.0, places=12)

    def test_order_zero(self):
        """σ_0 = 1。"""
        W = random_symmetric(self.rng, 3)
        self.assertEqual(sigma_k(W, 0), 1.0)
        self.assertEqual(sigma_k(Spectrum([0.3, -2.0]), 0), 1.0)

    def test_pairwise_products(self):
        """λ = (1, 1, −0.4) 时 σ_2 = 0.2。"""
        self.assertAlmostEqual(sigma_k(Spectrum([1.0, 1.0, -0.4]), 2), 0.2, places=14)

    def test_out_of_range(self):
        """k < 0 或 k > n 抛出 DomainError。"""
        with self.assertRaises(DomainError):
            sigma_k(Spectrum([1.0, 2.0]), 3)
        with self.assertRaises(DomainError):
            sigma_k(np.eye(2), -1)
        with self.assertRaises(ValueError):
            sigma_k(np.eye(3), 4)

    def test_matrix_path_matches_eigenvalue_path(self):
        """特征多项式路径与特征值路径一致。"""
        for n in range(1, 7):
            W = random_symmetric(self.rng, n, (50,))
            eig = spectrum_sigmas(np.linalg.eigvalsh(W))
            fl = matrix_sigmas(W)
            scale = np.maximum(1.0, np.abs(eig))
            self.assertLess(np.max(np.abs(fl - eig) / scale), 1e-10)

    def test_kronecker_path_matches(self):
        """Kronecker 展开与特征值路径在 n <= 6 上一致到 1e-10。"""
        for n in range(1, 7):
            W = random_symmetric(self.rng, n, (100,))
            eig = spectrum_sigmas(np.linalg.eigvalsh(W))
            for q in range(n + 1):
                kron = sigma_k_kronecker(W, q)
                scale = np.maximum(1.0, np.abs(eig[:, q]))
                self.assertLess(np.max(np.abs(kron - eig[:, q]) / scale), 1e-10,
                                msg=f"n={n}, q={q}")

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (5,), elements=st.floats(-3, 3)))
    def test_vieta_matches_subset_enumeration(self, values):
        """Vieta 递推等于逐子集乘积之和。"""
        from itertools import combinations
        sig = spectrum_sigmas(values)
        for k in range(6):
            brute = sum(np.prod([values[i] for i in c]) for c in combinations(range(5), k))
            self.assertAlmostEqual(sig[k], brute, delta=1e-9 * max(1.0, abs(brute)))


class TestNewtonTensor(unittest.TestCase):
    """Newton 张量的递推、迹与导数恒等式。"""

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_first_tensor_of_identity(self):
        """T_1(I_3) = 2 I_3。"""
        T = newton_tensor(SymTensor.identity(3), 1)
        self.assertIsInstance(T, SymTensor)
        np.testing.assert_allclose(T.entries, 2.0 * np.eye(3), atol=1e-14)

    def test_trace_identity(self):
        """tr T_q(W) = (m − q) σ_q(W)。"""
        W = random_symmetric(self.rng, 4, (20,))
        sig, T = faddeev_leverrier(W)
        for q in range(5):
            tr = np.trace(T[:, q], axis1=-2, axis2=-1)
            np.testing.assert_allclose(tr, (4 - q) * sig[:, q], rtol=1e-10, atol=1e-10)

    def test_recursion_and_polynomial_form(self):
        """T_q = σ_q I − T_{q−1} W 且等于交错矩阵多项式。"""
        W = random_symmetric(self.rng, 5)
        sig = matrix_sigmas(W)
        for q in range(6):
            poly = sum((-1) ** j * sig[q - j] * np.linalg.matrix_power(W, j) for j in range(q + 1))
            np.testing.assert_allclose(newton_tensor(W, q), poly, rtol=1e-10, atol=1e-10)
            if q >= 1:
                rec = sig[q] * np.eye(5) - newton_tensor(W, q - 1) @ W
                np.testing.assert_allclose(newton_tensor(W, q), rec, atol=1e-10)

    def test_cayley_hamilton(self):
        """T_m(W) = 0。"""
        W = random_symmetric(self.rng, 4)
        np.testing.assert_allclose(newton_tensor(W, 4), 0.0, atol=1e-10)

    def test_derivative_against_finite_differences(self):
        """∂σ_q/∂W_ij = T_{q−1}^{ji}, 中心差分步长 1e-5。"""
        W = self.rng.normal(size=(4, 4))
        h = 1e-5
        for q in range(1, 5):
            D = sigma_derivative(W, q)
            fd = np.zeros_like(W)
            for i in range(4):
                for j in range(4):
                    E = np.zeros_like(W)
                    E[i, j] = h
                    fd[i, j] = (sigma_k(W + E, q) - sigma_k(W - E, q)) / (2 * h)
            np.testing.assert_allclose(D, fd, rtol=1e-6, atol=1e-6)

    def test_kronecker_newton_tensor(self):
        """Newton 张量的 Kronecker 展开与递推一致。"""
        W = random_symmetric(self.rng, 4)
        for q in range(5):
            np.testing.assert_allclose(newton_tensor_kronecker(W, q), newton_tensor(W, q),
                                       atol=1e-10)

    def test_normal_normal_entry(self):
        """T_q(A)^n_n = σ_q(A^T), A^T 为切向块。"""
        for _ in range(20):
            A = random_symmetric(self.rng, 4)
            for q in range(4):
                self.assertAlmostEqual(newton_tensor(A, q)[3, 3], sigma_k(A[:3, :3], q),
                                       delta=1e-10)

    def test_mixed_normal_entries(self):
        """T_q(A)^α_n = −T_{q−1}(A^T)^α_β A^β_n。"""
        for _ in range(20):
            A = random_symmetric(self.rng, 5)
            for q in range(1, 5):
                lhs = newton_tensor(A, q)[:4, 4]
                rhs = -newton_tensor(A[:4, :4], q - 1) @ A[:4, 4]
                np.testing.assert_allclose(lhs, rhs, atol=1e-10)


class TestMixedFunctions(unittest.TestCase):
    """混合对称函数与混合 Newton 张量。"""

    def setUp(self):
        self.rng = np.random.default_rng(3)

    def test_equal_slots(self):
        """σ_{q,r}(A, A) = σ_q(A)。"""
        A = random_symmetric(self.rng, 4)
        self.assertAlmostEqual(mixed_sigma(A, A, 3, 1), sigma_k(A, 3), delta=1e-10)
        np.testing.assert_allclose(mixed_sigmas(A, A, 2), sigma_k(A, 2), atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.float64, (2, 3, 3), elements=st.floats(-2, 2)))
    def test_polarization_matches_kronecker(self, pair):
        """极化计算与 Kronecker 展开一致。"""
        A, B = pair
        for q in range(4):
            for r in range(q + 1):
                self.assertAlmostEqual(mixed_sigma(A, B, q, r),
                                       float(mixed_sigma_kronecker(A, B, q, r)), delta=1e-9)

    def test_mixed_newton_matches_kronecker(self):
        """T_{q,r} 的极化计算与 Kronecker 展开一致(m = 4)。"""
        A = random_symmetric(self.rng, 4)
        B = random_symmetric(self.rng, 4)
        for q in range(4):
            for r in range(q + 1):
                np.testing.assert_allclose(mixed_newton(A, B, q, r),
                                           mixed_newton_kronecker(A, B, q, r), atol=1e-10)

    def test_all_a_slots(self):
        """T_{q,q}(A, B) = T_q(A)。"""
        A = random_symmetric(self.rng, 4)
        B = random_symmetric(self.rng, 4)
        for q in range(5):
            np.testing.assert_allclose(mixed_newton(A, B, q, q), newton_tensor(A, q), atol=1e-10)

    def test_contraction_identity(self):
        """T_{q,r}(A,B)^i_j A^j_i = (q+1) σ_{q+1,r+1}(A, B)。"""
        A = random_symmetric(self.rng, 4)
        B = random_symmetric(self.rng, 4)
        for q in range(4):
            for r in range(q + 1):
                lhs = np.trace(mixed_newton(A, B, q, r) @ A)
                self.assertAlmostEqual(lhs, (q + 1) * mixed_sigma(A, B, q + 1, r + 1), delta=1e-9)

    def test_closed_form_with_multiple_of_identity(self):
        """σ_{q,r}(A^T, μI) = r!(m−r)!/(q!(m−q)!) σ_r(A^T) μ^{q−r}。"""
        for m in (3, 4, 5):
            At = random_symmetric(self.rng, m)
            mu = self.rng.normal()
            for q in range(m + 1):
                for r in range(q + 1):
                    expected = (factorial(r) * factorial(m - r) / (factorial(q) * factorial(m - q))
                                * sigma_k(At, r) * mu ** (q - r))
                    self.assertAlmostEqual(mixed_sigma(At, mu * np.eye(m), q, r), expected,
                                           delta=1e-9 * max(1.0, abs(expected)))

    def test_sigma21_four_dimensions(self):
        """n = 4: σ_{2,1}(A^T, μI) = ((n−2)/2) σ_1(A^T) μ。"""
        At = random_symmetric(self.rng, 3)
        mu = 0.7
        self.assertAlmostEqual(mixed_sigma(At, mu * np.eye(3), 2, 1),
                               (4 - 2) / 2 * np.trace(At) * mu, delta=1e-10)

    def test_mixed_normal_entries_with_identity(self):
        """T_{q,r}(A, μI)^α_n = −(r/q) T_{q−1,r−1}(A^T, μI)^α_β A^β_n, r = 0 时为零。"""
        A = random_symmetric(self.rng, 4)
        mu = -0.4
        for q in range(1, 4):
            for r in range(q + 1):
                lhs = mixed_newton_kronecker(A, mu * np.eye(4), q, r)[:3, 3]
                if r == 0:
                    np.testing.assert_allclose(lhs, 0.0, atol=1e-12)
                    continue
                rhs = -(r / q) * mixed_newton(A[:3, :3], mu * np.eye(3), q - 1, r - 1) @ A[:3, 3]
                np.testing.assert_allclose(lhs, rhs, atol=1e-10)

    def test_first_variation_formula(self):
        """σ_{q+1,r+1} 沿 A' = kAφ + M, B' = lBφ + N 的导数公式。"""
        h = 1e-6
        for _ in range(10):
            A, B, M, N = (random_symmetric(self.rng, 4) for _ in range(4))
            kk, ll, phi = self.rng.normal(size=3)
            dA = kk * A * phi + M
            dB = ll * B * phi + N
            for q in range(3):
                for r in range(q + 1):
                    fd = (mixed_sigma(A + h * dA, B + h * dB, q + 1, r + 1)
                          - mixed_sigma(A - h * dA, B - h * dB, q + 1, r + 1)) / (2 * h)
                    sig = mixed_sigma(A, B, q + 1, r + 1)
                    formula = ((kk * (r + 1) + ll * (q - r)) * phi * sig
                               + (r + 1) / (q + 1) * np.trace(mixed_newton(A, B, q, r) @ M))
                    if r < q:
                        formula += (q - r) / (q + 1) * np.trace(mixed_newton(A, B, q, r + 1) @ N)
                    self.assertAlmostEqual(fd, formula, delta=1e-6 * max(1.0, abs(formula)))

    def test_dimension_mismatch(self):
        """A 与 B 维数不一致抛出 DomainError。"""
        with self.assertRaises(DomainError):
            mixed_sigma(np.eye(3), np.eye(4), 2, 1)
        with self.assertRaises(DomainError):
            mixed_newton(np.eye(3), np.eye(3), 2, 3)

    def test_binomial_expansion(self):
        """σ_q(A + tB) = Σ_r C(q,r) t^{q−r} σ_{q,r}(A, B)。"""
        A = random_symmetric(self.rng, 5)
        B = random_symmetric(self.rng, 5)
        t = 0.37
        coeffs = mixed_sigmas(A, B, 3)
        expansion = sum(comb(3, r) * t ** (3 - r) * coeffs[r] for r in range(4))
        self.assertAlmostEqual(expansion, sigma_k(A + t * B, 3), delta=1e-10)


if __name__ == '__main__':
    unittest.main()
